#pragma once

#include "pg/manifold.hpp"

namespace pg {

/// X = sum_i X^i d/dx^i.
struct VectorField {
  std::vector<Expr> c;

  VectorField() = default;
  explicit VectorField(std::size_t dim) : c(dim) {}
  std::size_t dim() const { return c.size(); }
  Expr& operator[](std::size_t i) { return c[i]; }
  const Expr& operator[](std::size_t i) const { return c[i]; }
};

/// A symmetric field T(alpha, beta) on pairs of 1-forms, T^{ij} = T(dx^i, dx^j).
struct SymTensor2 {
  SquareField m;
  std::size_t dim() const { return m.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j) const { return m(i, j); }
};

/// Sign relating the Hamiltonian field to the anchor: X_phi = kHamiltonianSign * sharp(d phi).
///
/// The anchor is fixed by eta(sharp w) = Pi(w, eta), so (sharp w)^j = Pi^{ij} w_i,
/// and the Hamiltonian field by X_phi(psi) = {psi, phi} = Pi(d psi, d phi), so
/// X_phi^j = Pi^{ji} d_i phi. Antisymmetry of Pi gives the minus sign.
inline constexpr double kHamiltonianSign = -1.0;

VectorField sharp(const BivectorField& pi, const OneForm& w);

VectorField hamiltonian(const BivectorField& pi, const Expr& phi);

/// X(f) = sum_i X^i d_i f
Expr apply(const VectorField& x, const Expr& f);

/// Commutator of vector fields, by components.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// (L_X alpha)_k = X^i d_i alpha_k + alpha_i d_k X^i
OneForm lie_derivative(const VectorField& x, const OneForm& alpha);

/// [w, e]_Pi = L_{sharp w} e - L_{sharp e} w - d(Pi(w, e))
OneForm koszul_bracket(const BivectorField& pi, const OneForm& w, const OneForm& e);

/// max over points of the euclidean norm of sharp(df).
double casimir_residual(const BivectorField& pi, const Expr& f, const SamplePlan& plan);

/// max over points and i<j<k of the cyclic coordinate sum
/// Pi^{li} d_l Pi^{jk} + Pi^{lj} d_l Pi^{ki} + Pi^{lk} d_l Pi^{ij}.
double jacobiator_residual(const BivectorField& pi, const SamplePlan& plan);

struct AnchorCheck {
  double residual = 0.0;
  double jacobiator = 0.0;
  /// False when Pi is not Poisson on the plan; the morphism identity is
  /// then not expected to hold and a nonzero residual is informational.
  bool poisson = true;
};

/// max-norm of sharp([w,e]_Pi) - [sharp w, sharp e].
AnchorCheck anchor_morphism_residual(const BivectorField& pi, const OneForm& w, const OneForm& e,
                                     const SamplePlan& plan, double tol = 1e-8);

/// Lie derivative of a symmetric 2-tensor along a 1-form, assembled on the
/// coordinate coframe:
/// (L_a T)(dx^i, dx^j) = sharp(a)(T^{ij}) - T([a,dx^i], dx^j) - T(dx^i, [a,dx^j]).
SymTensor2 lie_derivative_t2(const BivectorField& pi, const OneForm& a, const SymTensor2& t);

/// The same operator applied directly to arbitrary 1-forms, without going
/// through components. Used to check lie_derivative_t2.
Expr lie_derivative_t2_direct(const BivectorField& pi, const OneForm& a, const SymTensor2& t, const OneForm& alpha,
                              const OneForm& beta);

inline SymTensor2 as_tensor(const Cometric& g) { return SymTensor2{g.m}; }

}  // namespace pg
