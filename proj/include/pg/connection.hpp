#pragma once

#include <optional>

#include "pg/poisson.hpp"

namespace pg {

/// Connection coefficients: D_{dx^i} dx^j = sum_k Gamma_k^{ij} dx^k.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(std::size_t dim) : dim_(dim), data_(dim * dim * dim) {}

  std::size_t dim() const { return dim_; }
  /// Gamma_k^{ij}
  Expr& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(i * dim_ + j) * dim_ + k]; }
  const Expr& operator()(std::size_t k, std::size_t i, std::size_t j) const { return data_[(i * dim_ + j) * dim_ + k]; }
  std::span<const Expr> flat() const { return data_; }

  /// D_{dx^i} dx^j as a 1-form.
  OneForm derivative_of_basis(std::size_t i, std::size_t j) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Expr> data_;
};

/// Components of R(dx^i, dx^j) dx^k, indexed (i, j, k, m) for the dx^m part.
class CurvatureField {
 public:
  CurvatureField() = default;
  explicit CurvatureField(std::size_t dim) : dim_(dim), data_(dim * dim * dim * dim) {}

  std::size_t dim() const { return dim_; }
  Expr& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t m) {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + m];
  }
  const Expr& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t m) const {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + m];
  }
  std::span<const Expr> flat() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Expr> data_;
};

/// Ric(dx^i, dx^j).
struct RicciField {
  SquareField m;
  const Expr& operator()(std::size_t i, std::size_t j) const { return m(i, j); }
};

/// Everything the connection-level checks need, derived once from (chart, g, Pi).
struct Geometry {
  Chart chart;
  Cometric g;
  CovariantMetric gl;
  BivectorField pi;
  Christoffel gamma;

  std::size_t dim() const { return chart.dim(); }
};

/// Validates the chart, checks g on the plan, inverts it and builds Gamma.
Geometry make_geometry(Chart chart, Cometric g, BivectorField pi, const SamplePlan& plan);

/// Gamma_k^{ij} = 1/2 sum_{l,m} g~_{mk} (Pi^{il} d_l g^{jm} + Pi^{jl} d_l g^{im} - Pi^{ml} d_l g^{ij}
///                                  - g^{li} d_l Pi^{jm} - g^{lj} d_l Pi^{im}) + 1/2 d_k Pi^{ij}
Christoffel christoffel(const Cometric& g, const CovariantMetric& gl, const BivectorField& pi);

/// Oracle for christoffel(): max over points and basis triples of
/// |2 g(D_{dx^i} dx^j, dx^k) - K(dx^i, dx^j, dx^k)| where K is the Koszul
/// formula built from anchors and Koszul brackets only.
double koszul_pairing_residual(const Cometric& g, const CovariantMetric& gl, const BivectorField& pi,
                               const Christoffel& gamma, const SamplePlan& plan);

/// (D_w e)_k = sum_i w_i sharp(dx^i)(e_k) + sum_{ij} w_i e_j Gamma_k^{ij}
OneForm d_form(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e);

/// (Df)(w) = sharp(w)(f)
Expr d_scalar(const BivectorField& pi, const Expr& f, const OneForm& w);

/// (D_w T)(dx^j, dx^k) = sharp(w)(T^{jk}) - T(D_w dx^j, dx^k) - T(dx^j, D_w dx^k)
SquareField d_tensor(const Christoffel& gamma, const BivectorField& pi, const SquareField& t, const OneForm& w);

double torsion_residual(const Christoffel& gamma, const BivectorField& pi, const SamplePlan& plan);
double metric_residual(const Christoffel& gamma, const Cometric& g, const BivectorField& pi, const SamplePlan& plan);

/// R(dx^i,dx^j)dx^k = D_i D_j dx^k - D_j D_i dx^k - D_{[dx^i,dx^j]} dx^k, by composition.
CurvatureField curvature(const Christoffel& gamma, const BivectorField& pi);

/// R(a, b) c for arbitrary 1-forms.
OneForm curvature_apply(const CurvatureField& r, const OneForm& a, const OneForm& b, const OneForm& c);

/// Ric(w, e) = sum_{ij} g~_{ij} g(R(w, dx^i) dx^j, e)
RicciField ricci(const CurvatureField& r, const Cometric& g, const CovariantMetric& gl);
Expr scalar_curvature(const RicciField& ric, const CovariantMetric& gl);

/// Ric(w, e) = sum_a g(R(w, theta_a) theta_a, e) for a caller-supplied
/// orthonormal coframe.
RicciField ricci_with_coframe(const CurvatureField& r, const Cometric& g, std::span<const OneForm> coframe);

/// D^2_{w,e} target = D_w D_e target - D_{D_w e} target
OneForm second_derivative(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e,
                          const OneForm& target);
Expr second_derivative_scalar(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e,
                              const Expr& f);

/// -sum_{ij} g~_{ij} D^2_{dx^i,dx^j}, the metric-contracted form of the
/// orthonormal-coframe trace.
OneForm laplacian_form(const Christoffel& gamma, const BivectorField& pi, const CovariantMetric& gl,
                       const OneForm& target);
Expr laplacian_scalar(const Christoffel& gamma, const BivectorField& pi, const CovariantMetric& gl, const Expr& f);

/// (Jw)_k = sum_{ij} g~_{kj} Pi^{ij} w_i, so that Pi(w, e) = g(Jw, e).
OneForm j_endo(const CovariantMetric& gl, const BivectorField& pi, const OneForm& w);

double dpi_residual(const Christoffel& gamma, const BivectorField& pi, const SamplePlan& plan);
double dj_residual(const Christoffel& gamma, const Cometric& g, const CovariantMetric& gl, const BivectorField& pi,
                   const SamplePlan& plan);

/// max over points, i, k of |(D_{dx^i} target)_k|.
double parallel_residual(const Christoffel& gamma, const BivectorField& pi, const OneForm& target,
                         const SamplePlan& plan);
/// Same for a 2-tensor on 1-forms (the metric itself gives metric_residual).
double parallel_residual(const Christoffel& gamma, const BivectorField& pi, const SquareField& target,
                         const SamplePlan& plan);

/// |D eta|^2 = sum_{ij} g~_{ij} g(D_{dx^i} eta, D_{dx^j} eta)
Expr d_norm_squared(const Geometry& geo, const OneForm& eta);

struct GeometryVerdict {
  double torsion_res = 0.0;
  double metric_res = 0.0;
  double dpi_res = 0.0;
  double dj_res = 0.0;
  bool is_riemannian_poisson = false;
};

GeometryVerdict assess(const Geometry& geo, const SamplePlan& plan, double tol);

struct WeitzenbockResiduals {
  double eq310 = 0.0;
  /// Present only when the hypotheses hold on the plan.
  std::optional<double> eq317;
  std::optional<double> eq318;
  double killing_gate = 0.0;   // max |(L_eta g)^{ij}|
  double geodesic_gate = 0.0;  // max |(D_eta eta)_k|
  double poisson_gate = 0.0;   // max(jacobiator, dpi residual); reported, does not gate
};

/// Pointwise identities behind the Bochner-type argument:
///   eq310: Lap(-|eta|^2/2) = |D eta|^2 - g(Lap eta, eta)        (always)
///   eq317: g(Lap eta, eta) = Ric(eta, eta)                      (gated)
///   eq318: Lap(-|eta|^2/2) = |D eta|^2 - Ric(eta, eta)          (gated)
/// The gated pair is evaluated only when eta is Killing with D_eta eta = 0.
WeitzenbockResiduals weitzenbock_residuals(const Geometry& geo, const OneForm& eta, const SamplePlan& plan,
                                           double tol);

}  // namespace pg
