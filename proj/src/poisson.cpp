#include "pg/poisson.hpp"

#include <algorithm>
#include <cmath>

namespace pg {

VectorField sharp(const BivectorField& pi, const OneForm& w) {
  const std::size_t n = pi.dim();
  VectorField x(n);
  for (std::size_t j = 0; j < n; ++j) {
    Expr s;
    for (std::size_t i = 0; i < n; ++i) s += pi(i, j) * w[i];
    x[j] = s;
  }
  return x;
}

VectorField hamiltonian(const BivectorField& pi, const Expr& phi) {
  const std::size_t n = pi.dim();
  const OneForm dphi = d(phi, n);
  VectorField x(n);
  for (std::size_t j = 0; j < n; ++j) {
    Expr s;
    for (std::size_t i = 0; i < n; ++i) s += pi(j, i) * dphi[i];
    x[j] = s;
  }
  return x;
}

Expr apply(const VectorField& x, const Expr& f) {
  Expr s;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x[i].is_zero()) continue;
    s += x[i] * diff(f, static_cast<int>(i));
  }
  return s;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  VectorField r(x.dim());
  for (std::size_t k = 0; k < x.dim(); ++k) r[k] = apply(x, y[k]) - apply(y, x[k]);
  return r;
}

OneForm lie_derivative(const VectorField& x, const OneForm& alpha) {
  const std::size_t n = x.dim();
  OneForm r(n);
  for (std::size_t k = 0; k < n; ++k) {
    Expr s = apply(x, alpha[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i].is_zero()) continue;
      s += alpha[i] * diff(x[i], static_cast<int>(k));
    }
    r[k] = s;
  }
  return r;
}

OneForm koszul_bracket(const BivectorField& pi, const OneForm& w, const OneForm& e) {
  const std::size_t n = pi.dim();
  return lie_derivative(sharp(pi, w), e) - lie_derivative(sharp(pi, e), w) - d(pair_pi(pi, w, e), n);
}

double casimir_residual(const BivectorField& pi, const Expr& f, const SamplePlan& plan) {
  const VectorField x = sharp(pi, d(f, pi.dim()));
  const ValueTable t = sample(plan, x.c);
  double worst = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    double s = 0.0;
    for (double v : t.row(r)) s += v * v;
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double jacobiator_residual(const BivectorField& pi, const SamplePlan& plan) {
  const std::size_t n = pi.dim();
  std::vector<Expr> sums;
  auto cyc = [&](std::size_t a, std::size_t b, std::size_t c) {
    Expr s;
    for (std::size_t l = 0; l < n; ++l) s += pi(l, a) * diff(pi(b, c), static_cast<int>(l));
    return s;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) sums.push_back(cyc(i, j, k) + cyc(j, k, i) + cyc(k, i, j));
    }
  }
  return max_abs(plan, sums);
}

AnchorCheck anchor_morphism_residual(const BivectorField& pi, const OneForm& w, const OneForm& e,
                                     const SamplePlan& plan, double tol) {
  AnchorCheck out;
  out.jacobiator = jacobiator_residual(pi, plan);
  out.poisson = out.jacobiator < tol;
  const VectorField lhs = sharp(pi, koszul_bracket(pi, w, e));
  const VectorField rhs = lie_bracket(sharp(pi, w), sharp(pi, e));
  std::vector<Expr> diffs;
  for (std::size_t k = 0; k < pi.dim(); ++k) diffs.push_back(lhs[k] - rhs[k]);
  out.residual = max_abs(plan, diffs);
  return out;
}

SymTensor2 lie_derivative_t2(const BivectorField& pi, const OneForm& a, const SymTensor2& t) {
  const std::size_t n = pi.dim();
  const VectorField anchor = sharp(pi, a);
  std::vector<OneForm> brackets;
  brackets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) brackets.push_back(koszul_bracket(pi, a, OneForm::basis(n, i)));
  SymTensor2 r{SquareField(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Expr s = apply(anchor, t(i, j));
      for (std::size_t k = 0; k < n; ++k) {
        s -= brackets[i][k] * t(k, j);
        s -= t(i, k) * brackets[j][k];
      }
      r.m(i, j) = s;
      r.m(j, i) = s;
    }
  }
  return r;
}

Expr lie_derivative_t2_direct(const BivectorField& pi, const OneForm& a, const SymTensor2& t, const OneForm& alpha,
                              const OneForm& beta) {
  return apply(sharp(pi, a), contract(t.m, alpha, beta)) - contract(t.m, koszul_bracket(pi, a, alpha), beta) -
         contract(t.m, alpha, koszul_bracket(pi, a, beta));
}

}  // namespace pg
