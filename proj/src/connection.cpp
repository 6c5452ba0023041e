#include "pg/connection.hpp"

#include <algorithm>
#include <cmath>

namespace pg {

OneForm Christoffel::derivative_of_basis(std::size_t i, std::size_t j) const {
  OneForm r(dim_);
  for (std::size_t k = 0; k < dim_; ++k) r[k] = (*this)(k, i, j);
  return r;
}

Geometry make_geometry(Chart chart, Cometric g, BivectorField pi, const SamplePlan& plan) {
  chart.validate();
  if (g.dim() != chart.dim() || pi.dim() != chart.dim()) throw GeometryError("field dimension does not match chart");
  validate_cometric(g, plan);
  CovariantMetric gl = invert_cometric(g, &plan);
  Christoffel gamma = christoffel(g, gl, pi);
  return Geometry{std::move(chart), std::move(g), std::move(gl), std::move(pi), std::move(gamma)};
}

Christoffel christoffel(const Cometric& g, const CovariantMetric& gl, const BivectorField& pi) {
  const std::size_t n = g.dim();
  // dg[l](i,j) = d_l g^{ij}, dp[l](i,j) = d_l Pi^{ij}
  std::vector<SquareField> dg(n, SquareField(n));
  std::vector<SquareField> dp(n, SquareField(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        dg[l](i, j) = diff(g(i, j), static_cast<int>(l));
        dp[l](i, j) = diff(pi(i, j), static_cast<int>(l));
      }
    }
  }
  const Expr half(0.5);
  Christoffel gamma(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // inner[m] = sum_l (...), independent of k
      std::vector<Expr> inner(n);
      for (std::size_t m = 0; m < n; ++m) {
        Expr s;
        for (std::size_t l = 0; l < n; ++l) {
          s += pi(i, l) * dg[l](j, m);
          s += pi(j, l) * dg[l](i, m);
          s -= pi(m, l) * dg[l](i, j);
          s -= g(l, i) * dp[l](j, m);
          s -= g(l, j) * dp[l](i, m);
        }
        inner[m] = s;
      }
      for (std::size_t k = 0; k < n; ++k) {
        Expr s;
        for (std::size_t m = 0; m < n; ++m) s += gl(m, k) * inner[m];
        gamma(k, i, j) = half * s + half * dp[k](i, j);
      }
    }
  }
  return gamma;
}

double koszul_pairing_residual(const Cometric& g, const CovariantMetric& /*gl*/, const BivectorField& pi,
                               const Christoffel& gamma, const SamplePlan& plan) {
  const std::size_t n = g.dim();
  std::vector<OneForm> basis;
  for (std::size_t i = 0; i < n; ++i) basis.push_back(OneForm::basis(n, i));
  std::vector<VectorField> anchors;
  for (const auto& b : basis) anchors.push_back(sharp(pi, b));
  std::vector<std::vector<OneForm>> br(n, std::vector<OneForm>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) br[i][j] = koszul_bracket(pi, basis[i], basis[j]);
  }
  std::vector<Expr> res;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        Expr lhs;
        for (std::size_t m = 0; m < n; ++m) lhs += gamma(m, i, j) * g(m, k);
        lhs = Expr(2.0) * lhs;
        const Expr rhs = apply(anchors[i], g(j, k)) + apply(anchors[j], g(i, k)) - apply(anchors[k], g(i, j)) +
                         pair_g(g, br[i][j], basis[k]) - pair_g(g, br[j][k], basis[i]) +
                         pair_g(g, br[k][i], basis[j]);
        res.push_back(lhs - rhs);
      }
    }
  }
  return max_abs(plan, res);
}

OneForm d_form(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e) {
  const std::size_t n = gamma.dim();
  const VectorField anchor = sharp(pi, w);
  OneForm r(n);
  for (std::size_t k = 0; k < n; ++k) {
    Expr s = apply(anchor, e[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i].is_zero()) continue;
      Expr inner;
      for (std::size_t j = 0; j < n; ++j) inner += e[j] * gamma(k, i, j);
      s += w[i] * inner;
    }
    r[k] = s;
  }
  return r;
}

Expr d_scalar(const BivectorField& pi, const Expr& f, const OneForm& w) { return apply(sharp(pi, w), f); }

SquareField d_tensor(const Christoffel& gamma, const BivectorField& pi, const SquareField& t, const OneForm& w) {
  const std::size_t n = gamma.dim();
  const VectorField anchor = sharp(pi, w);
  std::vector<OneForm> dw;  // D_w dx^j
  for (std::size_t j = 0; j < n; ++j) dw.push_back(d_form(gamma, pi, w, OneForm::basis(n, j)));
  SquareField r(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      Expr s = apply(anchor, t(j, k));
      for (std::size_t m = 0; m < n; ++m) {
        s -= dw[j][m] * t(m, k);
        s -= t(j, m) * dw[k][m];
      }
      r(j, k) = s;
    }
  }
  return r;
}

double torsion_residual(const Christoffel& gamma, const BivectorField& pi, const SamplePlan& plan) {
  const std::size_t n = gamma.dim();
  std::vector<Expr> res;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const OneForm a = OneForm::basis(n, i);
      const OneForm b = OneForm::basis(n, j);
      const OneForm t = d_form(gamma, pi, a, b) - d_form(gamma, pi, b, a) - koszul_bracket(pi, a, b);
      res.insert(res.end(), t.c.begin(), t.c.end());
    }
  }
  return max_abs(plan, res);
}

double parallel_residual(const Christoffel& gamma, const BivectorField& pi, const SquareField& target,
                         const SamplePlan& plan) {
  const std::size_t n = gamma.dim();
  std::vector<Expr> res;
  for (std::size_t i = 0; i < n; ++i) {
    const SquareField dt = d_tensor(gamma, pi, target, OneForm::basis(n, i));
    res.insert(res.end(), dt.flat().begin(), dt.flat().end());
  }
  return max_abs(plan, res);
}

double metric_residual(const Christoffel& gamma, const Cometric& g, const BivectorField& pi, const SamplePlan& plan) {
  return parallel_residual(gamma, pi, g.m, plan);
}

CurvatureField curvature(const Christoffel& gamma, const BivectorField& pi) {
  const std::size_t n = gamma.dim();
  CurvatureField r(n);
  std::vector<OneForm> basis;
  for (std::size_t i = 0; i < n; ++i) basis.push_back(OneForm::basis(n, i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const OneForm bracket = koszul_bracket(pi, basis[i], basis[j]);
      for (std::size_t k = 0; k < n; ++k) {
        const OneForm term = d_form(gamma, pi, basis[i], gamma.derivative_of_basis(j, k)) -
                             d_form(gamma, pi, basis[j], gamma.derivative_of_basis(i, k)) -
                             d_form(gamma, pi, bracket, basis[k]);
        for (std::size_t m = 0; m < n; ++m) r(i, j, k, m) = term[m];
      }
    }
  }
  return r;
}

OneForm curvature_apply(const CurvatureField& r, const OneForm& a, const OneForm& b, const OneForm& c) {
  const std::size_t n = r.dim();
  OneForm out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j].is_zero()) continue;
      const Expr ab = a[i] * b[j];
      for (std::size_t k = 0; k < n; ++k) {
        if (c[k].is_zero()) continue;
        const Expr abc = ab * c[k];
        for (std::size_t m = 0; m < n; ++m) out[m] += abc * r(i, j, k, m);
      }
    }
  }
  return out;
}

RicciField ricci(const CurvatureField& r, const Cometric& g, const CovariantMetric& gl) {
  const std::size_t n = r.dim();
  RicciField ric{SquareField(n)};
  for (std::size_t p = 0; p < n; ++p) {
    // v_m = sum_{ij} g~_{ij} R(dx^p, dx^i) dx^j |_m
    std::vector<Expr> v(n);
    for (std::size_t m = 0; m < n; ++m) {
      Expr s;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (gl(i, j).is_zero()) continue;
          s += gl(i, j) * r(p, i, j, m);
        }
      }
      v[m] = s;
    }
    for (std::size_t q = 0; q < n; ++q) {
      Expr s;
      for (std::size_t m = 0; m < n; ++m) s += v[m] * g(m, q);
      ric.m(p, q) = s;
    }
  }
  return ric;
}

Expr scalar_curvature(const RicciField& ric, const CovariantMetric& gl) {
  Expr s;
  for (std::size_t i = 0; i < gl.dim(); ++i) {
    for (std::size_t j = 0; j < gl.dim(); ++j) s += gl(i, j) * ric(i, j);
  }
  return s;
}

RicciField ricci_with_coframe(const CurvatureField& r, const Cometric& g, std::span<const OneForm> coframe) {
  const std::size_t n = r.dim();
  RicciField ric{SquareField(n)};
  for (std::size_t p = 0; p < n; ++p) {
    const OneForm w = OneForm::basis(n, p);
    OneForm acc(n);
    for (const OneForm& theta : coframe) acc = acc + curvature_apply(r, w, theta, theta);
    for (std::size_t q = 0; q < n; ++q) ric.m(p, q) = pair_g(g, acc, OneForm::basis(n, q));
  }
  return ric;
}

OneForm second_derivative(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e,
                          const OneForm& target) {
  return d_form(gamma, pi, w, d_form(gamma, pi, e, target)) - d_form(gamma, pi, d_form(gamma, pi, w, e), target);
}

Expr second_derivative_scalar(const Christoffel& gamma, const BivectorField& pi, const OneForm& w, const OneForm& e,
                              const Expr& f) {
  return d_scalar(pi, d_scalar(pi, f, e), w) - d_scalar(pi, f, d_form(gamma, pi, w, e));
}

OneForm laplacian_form(const Christoffel& gamma, const BivectorField& pi, const CovariantMetric& gl,
                       const OneForm& target) {
  const std::size_t n = gamma.dim();
  OneForm acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (gl(i, j).is_zero()) continue;
      acc = acc + gl(i, j) * second_derivative(gamma, pi, OneForm::basis(n, i), OneForm::basis(n, j), target);
    }
  }
  return Expr(-1.0) * acc;
}

Expr laplacian_scalar(const Christoffel& gamma, const BivectorField& pi, const CovariantMetric& gl, const Expr& f) {
  const std::size_t n = gamma.dim();
  Expr acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (gl(i, j).is_zero()) continue;
      acc += gl(i, j) * second_derivative_scalar(gamma, pi, OneForm::basis(n, i), OneForm::basis(n, j), f);
    }
  }
  return -acc;
}

OneForm j_endo(const CovariantMetric& gl, const BivectorField& pi, const OneForm& w) {
  const std::size_t n = gl.dim();
  // p_j = Pi(w, dx^j)
  std::vector<Expr> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    Expr s;
    for (std::size_t i = 0; i < n; ++i) s += pi(i, j) * w[i];
    p[j] = s;
  }
  OneForm r(n);
  for (std::size_t k = 0; k < n; ++k) {
    Expr s;
    for (std::size_t j = 0; j < n; ++j) s += gl(k, j) * p[j];
    r[k] = s;
  }
  return r;
}

double dpi_residual(const Christoffel& gamma, const BivectorField& pi, const SamplePlan& plan) {
  return parallel_residual(gamma, pi, pi.m, plan);
}

double dj_residual(const Christoffel& gamma, const Cometric& /*g*/, const CovariantMetric& gl, const BivectorField& pi,
                   const SamplePlan& plan) {
  const std::size_t n = gamma.dim();
  std::vector<Expr> res;
  for (std::size_t i = 0; i < n; ++i) {
    const OneForm w = OneForm::basis(n, i);
    for (std::size_t j = 0; j < n; ++j) {
      const OneForm e = OneForm::basis(n, j);
      const OneForm diffs = d_form(gamma, pi, w, j_endo(gl, pi, e)) - j_endo(gl, pi, d_form(gamma, pi, w, e));
      res.insert(res.end(), diffs.c.begin(), diffs.c.end());
    }
  }
  return max_abs(plan, res);
}

double parallel_residual(const Christoffel& gamma, const BivectorField& pi, const OneForm& target,
                         const SamplePlan& plan) {
  const std::size_t n = gamma.dim();
  std::vector<Expr> res;
  for (std::size_t i = 0; i < n; ++i) {
    const OneForm t = d_form(gamma, pi, OneForm::basis(n, i), target);
    res.insert(res.end(), t.c.begin(), t.c.end());
  }
  return max_abs(plan, res);
}

Expr d_norm_squared(const Geometry& geo, const OneForm& eta) {
  const std::size_t n = geo.dim();
  std::vector<OneForm> deta;
  for (std::size_t i = 0; i < n; ++i) deta.push_back(d_form(geo.gamma, geo.pi, OneForm::basis(n, i), eta));
  Expr s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (geo.gl(i, j).is_zero()) continue;
      s += geo.gl(i, j) * pair_g(geo.g, deta[i], deta[j]);
    }
  }
  return s;
}

GeometryVerdict assess(const Geometry& geo, const SamplePlan& plan, double tol) {
  GeometryVerdict v;
  v.torsion_res = torsion_residual(geo.gamma, geo.pi, plan);
  v.metric_res = metric_residual(geo.gamma, geo.g, geo.pi, plan);
  v.dpi_res = dpi_residual(geo.gamma, geo.pi, plan);
  v.dj_res = dj_residual(geo.gamma, geo.g, geo.gl, geo.pi, plan);
  v.is_riemannian_poisson = v.dpi_res < tol;
  return v;
}

WeitzenbockResiduals weitzenbock_residuals(const Geometry& geo, const OneForm& eta, const SamplePlan& plan,
                                           double tol) {
  WeitzenbockResiduals out;
  const Expr norm2 = pair_g(geo.g, eta, eta);
  const Expr lap_norm = laplacian_scalar(geo.gamma, geo.pi, geo.gl, Expr(-0.5) * norm2);
  const Expr dnorm = d_norm_squared(geo, eta);
  const Expr lap_eta_eta = pair_g(geo.g, laplacian_form(geo.gamma, geo.pi, geo.gl, eta), eta);
  const Expr e310 = lap_norm - (dnorm - lap_eta_eta);
  out.eq310 = max_abs(plan, std::span<const Expr>(&e310, 1));

  const SymTensor2 lie = lie_derivative_t2(geo.pi, eta, as_tensor(geo.g));
  out.killing_gate = max_abs(plan, lie.m.flat());
  const OneForm geodesic = d_form(geo.gamma, geo.pi, eta, eta);
  out.geodesic_gate = max_abs(plan, geodesic.c);
  out.poisson_gate = std::max(jacobiator_residual(geo.pi, plan), dpi_residual(geo.gamma, geo.pi, plan));
  if (out.killing_gate >= tol || out.geodesic_gate >= tol) return out;

  const RicciField ric = ricci(curvature(geo.gamma, geo.pi), geo.g, geo.gl);
  const Expr ric_eta = contract(ric.m, eta, eta);
  const std::vector<Expr> gated{lap_eta_eta - ric_eta, lap_norm - (dnorm - ric_eta)};
  const ValueTable t = sample(plan, gated);
  double r317 = 0.0;
  double r318 = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    r317 = std::max(r317, std::abs(t(r, 0)));
    r318 = std::max(r318, std::abs(t(r, 1)));
  }
  out.eq317 = r317;
  out.eq318 = r318;
  return out;
}

}  // namespace pg
