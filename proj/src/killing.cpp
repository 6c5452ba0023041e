#include "pg/killing.hpp"

#include <algorithm>
#include <cmath>

namespace pg {

Verdict classify(double residual, double tol) {
  if (!std::isfinite(residual)) return Verdict::Fail;
  if (residual < tol) return Verdict::Pass;
  if (residual <= 10.0 * tol) return Verdict::Indeterminate;
  return Verdict::Fail;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
    case Verdict::Skipped: return "skipped";
  }
  return "fail";
}

std::vector<OneForm> polarization_set(std::size_t dim) {
  std::vector<OneForm> set;
  for (std::size_t i = 0; i < dim; ++i) set.push_back(OneForm::basis(dim, i));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) set.push_back(OneForm::basis(dim, i) + OneForm::basis(dim, j));
  }
  return set;
}

namespace {

// D_{dx^i} eta for every i.
std::vector<OneForm> basis_derivatives(const Geometry& geo, const OneForm& eta) {
  std::vector<OneForm> out;
  for (std::size_t i = 0; i < geo.dim(); ++i) out.push_back(d_form(geo.gamma, geo.pi, OneForm::basis(geo.dim(), i), eta));
  return out;
}

OneForm combine(std::span<const OneForm> per_basis, const OneForm& alpha) {
  OneForm r(alpha.dim());
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    if (alpha[i].is_zero()) continue;
    r = r + alpha[i] * per_basis[i];
  }
  return r;
}

Expr basis_pair(const Cometric& g, const OneForm& a, std::size_t j) { return pair_g(g, a, OneForm::basis(g.dim(), j)); }

double max_abs_range(const ValueTable& t, std::size_t first, std::size_t count) {
  double m = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = first; c < first + count; ++c) m = std::max(m, std::abs(t(r, c)));
  }
  return m;
}

}  // namespace

KillingReport killing_residual(const Geometry& geo, const OneForm& eta, const SamplePlan& plan, double tol) {
  const SymTensor2 lie = lie_derivative_t2(geo.pi, eta, as_tensor(geo.g));
  const std::vector<OneForm> deta = basis_derivatives(geo, eta);
  std::vector<Expr> exprs(lie.m.flat().begin(), lie.m.flat().end());
  const std::size_t nlie = exprs.size();
  for (const OneForm& alpha : polarization_set(geo.dim())) exprs.push_back(pair_g(geo.g, combine(deta, alpha), alpha));
  const ValueTable t = sample(plan, exprs);
  KillingReport r;
  r.lie_res = max_abs_range(t, 0, nlie);
  r.pairing_res = max_abs_range(t, nlie, exprs.size() - nlie);
  r.lie = classify(r.lie_res, tol);
  r.pairing = classify(r.pairing_res, tol);
  r.verdict = r.lie == Verdict::Pass && r.pairing == Verdict::Pass;
  return r;
}

Expr lie_connection_bridge(const Geometry& geo, const OneForm& eta, const OneForm& alpha, const OneForm& beta) {
  const Expr lie = lie_derivative_t2_direct(geo.pi, eta, as_tensor(geo.g), alpha, beta);
  return lie - pair_g(geo.g, d_form(geo.gamma, geo.pi, alpha, eta), beta) -
         pair_g(geo.g, alpha, d_form(geo.gamma, geo.pi, beta, eta));
}

namespace {

struct RouteParts {
  std::vector<OneForm> deta;     // D_i eta
  std::vector<OneForm> ddeta;    // D_i D_eta eta
  std::vector<OneForm> r_eta;    // R(dx^i, eta) eta
  std::vector<Expr> raw43;       // characterization (4.3) on the polarization set
  SquareField raw46;             // characterization (4.6) on basis pairs
};

RouteParts route_parts(const Geometry& geo, const OneForm& eta) {
  const std::size_t n = geo.dim();
  RouteParts p;
  p.deta = basis_derivatives(geo, eta);
  const OneForm geodesic = d_form(geo.gamma, geo.pi, eta, eta);
  p.ddeta = basis_derivatives(geo, geodesic);
  const CurvatureField r = curvature(geo.gamma, geo.pi);
  for (std::size_t i = 0; i < n; ++i) p.r_eta.push_back(curvature_apply(r, OneForm::basis(n, i), eta, eta));

  for (const OneForm& alpha : polarization_set(n)) {
    const OneForm da = combine(p.deta, alpha);
    p.raw43.push_back(pair_g(geo.g, combine(p.r_eta, alpha), alpha) - pair_g(geo.g, da, da) -
                      pair_g(geo.g, combine(p.ddeta, alpha), alpha));
  }
  p.raw46 = SquareField(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Expr two_r = basis_pair(geo.g, p.r_eta[i], j) + basis_pair(geo.g, p.r_eta[j], i);
      const Expr v = two_r - Expr(2.0) * pair_g(geo.g, p.deta[i], p.deta[j]) - basis_pair(geo.g, p.ddeta[i], j) -
                     basis_pair(geo.g, p.ddeta[j], i);
      p.raw46(i, j) = v;
      p.raw46(j, i) = v;
    }
  }
  return p;
}

TwoKillingRoutes routes_from(const Geometry& geo, const OneForm& eta, const RouteParts& p) {
  const std::size_t n = geo.dim();
  TwoKillingRoutes out;
  const SymTensor2 lie = lie_derivative_t2(geo.pi, eta, as_tensor(geo.g));
  out.iterated = lie_derivative_t2(geo.pi, eta, lie).m;

  out.prop41 = SquareField(n);
  std::vector<OneForm> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const OneForm dxi = OneForm::basis(n, i);
    a[i] = d_form(geo.gamma, geo.pi, eta, p.deta[i]) - d_form(geo.gamma, geo.pi, koszul_bracket(geo.pi, eta, dxi), eta);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Expr v = basis_pair(geo.g, a[i], j) + basis_pair(geo.g, a[j], i) +
                     Expr(2.0) * pair_g(geo.g, p.deta[i], p.deta[j]);
      out.prop41(i, j) = v;
      out.prop41(j, i) = v;
    }
  }

  // Polarization: q(dx^i) = M_ii, q(dx^i + dx^j) = M_ii + 2 M_ij + M_jj.
  out.char43 = SquareField(n);
  for (std::size_t i = 0; i < n; ++i) out.char43(i, i) = Expr(-2.0) * p.raw43[i];
  std::size_t k = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const Expr q = Expr(-2.0) * p.raw43[k];
      const Expr v = Expr(0.5) * (q - out.char43(i, i) - out.char43(j, j));
      out.char43(i, j) = v;
      out.char43(j, i) = v;
    }
  }

  out.char46 = SquareField(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.char46(i, j) = -p.raw46(i, j);
  }
  return out;
}

}  // namespace

TwoKillingRoutes two_killing_routes(const Geometry& geo, const OneForm& eta) {
  return routes_from(geo, eta, route_parts(geo, eta));
}

TwoKillingReport two_killing_residual(const Geometry& geo, const OneForm& eta, const SamplePlan& plan, double tol) {
  const RouteParts parts = route_parts(geo, eta);
  const TwoKillingRoutes routes = routes_from(geo, eta, parts);
  const std::size_t nn = geo.dim() * geo.dim();

  std::vector<Expr> exprs;
  for (const SquareField* m : {&routes.iterated, &routes.prop41, &routes.char43, &routes.char46}) {
    exprs.insert(exprs.end(), m->flat().begin(), m->flat().end());
  }
  exprs.insert(exprs.end(), parts.raw43.begin(), parts.raw43.end());
  const ValueTable t = sample(plan, exprs);

  TwoKillingReport r;
  r.jacobiator = jacobiator_residual(geo.pi, plan);
  r.curvature_routes_applicable = r.jacobiator < tol;
  const std::size_t routes_used = r.curvature_routes_applicable ? 4 : 2;
  r.iterated_res = max_abs_range(t, 0, nn);
  r.prop41_res = max_abs_range(t, nn, nn);
  r.char43_res = max_abs_range(t, 4 * nn, parts.raw43.size());
  r.char46_res = max_abs_range(t, 3 * nn, nn);
  for (std::size_t row = 0; row < t.rows; ++row) {
    for (std::size_t a = 0; a < routes_used; ++a) {
      for (std::size_t b = a + 1; b < routes_used; ++b) {
        for (std::size_t c = 0; c < nn; ++c) {
          r.route_gap = std::max(r.route_gap, std::abs(t(row, a * nn + c) - t(row, b * nn + c)));
        }
      }
    }
  }
  r.iterated = classify(r.iterated_res, tol);
  r.prop41 = classify(r.prop41_res, tol);
  r.char43 = r.curvature_routes_applicable ? classify(r.char43_res, tol) : Verdict::Skipped;
  r.char46 = r.curvature_routes_applicable ? classify(r.char46_res, tol) : Verdict::Skipped;
  auto ok = [](Verdict v) { return v == Verdict::Pass || v == Verdict::Skipped; };
  r.verdict = r.iterated == Verdict::Pass && r.prop41 == Verdict::Pass && ok(r.char43) && ok(r.char46);
  return r;
}

namespace {

void require_plane(const Expr& pi12, const OneForm* eta) {
  if (max_variable(pi12) > 1) throw GeometryError("Pi^{12} must depend on the two plane coordinates only");
  if (eta && eta->dim() != 2) throw GeometryError("1-form on the plane must have two components");
}

}  // namespace

Christoffel r2_christoffel(const Expr& pi12) {
  require_plane(pi12, nullptr);
  const Expr p1 = diff(pi12, 0);
  const Expr p2 = diff(pi12, 1);
  Christoffel gamma(2);
  gamma(0, 0, 1) = p1;
  gamma(1, 0, 0) = -p1;
  gamma(0, 1, 1) = p2;
  gamma(1, 1, 0) = -p2;
  return gamma;
}

TTerms t_terms(const Expr& pi12, const OneForm& eta) {
  require_plane(pi12, &eta);
  const Expr& p = pi12;
  const Expr p1 = diff(p, 0);
  const Expr p2 = diff(p, 1);
  const Expr& e1 = eta[0];
  const Expr& e2 = eta[1];
  const Expr e1_1 = diff(e1, 0), e1_2 = diff(e1, 1);
  const Expr e2_1 = diff(e2, 0), e2_2 = diff(e2, 1);
  TTerms t;
  t.t1 = p * e1_2 + e2 * p1;
  t.t2 = p * e2_2 - e1 * p1;
  t.t3 = p * e1_1 - e2 * p2;
  t.t4 = p * e2_1 + e1 * p2;
  t.t5 = e1 * p * e1_2 - e2 * p * e1_1 + e1 * e2 * p1 + e2 * e2 * p2;
  t.t6 = e2 * p * e2_1 - e1 * p * e2_2 + e1 * e2 * p2 + e1 * e1 * p1;
  return t;
}

Geometry flat_plane(const Chart& chart, const Expr& pi12, const SamplePlan& plan) {
  if (chart.dim() != 2) throw GeometryError("the plane checks need a 2-dimensional chart");
  require_plane(pi12, nullptr);
  BivectorField pi = BivectorField::zero(2);
  pi.set_upper(0, 1, pi12);
  return make_geometry(chart, Cometric{SquareField::identity(2)}, std::move(pi), plan);
}

Thm48Residuals thm48_identity_residual(const Chart& chart, const Expr& pi12, const OneForm& eta,
                                       const SamplePlan& plan, double tol) {
  const Geometry geo = flat_plane(chart, pi12, plan);
  const TTerms t = t_terms(pi12, eta);
  const OneForm dx1 = OneForm::basis(2, 0);
  const OneForm dx2 = OneForm::basis(2, 1);

  const OneForm d1 = d_form(geo.gamma, geo.pi, dx1, eta);
  const OneForm d2 = d_form(geo.gamma, geo.pi, dx2, eta);
  const OneForm geodesic = d_form(geo.gamma, geo.pi, eta, eta);
  const OneForm dd1 = d_form(geo.gamma, geo.pi, dx1, geodesic);
  const OneForm dd2 = d_form(geo.gamma, geo.pi, dx2, geodesic);
  const CurvatureField r = curvature(geo.gamma, geo.pi);
  const Expr two_r =
      pair_g(geo.g, curvature_apply(r, dx1, eta, eta), dx2) + pair_g(geo.g, curvature_apply(r, dx2, eta, eta), dx1);

  const Expr t_rhs = Expr(2.0) * (t.t1 * t.t3 + t.t2 * t.t4) + diff(t.t5 * pi12, 0) + diff(t.t6 * pi12, 1);
  const Expr chain_lhs = Expr(2.0) * pair_g(geo.g, d1, d2) + pair_g(geo.g, dd1, dx2) + pair_g(geo.g, dd2, dx1);

  std::vector<Expr> exprs{chain_lhs + t_rhs, two_r + t_rhs};
  const std::vector<Expr> forms{d1[0] - t.t1, d1[1] - t.t2, d2[0] + t.t3, d2[1] + t.t4,
                                geodesic[0] - t.t5, geodesic[1] + t.t6};
  exprs.insert(exprs.end(), forms.begin(), forms.end());
  exprs.push_back(pair_g(geo.g, d1, d2) + t.t1 * t.t3 + t.t2 * t.t4);
  const ValueTable vt = sample(plan, exprs);

  Thm48Residuals out;
  out.chain = max_abs_range(vt, 0, 1);
  out.displayed_ungated = max_abs_range(vt, 1, 1);
  out.t_forms = max_abs_range(vt, 2, forms.size());
  out.t_pairing = max_abs_range(vt, 2 + forms.size(), 1);
  out.two_killing = two_killing_residual(geo, eta, plan, tol);
  if (out.two_killing.verdict) out.displayed = out.displayed_ungated;
  return out;
}

}  // namespace pg
