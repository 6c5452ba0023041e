#include "pg/warped.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pg {

namespace {

SamplePlan project(const SamplePlan& plan, std::size_t first, std::size_t n, std::vector<std::string> names) {
  SamplePlan out{plan.seed, plan.count, {}, std::move(names)};
  out.points.reserve(plan.points.size());
  for (const auto& p : plan.points) out.points.emplace_back(p.begin() + first, p.begin() + first + n);
  return out;
}

SquareField block_diag(const SquareField& a, const SquareField& b, const Expr& scale_b) {
  const std::size_t n1 = a.dim();
  const std::size_t n2 = b.dim();
  SquareField m(n1 + n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) m(n1 + i, n1 + j) = scale_b * b(i, j);
  return m;
}

std::vector<int> offset_map(std::size_t n, std::size_t offset) {
  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), static_cast<int>(offset));
  return map;
}

SquareField remap_field(const SquareField& m, std::span<const int> map) {
  SquareField r(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) r(i, j) = remap(m(i, j), map);
  return r;
}

double column_max(const ValueTable& t, std::size_t first, std::size_t count) {
  double m = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r)
    for (std::size_t c = first; c < first + count; ++c) m = std::max(m, std::abs(t(r, c)));
  return m;
}

}  // namespace

Chart product_chart(const WarpedSpec& spec) {
  Chart c = spec.base.chart;
  c.coords.insert(c.coords.end(), spec.fiber.chart.coords.begin(), spec.fiber.chart.coords.end());
  c.domain.insert(c.domain.end(), spec.fiber.chart.domain.begin(), spec.fiber.chart.domain.end());
  return c;
}

ProductGeometry build_warped(const WarpedSpec& spec, const SamplePlan& plan) {
  spec.base.chart.validate();
  spec.fiber.chart.validate();
  const std::size_t n1 = spec.base.chart.dim();
  const std::size_t n2 = spec.fiber.chart.dim();
  std::set<std::string> seen(spec.base.chart.coords.begin(), spec.base.chart.coords.end());
  for (const auto& name : spec.fiber.chart.coords) {
    if (seen.count(name)) throw GeometryError("coordinate '" + name + "' appears in both factors");
  }
  if (max_variable(spec.f) >= static_cast<int>(n1)) throw GeometryError("warping function must depend on base coordinates only");
  const Chart chart = product_chart(spec);
  if (plan.points.empty() || plan.points.front().size() != n1 + n2) {
    throw GeometryError("sample plan does not match the product chart");
  }

  SamplePlan base_plan = project(plan, 0, n1, spec.base.chart.coords);
  SamplePlan fiber_plan = project(plan, n1, n2, spec.fiber.chart.coords);
  const ValueTable fv = sample(base_plan, std::span<const Expr>(&spec.f, 1));
  for (std::size_t r = 0; r < fv.rows; ++r) {
    if (!(fv(r, 0) > 0.0)) {
      throw GeometryError("warping function is not positive at point " + format_point(base_plan.points[r]));
    }
  }

  Geometry base = make_geometry(spec.base.chart, spec.base.g, spec.base.pi, base_plan);
  Geometry fiber = make_geometry(spec.fiber.chart, spec.fiber.g, spec.fiber.pi, fiber_plan);

  const std::vector<int> map = offset_map(n2, n1);
  const Expr inv_f2 = Expr(1.0) / pow(spec.f, 2);
  Cometric g{block_diag(spec.base.g.m, remap_field(spec.fiber.g.m, map), inv_f2)};
  BivectorField pi{block_diag(spec.base.pi.m, remap_field(spec.fiber.pi.m, map), Expr(1.0))};
  Geometry product = make_geometry(chart, std::move(g), std::move(pi), plan);
  return ProductGeometry{std::move(product), std::move(base), std::move(fiber), spec.f, std::move(base_plan),
                         std::move(fiber_plan)};
}

Expr lift(const ProductGeometry& pg, Side side, const Expr& e) {
  if (side == Side::Base) return e;
  const std::vector<int> map = offset_map(pg.n2(), pg.n1());
  return remap(e, map);
}

OneForm lift_form(const ProductGeometry& pg, Side side, const OneForm& w) {
  const std::size_t n1 = pg.n1();
  OneForm r(n1 + pg.n2());
  if (side == Side::Base) {
    if (w.dim() != n1) throw GeometryError("base form has the wrong number of components");
    for (std::size_t i = 0; i < n1; ++i) r[i] = w[i];
  } else {
    if (w.dim() != pg.n2()) throw GeometryError("fiber form has the wrong number of components");
    for (std::size_t i = 0; i < pg.n2(); ++i) r[n1 + i] = lift(pg, Side::Fiber, w[i]);
  }
  return r;
}

OneForm base_j_df(const ProductGeometry& pg) { return j_endo(pg.base.gl, pg.base.pi, d(pg.f, pg.n1())); }

Expr warp_k(const ProductGeometry& pg, const OneForm& eta1) {
  return pair_g(pg.base.g, base_j_df(pg), eta1) / pow(pg.f, 3);
}

namespace {

// Factor-level building blocks shared by the closed forms. Base expressions
// already live in product coordinates; fiber ones go through V().
struct Warp {
  const ProductGeometry& pg;
  OneForm eta1;
  OneForm eta2;
  OneForm jdf;
  Expr f;

  Warp(const ProductGeometry& p, OneForm e1, OneForm e2)
      : pg(p), eta1(std::move(e1)), eta2(std::move(e2)), jdf(base_j_df(p)), f(p.f) {}

  Expr V(const Expr& e) const { return lift(pg, Side::Fiber, e); }
  Expr inv(int n) const { return Expr(1.0) / pow(f, n); }
  Expr K(const OneForm& w1) const { return pair_g(pg.base.g, jdf, w1); }
  Expr g1(const OneForm& a, const OneForm& b) const { return pair_g(pg.base.g, a, b); }
  Expr g2(const OneForm& a, const OneForm& b) const { return pair_g(pg.fiber.g, a, b); }
  OneForm D1(const OneForm& w, const OneForm& e) const { return d_form(pg.base.gamma, pg.base.pi, w, e); }
  OneForm D2(const OneForm& w, const OneForm& e) const { return d_form(pg.fiber.gamma, pg.fiber.pi, w, e); }
  Expr D1f(const Expr& s) const { return d_scalar(pg.base.pi, s, eta1); }
  Expr D2f(const Expr& s) const { return d_scalar(pg.fiber.pi, s, eta2); }
  OneForm B1(const OneForm& a) const { return koszul_bracket(pg.base.pi, eta1, a); }
  OneForm B2(const OneForm& a) const { return koszul_bracket(pg.fiber.pi, eta2, a); }

  OneForm eta() const { return lift_form(pg, Side::Base, eta1) + lift_form(pg, Side::Fiber, eta2); }
};

// Base and fiber parts of a product form with constant components.
struct Split {
  OneForm a1;
  OneForm a2;
};

Split split(const ProductGeometry& pg, const OneForm& a) {
  Split s{OneForm(pg.n1()), OneForm(pg.n2())};
  for (std::size_t i = 0; i < pg.n1(); ++i) s.a1[i] = a[i];
  for (std::size_t i = 0; i < pg.n2(); ++i) s.a2[i] = a[pg.n1() + i];
  return s;
}

std::vector<OneForm> product_basis(const ProductGeometry& pg) {
  std::vector<OneForm> out;
  for (std::size_t i = 0; i < pg.product.dim(); ++i) out.push_back(OneForm::basis(pg.product.dim(), i));
  return out;
}

// P1 = g(D_eta D_a eta, b); `sign` is the coefficient of K(a1)|eta2|^2/f^4.
Expr p1(const Warp& w, const Split& a, const Split& b, double sign) {
  const OneForm& e1 = w.eta1;
  const OneForm& e2 = w.eta2;
  const Expr ke = w.K(e1);
  const Expr ka = w.K(a.a1);
  const Expr kb = w.K(b.a1);
  const Expr dfe = w.D1f(w.f);
  const Expr g2ae = w.V(w.g2(a.a2, e2));
  const Expr g2eb = w.V(w.g2(e2, b.a2));
  const Expr norm2 = w.V(w.g2(e2, e2));
  const OneForm da2 = w.D2(a.a2, e2);

  Expr s = w.g1(w.D1(e1, w.D1(a.a1, e1)), b.a1);
  s += w.inv(2) * w.V(w.g2(w.D2(e2, da2), b.a2));
  s -= w.g1(w.D1(e1, w.jdf), b.a1) * w.inv(3) * g2ae;
  s += ke * w.inv(3) * w.V(w.g2(da2 + w.D2(e2, a.a2), b.a2));
  s += ka * w.inv(3) * w.V(w.g2(w.D2(e2, e2), b.a2));
  const Expr bracket = Expr(sign) * ka * w.inv(4) * norm2 - ke * w.inv(4) * g2ae + Expr(3.0) * dfe * w.inv(4) * g2ae -
                       w.inv(3) * w.V(w.g2(da2, e2)) - w.inv(3) * w.V(w.D2f(w.g2(a.a2, e2)));
  s += bracket * kb;
  s += (ke * ke * w.inv(4) - dfe * ke * w.inv(4) + w.D1f(ke) * w.inv(3)) * w.V(w.g2(a.a2, b.a2));
  const Expr tail = w.D1f(ka) * w.inv(3) + w.K(w.D1(a.a1, e1)) * w.inv(3) + ka * ke * w.inv(4) - dfe * ka * w.inv(4) -
                    w.g1(w.jdf, w.jdf) * w.inv(6) * g2ae;
  s += tail * g2eb;
  return s;
}

// P3 = g(D_{[eta,a]} eta, b)
Expr p3(const Warp& w, const Split& a, const Split& b) {
  const OneForm& e1 = w.eta1;
  const OneForm& e2 = w.eta2;
  const OneForm br1 = w.B1(a.a1);
  const OneForm br2 = w.B2(a.a2);
  Expr s = w.g1(w.D1(br1, e1), b.a1);
  s += w.inv(2) * w.V(w.g2(w.D2(br2, e2), b.a2));
  s += w.K(e1) * w.inv(3) * w.V(w.g2(br2, b.a2));
  s += w.K(br1) * w.inv(3) * w.V(w.g2(e2, b.a2));
  s -= w.K(b.a1) * w.inv(3) * w.V(w.g2(e2, br2));
  return s;
}

// P5 = g(D_a eta, D_b eta)
Expr p5(const Warp& w, const Split& a, const Split& b) {
  const OneForm& e1 = w.eta1;
  const OneForm& e2 = w.eta2;
  const Expr ke = w.K(e1);
  const Expr ka = w.K(a.a1);
  const Expr kb = w.K(b.a1);
  const OneForm da1 = w.D1(a.a1, e1);
  const OneForm db1 = w.D1(b.a1, e1);
  const OneForm da2 = w.D2(a.a2, e2);
  const OneForm db2 = w.D2(b.a2, e2);
  const Expr g2ae = w.V(w.g2(a.a2, e2));
  const Expr g2be = w.V(w.g2(b.a2, e2));
  Expr s = w.g1(da1, db1);
  s += w.inv(2) * w.V(w.g2(da2, db2));
  s += ka * w.inv(3) * w.V(w.g2(db2, e2));
  s += kb * w.inv(3) * w.V(w.g2(da2, e2));
  s += w.g1(w.jdf, w.jdf) * w.inv(6) * g2ae * g2be;
  s += ka * kb * w.inv(4) * w.V(w.g2(e2, e2));
  s += ke * ke * w.inv(4) * w.V(w.g2(a.a2, b.a2));
  s += (ka * ke * w.inv(4) - w.K(da1) * w.inv(3)) * g2be;
  s += (kb * ke * w.inv(4) - w.K(db1) * w.inv(3)) * g2ae;
  s += ke * w.inv(3) * w.V(w.g2(da2, b.a2) + w.g2(db2, a.a2));
  return s;
}

Expr expanded(const Warp& w, const Split& a, const Split& b, double sign) {
  return p1(w, a, b, sign) + p1(w, b, a, sign) - p3(w, a, b) - p3(w, b, a) + Expr(2.0) * p5(w, a, b);
}

struct FactorLie {
  SymTensor2 l1, ll1, l2, ll2;
};

FactorLie factor_lie(const Warp& w) {
  FactorLie out;
  out.l1 = lie_derivative_t2(w.pg.base.pi, w.eta1, as_tensor(w.pg.base.g));
  out.ll1 = lie_derivative_t2(w.pg.base.pi, w.eta1, out.l1);
  out.l2 = lie_derivative_t2(w.pg.fiber.pi, w.eta2, as_tensor(w.pg.fiber.g));
  out.ll2 = lie_derivative_t2(w.pg.fiber.pi, w.eta2, out.l2);
  return out;
}

Expr stated45(const Warp& w, const FactorLie& fl, const Split& a, const Split& b) {
  const OneForm& e1 = w.eta1;
  const OneForm& e2 = w.eta2;
  const Expr ke = w.K(e1);
  const Expr ka = w.K(a.a1);
  const Expr kb = w.K(b.a1);
  const Expr dfe = w.D1f(w.f);
  Expr s = contract(fl.ll1.m, a.a1, b.a1);
  s += w.inv(2) * w.V(contract(fl.ll2.m, a.a2, b.a2));
  s += Expr(2.0) * (w.D1f(ke * w.inv(3)) + Expr(2.0) * ke * ke * w.inv(4)) * w.V(w.g2(a.a2, b.a2));
  s += Expr(2.0) * (dfe * kb * w.inv(4) + kb * ke * w.inv(4)) * w.V(w.g2(a.a2, e2));
  s += Expr(2.0) * (dfe * ka * w.inv(4) + ka * ke * w.inv(4)) * w.V(w.g2(b.a2, e2));
  s += Expr(4.0) * ke * w.inv(3) * w.V(contract(fl.l2.m, a.a2, b.a2));
  s += Expr(2.0) * ka * w.inv(3) * w.V(w.g2(e2, w.D2(b.a2, e2)));
  s += Expr(2.0) * kb * w.inv(3) * w.V(w.g2(e2, w.D2(a.a2, e2)));
  s += Expr(4.0) * ka * kb * w.inv(4) * w.V(w.g2(e2, e2));
  return s;
}

// Returns {closed form, correction part}.
std::pair<Expr, Expr> compact45(const Warp& w, const FactorLie& fl, const Split& a, const Split& b) {
  const Expr k = w.K(w.eta1) * w.inv(3);
  const Expr corr = Expr(4.0) * k * w.V(contract(fl.l2.m, a.a2, b.a2)) +
                    Expr(2.0) * w.D1f(k) * w.V(w.g2(a.a2, b.a2));
  return {contract(fl.ll1.m, a.a1, b.a1) + w.inv(2) * w.V(contract(fl.ll2.m, a.a2, b.a2)) + corr, corr};
}

}  // namespace

Prop22Residuals prop22_residual(const ProductGeometry& pg, const SamplePlan& plan) {
  const std::size_t n1 = pg.n1();
  const std::size_t n2 = pg.n2();
  const Warp w(pg, OneForm(n1), OneForm(n2));
  const Geometry& P = pg.product;
  std::vector<Expr> ri, rii, riii, corr;
  for (std::size_t a = 0; a < n1; ++a) {
    const OneForm wa = OneForm::basis(n1, a);
    for (std::size_t b = 0; b < n1; ++b) {
      const OneForm eb = OneForm::basis(n1, b);
      const OneForm lhs = d_form(P.gamma, P.pi, lift_form(pg, Side::Base, wa), lift_form(pg, Side::Base, eb));
      const OneForm rhs = lift_form(pg, Side::Base, w.D1(wa, eb));
      const OneForm diffs = lhs - rhs;
      ri.insert(ri.end(), diffs.c.begin(), diffs.c.end());
    }
  }
  const OneForm jdf_h = lift_form(pg, Side::Base, w.jdf);
  for (std::size_t a = 0; a < n2; ++a) {
    const OneForm wa = OneForm::basis(n2, a);
    for (std::size_t b = 0; b < n2; ++b) {
      const OneForm eb = OneForm::basis(n2, b);
      const OneForm lhs = d_form(P.gamma, P.pi, lift_form(pg, Side::Fiber, wa), lift_form(pg, Side::Fiber, eb));
      const OneForm extra = (w.inv(3) * w.V(w.g2(wa, eb))) * jdf_h;
      const OneForm rhs = lift_form(pg, Side::Fiber, w.D2(wa, eb)) - extra;
      const OneForm diffs = lhs - rhs;
      rii.insert(rii.end(), diffs.c.begin(), diffs.c.end());
      corr.insert(corr.end(), extra.c.begin(), extra.c.end());
    }
  }
  for (std::size_t a = 0; a < n1; ++a) {
    const OneForm wa = OneForm::basis(n1, a);
    const Expr coef = w.K(wa) / w.f;
    corr.push_back(coef);
    for (std::size_t b = 0; b < n2; ++b) {
      const OneForm eb = lift_form(pg, Side::Fiber, OneForm::basis(n2, b));
      const OneForm lhs = d_form(P.gamma, P.pi, lift_form(pg, Side::Base, wa), eb);
      const OneForm diffs = lhs - coef * eb;
      riii.insert(riii.end(), diffs.c.begin(), diffs.c.end());
    }
  }
  Prop22Residuals r;
  r.i = max_abs(plan, ri);
  r.ii = max_abs(plan, rii);
  r.iii = max_abs(plan, riii);
  r.correction = max_abs(plan, corr);
  return r;
}

Prop31Residuals prop31_residual(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                                const SamplePlan& plan) {
  const Warp w(pg, eta1, eta2);
  const FactorLie fl = factor_lie(w);
  const SymTensor2 general = lie_derivative_t2(pg.product.pi, w.eta(), as_tensor(pg.product.g));
  const Expr k = w.K(eta1) * w.inv(3);
  const auto basis = product_basis(pg);
  std::vector<Expr> good, literal, corr;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Split a = split(pg, basis[i]);
      const Split b = split(pg, basis[j]);
      const Expr blocks = contract(fl.l1.m, a.a1, b.a1) + w.inv(2) * w.V(contract(fl.l2.m, a.a2, b.a2));
      const Expr third = k * w.V(w.g2(a.a2, b.a2));
      good.push_back(general(i, j) - blocks - Expr(2.0) * third);
      literal.push_back(general(i, j) - blocks - third);
      corr.push_back(Expr(2.0) * third);
    }
  }
  Prop31Residuals r;
  r.corrected = max_abs(plan, good);
  r.literal = max_abs(plan, literal);
  r.correction = max_abs(plan, corr);
  return r;
}

CasimirGated prop32_check(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                          const SamplePlan& plan, double tol) {
  CasimirGated out;
  out.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (out.casimir_res >= tol) return out;
  const Warp w(pg, eta1, eta2);
  const FactorLie fl = factor_lie(w);
  const SymTensor2 general = lie_derivative_t2(pg.product.pi, w.eta(), as_tensor(pg.product.g));
  const auto basis = product_basis(pg);
  std::vector<Expr> res;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Split a = split(pg, basis[i]);
      const Split b = split(pg, basis[j]);
      res.push_back(general(i, j) - contract(fl.l1.m, a.a1, b.a1) - w.inv(2) * w.V(contract(fl.l2.m, a.a2, b.a2)));
    }
  }
  out.residual = max_abs(plan, res);
  return out;
}

namespace {

std::vector<Expr> prop34_terms(const ProductGeometry& pg, const Warp& w, bool with_k, std::vector<Expr>* corr) {
  const Geometry& P = pg.product;
  const OneForm eta = w.eta();
  const Expr k = w.K(w.eta1) * w.inv(3);
  std::vector<Expr> res;
  for (const OneForm& alpha : polarization_set(P.dim())) {
    const Split a = split(pg, alpha);
    const Expr general = pair_g(P.g, d_form(P.gamma, P.pi, alpha, eta), alpha);
    const Expr middle = k * w.V(w.g2(a.a2, a.a2));
    Expr closed = w.g1(w.D1(a.a1, w.eta1), a.a1) + w.inv(2) * w.V(w.g2(w.D2(a.a2, w.eta2), a.a2));
    if (with_k) closed += middle;
    res.push_back(general - closed);
    if (corr) corr->push_back(middle);
  }
  return res;
}

}  // namespace

Prop34Residuals prop34_residual(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                                const SamplePlan& plan) {
  const Warp w(pg, eta1, eta2);
  std::vector<Expr> corr;
  const std::vector<Expr> res = prop34_terms(pg, w, true, &corr);
  Prop34Residuals r;
  r.residual = max_abs(plan, res);
  r.correction = max_abs(plan, corr);
  return r;
}

CasimirGated prop35_check(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                          const SamplePlan& plan, double tol) {
  CasimirGated out;
  out.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (out.casimir_res >= tol) return out;
  const Warp w(pg, eta1, eta2);
  out.residual = max_abs(plan, prop34_terms(pg, w, false, nullptr));
  return out;
}

Prop45Residuals prop45_residual(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                                const SamplePlan& plan) {
  const Warp w(pg, eta1, eta2);
  const FactorLie fl = factor_lie(w);
  const Geometry& P = pg.product;
  const OneForm eta = w.eta();
  const SymTensor2 lie = lie_derivative_t2(P.pi, eta, as_tensor(P.g));
  const SymTensor2 general = lie_derivative_t2(P.pi, eta, lie);
  const auto basis = product_basis(pg);
  std::vector<OneForm> deta, brackets;
  for (const OneForm& a : basis) {
    deta.push_back(d_form(P.gamma, P.pi, a, eta));
    brackets.push_back(koszul_bracket(P.pi, eta, a));
  }

  // columns: expanded, literal, stated, compact, p1, p3, p5, correction
  std::vector<std::vector<Expr>> cols(8);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Split a = split(pg, basis[i]);
      const Split b = split(pg, basis[j]);
      const Expr p1_general = pair_g(P.g, d_form(P.gamma, P.pi, eta, deta[i]), basis[j]);
      const Expr p3_general = pair_g(P.g, d_form(P.gamma, P.pi, brackets[i], eta), basis[j]);
      const Expr p5_general = pair_g(P.g, deta[i], deta[j]);
      cols[4].push_back(p1_general - p1(w, a, b, -1.0));
      cols[5].push_back(p3_general - p3(w, a, b));
      cols[6].push_back(p5_general - p5(w, a, b));
      if (j < i) continue;
      cols[0].push_back(general(i, j) - expanded(w, a, b, -1.0));
      cols[1].push_back(general(i, j) - expanded(w, a, b, 1.0));
      cols[2].push_back(general(i, j) - stated45(w, fl, a, b));
      const auto [closed, corr] = compact45(w, fl, a, b);
      cols[3].push_back(general(i, j) - closed);
      cols[7].push_back(corr);
    }
  }
  std::vector<Expr> all;
  std::vector<std::size_t> offsets;
  for (const auto& c : cols) {
    offsets.push_back(all.size());
    all.insert(all.end(), c.begin(), c.end());
  }
  const ValueTable t = sample(plan, all);
  auto col = [&](std::size_t c) { return column_max(t, offsets[c], cols[c].size()); };
  Prop45Residuals r;
  r.expanded = col(0);
  r.expanded_literal = col(1);
  r.stated = col(2);
  r.compact = col(3);
  r.p1 = col(4);
  r.p3 = col(5);
  r.p5 = col(6);
  r.correction = col(7);
  return r;
}

CasimirGated prop46_check(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                          const SamplePlan& plan, double tol) {
  CasimirGated out;
  out.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (out.casimir_res >= tol) return out;
  const Warp w(pg, eta1, eta2);
  const FactorLie fl = factor_lie(w);
  const Geometry& P = pg.product;
  const OneForm eta = w.eta();
  const SymTensor2 general = lie_derivative_t2(P.pi, eta, lie_derivative_t2(P.pi, eta, as_tensor(P.g)));
  const auto basis = product_basis(pg);
  std::vector<Expr> res;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Split a = split(pg, basis[i]);
      const Split b = split(pg, basis[j]);
      res.push_back(general(i, j) - contract(fl.ll1.m, a.a1, b.a1) - w.inv(2) * w.V(contract(fl.ll2.m, a.a2, b.a2)));
    }
  }
  out.residual = max_abs(plan, res);
  return out;
}

namespace {

Biconditional finish(Biconditional b, double tol) {
  b.factor1 = b.factor1_res < tol;
  b.factor2 = b.factor2_res < tol;
  b.product = b.product_res < tol;
  b.holds = b.product == (b.factor1 && b.factor2);
  return b;
}

}  // namespace

Biconditional thm23_check(const ProductGeometry& pg, const SamplePlan& plan, double tol) {
  Biconditional b;
  b.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (b.casimir_res >= tol) {
    b.skipped = true;
    return b;
  }
  b.factor1_res = dpi_residual(pg.base.gamma, pg.base.pi, pg.base_plan);
  b.factor2_res = dpi_residual(pg.fiber.gamma, pg.fiber.pi, pg.fiber_plan);
  b.product_res = dpi_residual(pg.product.gamma, pg.product.pi, plan);
  return finish(b, tol);
}

Biconditional thm36_check(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                          const SamplePlan& plan, double tol) {
  Biconditional b;
  b.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (b.casimir_res >= tol) {
    b.skipped = true;
    return b;
  }
  const Warp w(pg, eta1, eta2);
  b.factor1_res = killing_residual(pg.base, eta1, pg.base_plan, tol).lie_res;
  b.factor2_res = killing_residual(pg.fiber, eta2, pg.fiber_plan, tol).lie_res;
  b.product_res = killing_residual(pg.product, w.eta(), plan, tol).lie_res;
  return finish(b, tol);
}

Biconditional thm47_check(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                          const SamplePlan& plan, double tol) {
  Biconditional b;
  b.casimir_res = casimir_residual(pg.base.pi, pg.f, pg.base_plan);
  if (b.casimir_res >= tol) {
    b.skipped = true;
    return b;
  }
  const Warp w(pg, eta1, eta2);
  auto iterated = [](const Geometry& geo, const OneForm& eta) {
    return lie_derivative_t2(geo.pi, eta, lie_derivative_t2(geo.pi, eta, as_tensor(geo.g)));
  };
  b.factor1_res = max_abs(pg.base_plan, iterated(pg.base, eta1).m.flat());
  b.factor2_res = max_abs(pg.fiber_plan, iterated(pg.fiber, eta2).m.flat());
  b.product_res = max_abs(plan, iterated(pg.product, w.eta()).m.flat());
  return finish(b, tol);
}

NormSplit norm_split_residual(const ProductGeometry& pg, const OneForm& eta1, const OneForm& eta2,
                              const SamplePlan& plan, double tol) {
  NormSplit out;
  if (casimir_residual(pg.base.pi, pg.f, pg.base_plan) >= tol) {
    out.skipped = true;
    out.reason = "warping function is not Casimir";
    return out;
  }
  if (!killing_residual(pg.base, eta1, pg.base_plan, tol).verdict ||
      !killing_residual(pg.fiber, eta2, pg.fiber_plan, tol).verdict) {
    out.skipped = true;
    out.reason = "factor forms are not Killing";
    return out;
  }
  const Warp w(pg, eta1, eta2);
  const Expr lhs = d_norm_squared(pg.product, w.eta());
  const Expr rhs = d_norm_squared(pg.base, eta1) + w.V(d_norm_squared(pg.fiber, eta2));
  const Expr diff_expr = lhs - rhs;
  out.residual = max_abs(plan, std::span<const Expr>(&diff_expr, 1));
  return out;
}

}  // namespace pg
