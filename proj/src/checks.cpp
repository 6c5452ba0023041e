#include "pg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pg/warped.hpp"

#ifndef PG_VERSION
#define PG_VERSION "0.0.0"
#endif

namespace pg {

std::string tool_version() { return PG_VERSION; }

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out(1);
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.emplace_back();
      continue;
    }
    out.back() += c;
  }
  return out;
}

namespace {

double max_of(std::initializer_list<double> xs) {
  double m = 0.0;
  for (double x : xs) {
    if (std::isnan(x)) return x;
    m = std::max(m, x);
  }
  return m;
}

class Runner {
 public:
  Runner(Report& rep, const RunOptions& opt) : rep_(rep), opt_(opt) {}

  /// Runs one check; domain errors turn into a failed check that names the point.
  void run(const std::string& name, double tol, const std::function<void(CheckResult&)>& body) {
    CheckResult c;
    c.name = name;
    c.tolerance = tol;
    c.samples = opt_.samples;
    c.seed = opt_.seed;
    try {
      body(c);
    } catch (const SampleError& e) {
      c.verdict = Verdict::Fail;
      c.note = std::string("domain error: ") + e.what();
      c.point = e.point();
    } catch (const std::exception& e) {
      c.verdict = Verdict::Fail;
      c.note = e.what();
    }
    rep_.checks.push_back(std::move(c));
  }

  void skipped(const std::string& name, double tol, const std::string& why) {
    run(name, tol, [&](CheckResult& c) {
      c.verdict = Verdict::Skipped;
      c.note = why;
    });
  }

  double tol() const { return opt_.tol; }
  const RunOptions& options() const { return opt_; }

 private:
  Report& rep_;
  const RunOptions& opt_;
};

class Selection {
 public:
  explicit Selection(const std::vector<std::string>& only) : only_(only) {}

  bool group(const std::string& g) const {
    if (only_.empty()) return true;
    return std::find(only_.begin(), only_.end(), g) != only_.end();
  }
  bool form(const std::string& kind, const std::string& name) const {
    if (only_.empty()) return true;
    return std::find(only_.begin(), only_.end(), kind + ":" + name) != only_.end();
  }

  /// Every entry must name a known group or a form the manifest has.
  void validate(const std::vector<std::pair<std::string, OneForm>>& forms, bool warp) const {
    for (const std::string& s : only_) {
      if (s == "poisson" || s == "connection" || s == "curvature") continue;
      if (s == "warped" && warp) continue;
      const auto colon = s.find(':');
      const std::string kind = s.substr(0, colon);
      if (colon != std::string::npos && (kind == "killing" || kind == "two-killing" || kind == "weitzenbock")) {
        const std::string name = s.substr(colon + 1);
        const bool known = std::any_of(forms.begin(), forms.end(), [&](const auto& f) { return f.first == name; });
        if (known) continue;
        throw SelectionError("selection '" + s + "': no form named '" + name + "'");
      }
      throw SelectionError("unknown selection '" + s + "'");
    }
  }

 private:
  std::vector<std::string> only_;
};

Report header(const std::string& hash, const RunOptions& opt) {
  Report r;
  r.version = tool_version();
  r.manifest_hash = hash;
  r.seed = opt.seed;
  r.samples = opt.samples;
  r.tolerance = opt.tol;
  return r;
}

bool constant_diagonal(const Cometric& g) {
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j)
      if (i == j ? !g(i, j).is_constant() : !g(i, j).is_zero()) return false;
  return true;
}

void poisson_checks(Runner& run, const BivectorField& pi, const std::vector<std::pair<std::string, Expr>>& scalars,
                    const SamplePlan& plan) {
  const double tol = run.tol();
  const std::size_t n = pi.dim();
  run.run("poisson.jacobiator", tol, [&](CheckResult& c) {
    const double j = jacobiator_residual(pi, plan);
    c.residuals = {{"jacobiator", j}};
    c.verdict = classify(j, tol);
  });
  run.run("poisson.anchor_morphism", tol, [&](CheckResult& c) {
    double res = 0.0;
    bool poisson = true;
    double jac = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const AnchorCheck a = anchor_morphism_residual(pi, OneForm::basis(n, i), OneForm::basis(n, j), plan, tol);
        res = std::max(res, a.residual);
        poisson = poisson && a.poisson;
        jac = a.jacobiator;
      }
    }
    c.residuals = {{"anchor", res}, {"jacobiator", jac}};
    if (poisson) {
      c.verdict = classify(res, tol);
    } else {
      c.verdict = Verdict::Skipped;
      c.note = "hypothesis not met: Pi fails the Jacobi identity; anchor residual is informational";
    }
  });
  for (const auto& [name, phi] : scalars) {
    run.run("poisson.hamiltonian:" + name, tol, [&](CheckResult& c) {
      const VectorField h = hamiltonian(pi, phi);
      const VectorField s = sharp(pi, d(phi, n));
      std::vector<Expr> sum(n);
      for (std::size_t i = 0; i < n; ++i) sum[i] = h[i] - kHamiltonianSign * s[i];
      const Expr self = apply(h, phi);
      const double self_res = max_abs(plan, std::span<const Expr>(&self, 1));
      const double sign_res = max_abs(plan, sum);
      c.residuals = {{"self", self_res}, {"sign", sign_res}, {"casimir", casimir_residual(pi, phi, plan)}};
      c.verdict = classify(max_of({self_res, sign_res}), tol);
      c.note = "casimir residual is informational";
    });
  }
}

void connection_checks(Runner& run, const Geometry& geo, const SamplePlan& plan) {
  const double tol = run.tol();
  run.run("connection.koszul_pairing", tol, [&](CheckResult& c) {
    const double r = koszul_pairing_residual(geo.g, geo.gl, geo.pi, geo.gamma, plan);
    c.residuals = {{"koszul", r}};
    c.verdict = classify(r, tol);
  });
  run.run("connection.torsion", tol, [&](CheckResult& c) {
    const double r = torsion_residual(geo.gamma, geo.pi, plan);
    c.residuals = {{"torsion", r}};
    c.verdict = classify(r, tol);
  });
  run.run("connection.metric", tol, [&](CheckResult& c) {
    const double r = metric_residual(geo.gamma, geo.g, geo.pi, plan);
    c.residuals = {{"metric", r}};
    c.verdict = classify(r, tol);
  });
  run.run("connection.dpi_implies_dj", tol, [&](CheckResult& c) {
    const double dpi = dpi_residual(geo.gamma, geo.pi, plan);
    const double dj = dj_residual(geo.gamma, geo.g, geo.gl, geo.pi, plan);
    c.residuals = {{"dpi", dpi}, {"dj", dj}};
    if (dpi < tol) {
      c.verdict = classify(dj, tol);
    } else {
      c.verdict = Verdict::Skipped;
      c.note = "hypothesis not met: D Pi != 0, not Riemannian Poisson";
    }
  });
}

void curvature_checks(Runner& run, const Geometry& geo, const SamplePlan& plan) {
  const double tol = run.tol();
  const std::size_t n = geo.dim();
  const CurvatureField r = curvature(geo.gamma, geo.pi);
  run.run("curvature.antisymmetry", tol, [&](CheckResult& c) {
    std::vector<Expr> sums;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t m = 0; m < n; ++m) sums.push_back(r(i, j, k, m) + r(j, i, k, m));
    const double res = max_abs(plan, sums);
    c.residuals = {{"antisymmetry", res}};
    c.verdict = classify(res, tol);
  });
  run.run("curvature.ricci_coframe", tol, [&](CheckResult& c) {
    if (!constant_diagonal(geo.g)) {
      c.verdict = Verdict::Skipped;
      c.note = "hypothesis not met: cometric is not constant diagonal";
      return;
    }
    std::vector<OneForm> frame;
    for (std::size_t i = 0; i < n; ++i) frame.push_back(Expr(1.0 / std::sqrt(geo.g(i, i).constant())) * OneForm::basis(n, i));
    const RicciField a = ricci(r, geo.g, geo.gl);
    const RicciField b = ricci_with_coframe(r, geo.g, frame);
    std::vector<Expr> diff;
    for (std::size_t k = 0; k < n * n; ++k) diff.push_back(a.m.flat()[k] - b.m.flat()[k]);
    const double res = max_abs(plan, diff);
    c.residuals = {{"ricci", res}};
    c.verdict = classify(res, tol);
  });
}

void form_checks(Runner& run, const Selection& sel, const Geometry& geo, const std::string& name, const OneForm& eta,
                 const SamplePlan& plan) {
  const double tol = run.tol();
  const std::size_t n = geo.dim();
  if (sel.form("killing", name)) {
    run.run("killing:" + name, tol, [&](CheckResult& c) {
      const KillingReport k = killing_residual(geo, eta, plan, tol);
      c.residuals = {{"lie", k.lie_res}, {"pairing", k.pairing_res}};
      c.verdict = worst({k.lie, k.pairing});
      if (k.lie != k.pairing) c.note = "Lie and pairing routes disagree";
    });
    run.run("bridge:" + name, tol, [&](CheckResult& c) {
      std::vector<Expr> res;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
          res.push_back(lie_connection_bridge(geo, eta, OneForm::basis(n, i), OneForm::basis(n, j)));
      const double r = max_abs(plan, res);
      c.residuals = {{"bridge", r}};
      c.verdict = classify(r, tol);
    });
  }
  if (sel.form("two-killing", name)) {
    run.run("two-killing:" + name, tol, [&](CheckResult& c) {
      const TwoKillingReport t = two_killing_residual(geo, eta, plan, tol);
      c.residuals = {{"iterated", t.iterated_res}, {"prop41", t.prop41_res}, {"char43", t.char43_res},
                     {"char46", t.char46_res},     {"route_gap", t.route_gap}, {"jacobiator", t.jacobiator}};
      c.verdict = worst({t.iterated, t.prop41, t.char43, t.char46});
      if (classify(t.route_gap, tol) == Verdict::Fail) {
        c.verdict = Verdict::Fail;
        c.note = "routes disagree";
      } else if (!t.curvature_routes_applicable) {
        c.note = "curvature routes skipped: Pi fails the Jacobi identity";
      }
    });
  }
  if (sel.form("weitzenbock", name)) {
    std::optional<WeitzenbockResiduals> w;
    std::string error;
    run.run("weitzenbock.eq310:" + name, tol, [&](CheckResult& c) {
      w = weitzenbock_residuals(geo, eta, plan, tol);
      c.residuals = {{"eq310", w->eq310}};
      c.verdict = classify(w->eq310, tol);
    });
    for (const char* which : {"eq317", "eq318"}) {
      const std::string id = std::string("weitzenbock.") + which + ":" + name;
      if (!w) {
        run.skipped(id, tol, "eq310 evaluation failed");
        continue;
      }
      run.run(id, tol, [&](CheckResult& c) {
        const std::optional<double>& v = std::string(which) == "eq317" ? w->eq317 : w->eq318;
        c.residuals = {{which, v.value_or(std::nan(""))},
                       {"killing_gate", w->killing_gate},
                       {"geodesic_gate", w->geodesic_gate},
                       {"poisson_gate", w->poisson_gate}};
        if (v) {
          c.verdict = classify(*v, tol);
        } else {
          c.verdict = Verdict::Skipped;
          c.note = "hypothesis not met: eta must be Killing with D_eta eta = 0";
        }
      });
    }
  }
}

/// Everything that only needs (chart, g, Pi) and the forms.
void geometry_checks(Runner& run, const Selection& sel, const Chart& chart, const Cometric& g, const BivectorField& pi,
                     const std::vector<std::pair<std::string, OneForm>>& forms,
                     const std::vector<std::pair<std::string, Expr>>& scalars, const SamplePlan& plan) {
  if (sel.group("poisson")) poisson_checks(run, pi, scalars, plan);

  const bool want_forms = std::any_of(forms.begin(), forms.end(), [&](const auto& f) {
    return sel.form("killing", f.first) || sel.form("two-killing", f.first) || sel.form("weitzenbock", f.first);
  });
  if (!sel.group("connection") && !sel.group("curvature") && !want_forms) return;

  std::optional<Geometry> geo;
  std::string why;
  try {
    geo = make_geometry(chart, g, pi, plan);
  } catch (const std::exception& e) {
    why = e.what();
  }
  if (!geo) {
    run.run("connection.build", run.tol(), [&](CheckResult& c) {
      c.verdict = Verdict::Fail;
      c.note = why;
    });
    return;
  }
  if (sel.group("connection")) connection_checks(run, *geo, plan);
  if (sel.group("curvature")) curvature_checks(run, *geo, plan);
  for (const auto& [name, eta] : forms) form_checks(run, sel, *geo, name, eta, plan);
}

bool wants(const std::vector<std::string>& verify, const std::string& what) {
  return verify.empty() || std::find(verify.begin(), verify.end(), what) != verify.end();
}

void biconditional(CheckResult& c, const Biconditional& b) {
  c.residuals = {{"casimir", b.casimir_res},
                 {"factor1", b.factor1_res},
                 {"factor2", b.factor2_res},
                 {"product", b.product_res}};
  if (b.skipped) {
    c.verdict = Verdict::Skipped;
    c.note = "hypothesis not met: f is not Casimir";
    return;
  }
  c.verdict = b.holds ? Verdict::Pass : Verdict::Fail;
  auto yn = [](bool v) { return v ? "yes" : "no"; };
  c.note = std::string("factor1 ") + yn(b.factor1) + ", factor2 " + yn(b.factor2) + ", product " + yn(b.product);
}

void casimir_gated(CheckResult& c, const CasimirGated& g, double tol) {
  c.residuals = {{"residual", g.residual.value_or(std::nan(""))}, {"casimir", g.casimir_res}};
  if (g.residual) {
    c.verdict = classify(*g.residual, tol);
  } else {
    c.verdict = Verdict::Skipped;
    c.note = "hypothesis not met: f is not Casimir";
  }
}

void warped_checks(Runner& run, const ProductGeometry& pg, const OneForm* eta1, const OneForm* eta2,
                   const std::vector<std::string>& verify, const SamplePlan& plan) {
  const double tol = run.tol();
  const double tol45 = run.options().prop45_tol;
  const bool etas = eta1 && eta2;
  const std::string need = "needs a base form eta1 and a fiber form eta2";

  if (wants(verify, "prop22")) {
    run.run("prop22", tol, [&](CheckResult& c) {
      const Prop22Residuals r = prop22_residual(pg, plan);
      c.residuals = {{"i", r.i}, {"ii", r.ii}, {"iii", r.iii}, {"correction", r.correction}};
      c.verdict = classify(max_of({r.i, r.ii, r.iii}), tol);
    });
  }
  if (wants(verify, "prop31")) {
    if (!etas) {
      run.skipped("prop31", tol, need);
    } else {
      run.run("prop31", tol, [&](CheckResult& c) {
        const Prop31Residuals r = prop31_residual(pg, *eta1, *eta2, plan);
        c.residuals = {{"corrected", r.corrected}, {"literal", r.literal}, {"correction", r.correction}};
        c.verdict = classify(r.corrected, tol);
        c.note = "literal: coefficient 1 on the k g2 term, informational";
      });
      run.run("prop32", tol, [&](CheckResult& c) { casimir_gated(c, prop32_check(pg, *eta1, *eta2, plan, tol), tol); });
    }
  }
  if (wants(verify, "prop34")) {
    if (!etas) {
      run.skipped("prop34", tol, need);
    } else {
      run.run("prop34", tol, [&](CheckResult& c) {
        const Prop34Residuals r = prop34_residual(pg, *eta1, *eta2, plan);
        c.residuals = {{"residual", r.residual}, {"correction", r.correction}};
        c.verdict = classify(r.residual, tol);
      });
      run.run("prop35", tol, [&](CheckResult& c) { casimir_gated(c, prop35_check(pg, *eta1, *eta2, plan, tol), tol); });
    }
  }
  if (wants(verify, "prop45")) {
    if (!etas) {
      run.skipped("prop45", tol45, need);
    } else {
      run.run("prop45", tol45, [&](CheckResult& c) {
        const Prop45Residuals r = prop45_residual(pg, *eta1, *eta2, plan);
        c.residuals = {{"expanded", r.expanded}, {"compact", r.compact},
                       {"p1", r.p1},             {"p3", r.p3},
                       {"p5", r.p5},             {"expanded_literal", r.expanded_literal},
                       {"stated", r.stated},     {"correction", r.correction}};
        c.verdict = classify(max_of({r.expanded, r.compact, r.p1, r.p3, r.p5}), tol45);
        c.note = "expanded_literal and stated keep +K(a1)|eta2|^2/f^4 in P1, informational";
      });
      run.run("prop46", tol45,
              [&](CheckResult& c) { casimir_gated(c, prop46_check(pg, *eta1, *eta2, plan, tol), tol45); });
    }
  }
  if (wants(verify, "thm23")) {
    run.run("thm23", tol, [&](CheckResult& c) { biconditional(c, thm23_check(pg, plan, tol)); });
  }
  for (const char* thm : {"thm36", "thm47"}) {
    if (!wants(verify, thm)) continue;
    if (!etas) {
      run.skipped(thm, tol, need);
      continue;
    }
    run.run(thm, tol, [&](CheckResult& c) {
      biconditional(c, std::string(thm) == "thm36" ? thm36_check(pg, *eta1, *eta2, plan, tol)
                                                   : thm47_check(pg, *eta1, *eta2, plan, tol));
    });
  }
  if (wants(verify, "eq322")) {
    if (!etas) {
      run.skipped("eq322", tol, need);
    } else {
      run.run("eq322", tol, [&](CheckResult& c) {
        const NormSplit s = norm_split_residual(pg, *eta1, *eta2, plan, tol);
        c.residuals = {{"residual", s.skipped ? std::nan("") : s.residual}};
        if (s.skipped) {
          c.verdict = Verdict::Skipped;
          c.note = "hypothesis not met: " + s.reason;
        } else {
          c.verdict = classify(s.residual, tol);
        }
      });
    }
  }
}

const OneForm* find_form(const Manifest& m, const std::string& name, const char* role) {
  if (name.empty()) return nullptr;
  const OneForm* w = m.form(name);
  if (!w) throw SelectionError(std::string(role) + " form '" + name + "' not found in " + m.origin);
  return w;
}

struct WarpBuild {
  WarpedSpec spec;
  SamplePlan plan;
  const OneForm* eta1 = nullptr;
  const OneForm* eta2 = nullptr;
};

WarpBuild prepare(const WarpInputs& in, const RunOptions& opt) {
  if (in.base.warp || in.fiber.warp) throw ManifestError("factor manifests must not be warp manifests");
  WarpBuild b;
  Expr f;
  try {
    f = parse(in.f, in.base.chart.coords);
  } catch (const ParseError& e) {
    throw ManifestError("warping function: " + std::string(e.what()) + " in \"" + in.f + "\"");
  }
  b.spec = WarpedSpec{Factor{in.base.chart, in.base.g, in.base.pi}, Factor{in.fiber.chart, in.fiber.g, in.fiber.pi}, f};
  b.eta1 = find_form(in.base, in.eta1, "base");
  b.eta2 = find_form(in.fiber, in.eta2, "fiber");
  b.plan = sample_plan(product_chart(b.spec), opt.seed, opt.samples);
  return b;
}

void run_warped_into(Runner& run, const WarpInputs& in, const WarpBuild& b, bool product_groups, const Selection& sel) {
  std::optional<ProductGeometry> pg;
  std::string why;
  try {
    pg = build_warped(b.spec, b.plan);
  } catch (const std::exception& e) {
    why = e.what();
  }
  if (!pg) {
    run.run("warped.build", run.tol(), [&](CheckResult& c) {
      c.verdict = Verdict::Fail;
      c.note = why;
    });
    return;
  }
  if (product_groups) {
    std::vector<std::pair<std::string, OneForm>> forms;
    if (b.eta1 && b.eta2) {
      forms.emplace_back("eta", lift_form(*pg, Side::Base, *b.eta1) + lift_form(*pg, Side::Fiber, *b.eta2));
    }
    if (sel.group("poisson")) poisson_checks(run, pg->product.pi, {}, b.plan);
    if (sel.group("connection")) connection_checks(run, pg->product, b.plan);
    if (sel.group("curvature")) curvature_checks(run, pg->product, b.plan);
    for (const auto& [name, eta] : forms) form_checks(run, sel, pg->product, name, eta, b.plan);
    if (!sel.group("warped")) return;
  }
  warped_checks(run, *pg, b.eta1, b.eta2, in.verify, b.plan);
}

}  // namespace

WarpInputs warp_inputs(const Manifest& m) {
  if (!m.warp) throw ManifestError(m.origin + ": no warp section");
  WarpInputs in;
  in.base = load_manifest(m.warp->base);
  in.fiber = load_manifest(m.warp->fiber);
  in.f = m.warp->f;
  in.eta1 = m.warp->eta1;
  in.eta2 = m.warp->eta2;
  in.hash = content_hash(m.hash + in.base.hash + in.fiber.hash);
  return in;
}

Report run_checks(const Manifest& m, const RunOptions& opt) {
  const Selection sel(opt.only);
  if (m.warp) {
    const WarpInputs in = warp_inputs(m);
    const WarpBuild b = prepare(in, opt);
    std::vector<std::pair<std::string, OneForm>> forms;
    if (b.eta1 && b.eta2) forms.emplace_back("eta", OneForm());
    sel.validate(forms, true);
    Report rep = header(in.hash, opt);
    Runner run(rep, opt);
    run_warped_into(run, in, b, true, sel);
    return rep;
  }
  sel.validate(m.forms, false);
  Report rep = header(m.hash, opt);
  Runner run(rep, opt);
  const SamplePlan plan = sample_plan(m.chart, opt.seed, opt.samples);
  geometry_checks(run, sel, m.chart, m.g, m.pi, m.forms, m.scalars, plan);
  return rep;
}

Report run_warp(const WarpInputs& in, const RunOptions& opt) {
  static const std::vector<std::string> known{"prop22", "prop31", "prop34", "prop45",
                                              "thm23",  "thm36",  "thm47",  "eq322"};
  for (const std::string& v : in.verify)
    if (std::find(known.begin(), known.end(), v) == known.end()) throw SelectionError("unknown --verify item '" + v + "'");
  const WarpBuild b = prepare(in, opt);
  const std::string hash =
      in.hash.empty() ? content_hash(in.base.hash + in.fiber.hash + in.f + "\n" + in.eta1 + "\n" + in.eta2) : in.hash;
  Report rep = header(hash, opt);
  Runner run(rep, opt);
  run_warped_into(run, in, b, false, Selection({}));
  return rep;
}

Report run_r2(const PlaneInputs& in, const RunOptions& opt) {
  for (const std::string& v : in.verify)
    if (v != "christoffel" && v != "thm48") throw SelectionError("unknown --verify item '" + v + "'");
  const Chart chart{{"x1", "x2"}, {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}}};
  Expr pi12;
  OneForm eta(2);
  try {
    pi12 = parse(in.pi, chart.coords);
    const std::vector<std::string> parts = split_top_level(in.eta);
    if (parts.size() != 2) throw ManifestError("--eta needs two comma-separated components");
    for (std::size_t i = 0; i < 2; ++i) eta[i] = parse(parts[i], chart.coords);
  } catch (const ParseError& e) {
    throw ManifestError(std::string("expression: ") + e.what());
  }

  Report rep = header(content_hash(in.pi + "\n" + in.eta), opt);
  Runner run(rep, opt);
  const double tol = opt.tol;
  const SamplePlan plan = sample_plan(chart, opt.seed, opt.samples);

  if (wants(in.verify, "christoffel")) {
    run.run("r2.christoffel", tol, [&](CheckResult& c) {
      const Geometry geo = flat_plane(chart, pi12, plan);
      const Christoffel closed = r2_christoffel(pi12);
      std::vector<Expr> diff;
      for (std::size_t k = 0; k < geo.gamma.flat().size(); ++k) diff.push_back(geo.gamma.flat()[k] - closed.flat()[k]);
      const double r = max_abs(plan, diff);
      c.residuals = {{"closed_form", r}};
      c.verdict = classify(r, tol);
    });
  }
  if (wants(in.verify, "thm48")) {
    std::optional<Thm48Residuals> t;
    run.run("thm48.chain", tol, [&](CheckResult& c) {
      t = thm48_identity_residual(chart, pi12, eta, plan, tol);
      c.residuals = {{"chain", t->chain}, {"t_forms", t->t_forms}, {"t_pairing", t->t_pairing}};
      c.verdict = classify(max_of({t->chain, t->t_forms, t->t_pairing}), tol);
    });
    if (!t) {
      run.skipped("thm48.displayed", tol, "chain evaluation failed");
      return rep;
    }
    run.run("thm48.displayed", tol, [&](CheckResult& c) {
      c.residuals = {{"displayed", t->displayed.value_or(std::nan(""))}, {"ungated", t->displayed_ungated}};
      if (t->displayed) {
        c.verdict = classify(*t->displayed, tol);
      } else {
        c.verdict = Verdict::Skipped;
        c.note = "hypothesis not met: eta is not 2-Killing";
      }
    });
    run.run("thm48.routes", tol, [&](CheckResult& c) {
      const TwoKillingReport& k = t->two_killing;
      c.residuals = {{"iterated", k.iterated_res}, {"prop41", k.prop41_res}, {"char43", k.char43_res},
                     {"char46", k.char46_res},     {"route_gap", k.route_gap}};
      // a property of eta, reported without affecting the exit status
      c.verdict = classify(k.route_gap, tol);
      c.note = std::string("eta 2-Killing: ") + (k.verdict ? "yes" : "no");
    });
  }
  return rep;
}

}  // namespace pg
