#include <doctest.h>

#include <cmath>

#include "pg/checks.hpp"

using namespace pg;

namespace {

const CheckResult* find(const Report& r, const std::string& name) {
  for (const CheckResult& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

const char* kFlat = R"({
  "chart": {"coords": ["x1", "x2"], "domain": {"x1": [-1, 1], "x2": [-1, 1]}},
  "cometric": [["1", "0"], ["0", "1"]],
  "poisson": {"upper": {"1,2": "2"}},
  "forms": {"eta": ["1", "0.5"]}
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("manifest loading") {
  const Manifest m = parse_manifest(R"({
    "chart": {"coords": ["x1", "x2"], "domain": {"x1": [-1, 1], "x2": [0, 2]}},
    "cometric": [["2 + x2", "x1/4"], ["1"]],
    "poisson": {"upper": {"1,2": "x1"}},
    "forms": {"eta": ["x2", 3]},
    "scalars": {"h": "x1*x2"}
  })");
  CHECK(m.chart.dim() == 2);
  CHECK(m.chart.domain[1].hi == 2.0);
  CHECK(same_tree(m.g(1, 0), m.g(0, 1)));
  CHECK(m.pi(1, 0).op() == Op::Neg);
  REQUIRE(m.form("eta") != nullptr);
  CHECK((*m.form("eta"))[1].is_constant(3.0));
  CHECK(m.form("nope") == nullptr);
  CHECK(m.scalars.size() == 1);
  CHECK(m.hash.size() == 16);
}

TEST_CASE("manifest errors") {
  const std::string chart = R"("chart": {"coords": ["x1", "x2"], "domain": {"x1": [-1, 1], "x2": [-1, 1]}})";
  CHECK_THROWS_WITH_AS(parse_manifest("{" + chart + R"(, "cometric": [["1", "0", "0"], ["0", "1", "0"]]})"),
                       doctest::Contains("cometric"), ManifestError);
  CHECK_THROWS_WITH_AS(parse_manifest("{" + chart + R"(, "cometric": [["x3", "0"], ["1"]]})"),
                       doctest::Contains("undeclared coordinate 'x3'"), ManifestError);
  CHECK_THROWS_WITH_AS(parse_manifest("{" + chart + R"(, "cometric": [["1", "0"], ["1"]], "poisson": {"upper": {"2,1": "1"}}})"),
                       doctest::Contains("strict upper triangle"), ManifestError);
  CHECK_THROWS_WITH_AS(parse_manifest("{" + chart + R"(, "cometric": [["1 +", "0"], ["1"]]})"),
                       doctest::Contains("cometric[0][0]"), ManifestError);
  CHECK_THROWS_WITH_AS(parse_manifest("{" + chart + R"(, "cometric": [["1", "0"], ["1"]], "forms": {"w": ["1"]}})"),
                       doctest::Contains("forms.w"), ManifestError);
  CHECK_THROWS_AS(parse_manifest("{" + chart + R"(, "cometric": [["1", "0"], ["1"]], "extra": 1})"), ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"chart": )"), ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"chart": {"coords": ["a"], "domain": {"a": [1, 1]}}, "cometric": [["1"]]})"),
                  ManifestError);
}

TEST_CASE("flat plane with constant Pi passes everything") {
  RunOptions opt;
  opt.samples = 16;
  const Report r = run_checks(parse_manifest(kFlat), opt);
  CHECK_FALSE(r.failed());
  for (const CheckResult& c : r.checks) {
    CAPTURE(c.name);
    CHECK((c.verdict == Verdict::Pass || c.verdict == Verdict::Skipped));
  }
  const CheckResult* w = find(r, "weitzenbock.eq318:eta");
  REQUIRE(w != nullptr);
  CHECK(w->verdict == Verdict::Pass);
}

TEST_CASE("non-Poisson bivector fails the Jacobi check") {
  RunOptions opt;
  opt.samples = 16;
  opt.only = {"poisson"};
  const Report r = run_checks(parse_manifest(R"({
    "chart": {"coords": ["x1", "x2", "x3"], "domain": {"x1": [-1, 1], "x2": [-1, 1], "x3": [-1, 1]}},
    "cometric": [["1", "0", "0"], ["1", "0"], ["1"]],
    "poisson": {"upper": {"1,2": "1", "2,3": "x2"}}
  })"),
                              opt);
  CHECK(r.failed());
  const CheckResult* j = find(r, "poisson.jacobiator");
  REQUIRE(j != nullptr);
  CHECK(j->verdict == Verdict::Fail);
  CHECK(j->residuals[0].second == doctest::Approx(1.0));
  CHECK(find(r, "poisson.anchor_morphism")->verdict == Verdict::Skipped);
  CHECK(find(r, "connection.torsion") == nullptr);
}

TEST_CASE("selection") {
  RunOptions opt;
  opt.samples = 8;
  const Manifest m = parse_manifest(kFlat);
  opt.only = {"two-killing:eta"};
  const Report r = run_checks(m, opt);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].name == "two-killing:eta");
  opt.only = {"killing:missing"};
  CHECK_THROWS_AS(run_checks(m, opt), SelectionError);
  opt.only = {"everything"};
  CHECK_THROWS_AS(run_checks(m, opt), SelectionError);
}

TEST_CASE("domain errors become failed checks with the point") {
  RunOptions opt;
  opt.samples = 16;
  opt.only = {"killing:bad"};
  const Report r = run_checks(parse_manifest(R"j({
    "chart": {"coords": ["x1", "x2"], "domain": {"x1": [-1, 1], "x2": [-1, 1]}},
    "cometric": [["1", "0"], ["1"]],
    "poisson": {"upper": {"1,2": "x1"}},
    "forms": {"bad": ["ln(x1)", "0"]}
  })j"),
                              opt);
  REQUIRE_FALSE(r.checks.empty());
  CHECK(r.checks[0].verdict == Verdict::Fail);
  CHECK(r.checks[0].point.size() == 2);
  CHECK(r.checks[0].note.find("domain error") == 0);
}

TEST_CASE("structured report round trip and determinism") {
  RunOptions opt;
  opt.samples = 8;
  const Manifest m = parse_manifest(kFlat);
  const Report a = run_checks(m, opt);
  const std::string text = to_structured(a);
  CHECK(from_structured(text) == a);
  CHECK(to_structured(run_checks(m, opt)) == text);

  Report withnan = a;
  withnan.checks[0].residuals[0].second = std::nan("");
  const Report back = from_structured(to_structured(withnan));
  CHECK(std::isnan(back.checks[0].residuals[0].second));
  CHECK(to_text(a).find("summary:") != std::string::npos);
}

TEST_CASE("verdict combination") {
  CHECK(worst({Verdict::Pass, Verdict::Skipped}) == Verdict::Pass);
  CHECK(worst({Verdict::Indeterminate, Verdict::Pass}) == Verdict::Indeterminate);
  CHECK(worst({Verdict::Indeterminate, Verdict::Fail}) == Verdict::Fail);
  CHECK(worst({Verdict::Skipped, Verdict::Skipped}) == Verdict::Skipped);
}

TEST_CASE("plane command") {
  RunOptions opt;
  opt.samples = 16;
  PlaneInputs in{"x1*x2", "x2, x1^2", {}};
  const Report r = run_r2(in, opt);
  CHECK(find(r, "r2.christoffel")->verdict == Verdict::Pass);
  CHECK(find(r, "thm48.chain")->verdict == Verdict::Pass);
  in.eta = "x1";
  CHECK_THROWS_AS(run_r2(in, opt), ManifestError);
  CHECK(split_top_level("sin(x1), x2").size() == 2);
}

}  // TEST_SUITE
