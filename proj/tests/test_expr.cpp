#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace pgtest;

namespace {

const std::vector<std::string> kXY = names(3);

Expr p(std::string_view s) { return parse(s, kXY); }

}  // namespace

TEST_SUITE("exprdsl") {

TEST_CASE("parse shapes") {
  const Expr a = p("x1^2 + sin(x2)");
  REQUIRE(a.op() == Op::Add);
  CHECK(a.lhs().op() == Op::Pow);
  CHECK(a.lhs().node().index == 2);
  CHECK(a.rhs().op() == Op::Sin);

  const Expr b = p("-x1*x2");
  REQUIRE(b.op() == Op::Neg);
  CHECK(b.lhs().op() == Op::Mul);

  CHECK(to_string(p("x1*(x2 + 1)"), kXY) == to_string(p("x1 * (x2+1)"), kXY));
  CHECK(eval(p("x1^-2"), std::vector<double>{2.0, 0, 0}) == 0.25);
  CHECK(eval(p("2 - -x1"), std::vector<double>{3.0, 0, 0}) == 5.0);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(p("x1 +"), doctest::Contains("unexpected end of input"), ParseError);
  CHECK_THROWS_AS(p("x4"), ParseError);
  CHECK_THROWS_AS(p("foo(x1)"), ParseError);
  CHECK_THROWS_AS(p("(x1"), ParseError);
  CHECK_THROWS_AS(p("x1 x2"), ParseError);
  CHECK_THROWS_AS(p("x1^1.5"), ParseError);
  CHECK_THROWS_AS(p(""), ParseError);
}

TEST_CASE("print and parse round trip") {
  PolyGen gen(11);
  for (int t = 0; t < 20; ++t) {
    const Expr e = sin(gen.poly(3, 3)) * exp(gen.poly(3, 1)) - gen.poly(3, 2) / (Expr(3.0) + x(0) * x(0));
    const Expr back = p(to_string(e, kXY));
    const std::vector<double> pt{0.3, -0.7, 0.2};
    CHECK(eval(back, pt) == doctest::Approx(eval(e, pt)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives") {
  const std::vector<double> pt{0.4, -1.3, 0.0};
  CHECK(same_tree(simplify(diff(p("x1^2"), 0)), simplify(p("2*x1"))));
  const Expr d = diff(p("sin(x1*x2)"), 1);
  CHECK(eval(d, pt) == doctest::Approx(0.4 * std::cos(0.4 * -1.3)));
  CHECK(diff(Expr(3.5), 0).is_zero());
  CHECK(diff(p("x2"), 0).is_zero());
  CHECK(eval(diff(p("x1^3"), 0), std::vector<double>{2.0, 9.0, 0}) == 12.0);
}

TEST_CASE("derivative against central differences") {
  const Expr e = p("sqrt(2 + x1^2) * ln(3 + x2) + cos(x1 - x3) / (1.5 + sin(x2)) - exp(x1*x3)^2");
  const std::vector<double> pt{0.21, -0.33, 0.47};
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-5;
    auto a = pt, b = pt;
    a[i] += h;
    b[i] -= h;
    const double fd = (eval(e, a) - eval(e, b)) / (2 * h);
    CAPTURE(i);
    CHECK(eval(diff(e, i), pt) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("evaluation") {
  CHECK(eval(p("x1*x2"), std::vector<double>{2, 3, 0}) == 6.0);
  CHECK_THROWS_AS(eval(p("1/x1"), std::vector<double>{0, 1, 0}), EvalError);
  CHECK_THROWS_AS(eval(p("ln(x1)"), std::vector<double>{-1, 1, 0}), EvalError);
  CHECK_THROWS_AS(eval(p("sqrt(x1)"), std::vector<double>{-1, 1, 0}), EvalError);
  CHECK_THROWS_AS(eval(p("exp(x1)"), std::vector<double>{1000, 1, 0}), EvalError);
  try {
    eval(p("x2 + 1/(x1 - x1)"), std::vector<double>{1, 1, 0}, kXY);
    FAIL("expected a domain error");
  } catch (const EvalError& e) {
    CHECK(e.node_text().find("x1") != std::string::npos);
  }
}

TEST_CASE("simplification") {
  CHECK(same_tree(simplify(p("0*x1 + x2")), x(1)));
  CHECK(same_tree(simplify(p("x1^1")), x(0)));
  CHECK(simplify(p("2*3")).is_constant(6.0));
  CHECK(same_tree(simplify(p("-(-x3)")), x(2)));
  // builders fold as they go
  CHECK((x(0) * Expr(0.0)).is_zero());
  CHECK(same_tree(x(0) + Expr(0.0), x(0)));
  CHECK(same_tree(Expr(1.0) * x(1), x(1)));
}

TEST_CASE("simplify preserves values") {
  PolyGen gen(12);
  const std::vector<double> pt{0.1, 0.5, -0.9};
  for (int t = 0; t < 20; ++t) {
    const Expr e = parse(to_string(gen.poly(3, 4, 6) * (gen.poly(3, 1) + Expr(0.0)), kXY), kXY);
    CHECK(eval(simplify(e), pt) == doctest::Approx(eval(e, pt)).epsilon(1e-13));
  }
}

TEST_CASE("remap and dependency queries") {
  const Expr e = p("x1*x3");
  const std::vector<int> map{3, 1, 2};
  const Expr r = remap(e, map);
  CHECK(depends_on(r, 3));
  CHECK_FALSE(depends_on(r, 0));
  CHECK(max_variable(r) == 3);
  CHECK(max_variable(Expr(2.0)) == -1);
  const Expr m = x(0) * x(0);
  CHECK(node_count(m * sin(m)) == node_count(m) + 2);
}

}  // TEST_SUITE
