#include <doctest.h>

#include "support.hpp"

using namespace pgtest;

namespace {

Cometric diag(std::initializer_list<double> d) {
  SquareField m(d.size());
  std::size_t i = 0;
  for (double v : d) {
    m(i, i) = Expr(v);
    ++i;
  }
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      if (a != b) m(a, b) = Expr(0.0);
  return Cometric{m};
}

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("metric inversion") {
  for (std::size_t dim = 1; dim <= 4; ++dim) {
    const CovariantMetric gl = invert_cometric(Cometric{SquareField::identity(dim)});
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) CHECK(gl(i, j).is_constant(i == j ? 1.0 : 0.0));
  }
  const CovariantMetric d = invert_cometric(diag({4.0, 1.0}));
  CHECK(d(0, 0).is_constant(0.25));
  CHECK(d(1, 1).is_constant(1.0));
  CHECK(d(0, 1).is_zero());

  CHECK_THROWS_AS(invert_cometric(Cometric{SquareField::identity(5)}), GeometryError);
}

TEST_CASE("inverting twice returns the cometric") {
  for (std::size_t dim = 2; dim <= 4; ++dim) {
    PolyGen gen(40 + dim);
    const SamplePlan plan = sample_plan(box(dim), 1, 16);
    const Cometric g = gen.cometric(dim);
    const Cometric back = invert_metric(invert_cometric(g, &plan));
    std::vector<Expr> diffs;
    for (std::size_t k = 0; k < dim * dim; ++k) diffs.push_back(back.m.flat()[k] - g.m.flat()[k]);
    CAPTURE(dim);
    CHECK(pg::max_abs(plan, diffs) < 1e-12);
  }
}

TEST_CASE("degenerate cometric names the point") {
  SquareField m(2);
  m(0, 0) = x(0);
  m(1, 1) = Expr(1.0);
  const SamplePlan plan = sample_plan(box(2), 1, 16);
  CHECK_THROWS_AS(validate_cometric(Cometric{m}, plan), GeometryError);
  SquareField s(2);
  s(0, 0) = Expr(1.0);
  s(1, 1) = Expr(1.0);
  s(0, 1) = x(0);
  s(1, 0) = Expr(0.0);
  CHECK_THROWS_AS(validate_cometric(Cometric{s}, plan), GeometryError);
}

TEST_CASE("sample plans") {
  const Chart c = box(3, -2.0, 5.0);
  const SamplePlan a = sample_plan(c, 42, 32);
  const SamplePlan b = sample_plan(c, 42, 32);
  CHECK(a.points == b.points);
  CHECK(sample_plan(c, 43, 32).points != a.points);
  for (const auto& pt : a.points) {
    for (double v : pt) {
      CHECK(v > -2.0);
      CHECK(v < 5.0);
    }
  }
  const SamplePlan one = sample_plan(c, 7, 1);
  CHECK(one.points.size() == 1);

  Chart empty = box(2);
  empty.domain[1] = Interval{0.0, 0.0};
  CHECK_THROWS_AS(sample_plan(empty, 1, 4), GeometryError);
  Chart dup = box(2);
  dup.coords[1] = "x1";
  CHECK_THROWS_AS(dup.validate(), GeometryError);
}

TEST_CASE("pairings") {
  const Cometric id{SquareField::identity(2)};
  const OneForm dx1 = OneForm::basis(2, 0);
  const OneForm dx2 = OneForm::basis(2, 1);
  CHECK(pair_g(id, dx1, dx2).is_zero());
  CHECK(pair_g(id, dx1, dx1).is_one());

  PolyGen gen(3);
  const SamplePlan plan = sample_plan(box(3), 2, 16);
  const Cometric g = gen.cometric(3);
  const BivectorField pi = gen.bivector(3, 2);
  const OneForm a = gen.form(3, 2);
  const OneForm b = gen.form(3, 2);
  CHECK(max_abs(plan, pair_g(g, a, b) - pair_g(g, b, a)) < 1e-12);
  CHECK(max_abs(plan, pair_pi(pi, a, a)) < 1e-12);
  CHECK(max_abs(plan, pair_pi(pi, a, b) + pair_pi(pi, b, a)) < 1e-12);
  CHECK(antisymmetry_residual(pi, plan) == 0.0);

  BivectorField c = BivectorField::zero(2);
  c.set_upper(0, 1, Expr(2.5));
  CHECK(pair_pi(c, dx1, dx2).is_constant(2.5));
}

TEST_CASE("parallel, serial and reference evaluation agree") {
  PolyGen gen(8);
  const SamplePlan plan = sample_plan(box(3), 5, 200);
  std::vector<Expr> exprs;
  for (int t = 0; t < 12; ++t) exprs.push_back(sin(gen.poly(3, 3)) * gen.poly(3, 2) + exp(gen.poly(3, 1)));
  exprs.push_back(exprs[0] * exprs[1] + exprs[0]);  // shared subtrees
  const Tape tape(exprs, plan.names);
  const ValueTable par = evaluate(tape, plan.points);
  const ValueTable ser = evaluate_serial(tape, plan.points);
  const ValueTable ref = evaluate_reference(exprs, plan.points, plan.names);
  REQUIRE(par.rows == plan.points.size());
  REQUIRE(par.cols == exprs.size());
  CHECK(par.data == ser.data);
  for (std::size_t k = 0; k < par.data.size(); ++k) CHECK(par.data[k] == doctest::Approx(ref.data[k]).epsilon(1e-13));
}

TEST_CASE("tape errors carry the failing row") {
  const SamplePlan plan = sample_plan(box(2), 5, 50);
  const std::vector<Expr> exprs{ln(x(0))};
  const Tape tape(exprs, plan.names);
  std::size_t first = 0;
  while (plan.points[first][0] > 0) ++first;
  try {
    evaluate(tape, plan.points);
    FAIL("expected a sample error");
  } catch (const SampleError& e) {
    CHECK(e.row() == first);
    CHECK(e.point() == plan.points[first]);
  }
  CHECK_THROWS_AS(evaluate_serial(tape, plan.points), SampleError);
}

}  // TEST_SUITE
