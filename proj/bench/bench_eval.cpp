// Evaluation kernels on the Christoffel symbols of a curved 4-dimensional
// geometry: OpenMP tape, serial tape, and the recursive reference path.

#include <benchmark/benchmark.h>

#include <map>

#include "pg/connection.hpp"

namespace {

struct Fixture {
  pg::SamplePlan plan;
  std::vector<pg::Expr> exprs;
  pg::Tape tape;

  explicit Fixture(std::size_t samples) {
    const std::vector<std::string> coords{"x1", "x2", "x3", "x4"};
    pg::Chart chart{coords, std::vector<pg::Interval>(4, pg::Interval{-1.0, 1.0})};
    plan = pg::sample_plan(chart, 42, samples);
    pg::SquareField m(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const pg::Expr xi = pg::Expr::variable(static_cast<int>(i));
      m(i, i) = pg::Expr(2.0) + xi * xi;
      for (std::size_t j = i + 1; j < 4; ++j) m(i, j) = m(j, i) = pg::Expr(0.0);
    }
    m(0, 1) = m(1, 0) = pg::Expr(0.25) * pg::Expr::variable(2);
    pg::BivectorField pi = pg::BivectorField::zero(4);
    pi.set_upper(0, 1, pg::Expr::variable(0) * pg::Expr::variable(1));
    pi.set_upper(2, 3, pg::Expr(1.0) + pg::Expr::variable(2) * pg::Expr::variable(2));
    const pg::Geometry geo = pg::make_geometry(chart, pg::Cometric{m}, pi, plan);
    exprs.assign(geo.gamma.flat().begin(), geo.gamma.flat().end());
    tape = pg::Tape(exprs);
  }
};

const Fixture& fixture(std::size_t samples) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(samples);
  if (it == cache.end()) it = cache.emplace(samples, Fixture(samples)).first;
  return it->second;
}

void BM_Parallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pg::evaluate(f.tape, f.plan.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Serial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pg::evaluate_serial(f.tape, f.plan.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Reference(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pg::evaluate_reference(f.exprs, f.plan.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Parallel)->Arg(64)->Arg(4096);
BENCHMARK(BM_Serial)->Arg(64)->Arg(4096);
BENCHMARK(BM_Reference)->Arg(64)->Arg(4096);

BENCHMARK_MAIN();
