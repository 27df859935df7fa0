#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fsk/alpha.hpp"
#include "fsk/analysis.hpp"
#include "fsk/approx.hpp"
#include "fsk/bilinear.hpp"
#include "fsk/ifs.hpp"

namespace {

double sin_sin(double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }

fsk::PerturbOperator bump_operator() {
  return fsk::multiplication_operator([](double x, double y) { return 1.0 + x * (1 - x) * y * (1 - y); });
}

void BM_RbApply(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const fsk::Net net = fsk::uniform_net(2, 2);
  fsk::AlphaSurface s(sin_sin, bump_operator(), fsk::ScaleFunction::constant(0.3), net, {res});
  const fsk::SampledField grid = fsk::SampledField::on_net(net, res, res);
  const fsk::GridOperator op(s.family(), grid);
  fsk::SampledField g = fsk::sample(grid, sin_sin);
  for (auto _ : state) {
    g = op.apply(g);
    benchmark::DoNotOptimize(g.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_RbApply)->Arg(129)->Arg(257)->Arg(513);

void BM_FixedPointSolve(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const fsk::Net net = fsk::uniform_net(2, 2);
  const fsk::PerturbOperator op = bump_operator();
  for (auto _ : state) {
    fsk::AlphaSurface s(sin_sin, op, fsk::ScaleFunction::constant(0.3), net, {res});
    benchmark::DoNotOptimize(s.field().values().data());
  }
}
BENCHMARK(BM_FixedPointSolve)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_OrbitEvaluate(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  fsk::AlphaSurface s(sin_sin, bump_operator(), fsk::ScaleFunction::constant(0.3), fsk::uniform_net(2, 2));
  for (auto _ : state) {
    fsk::SurfaceOrbit orbit = fsk::orbit_evaluate(s.family(), depth);
    benchmark::DoNotOptimize(orbit.points.data());
  }
}
BENCHMARK(BM_OrbitEvaluate)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PointwiseEvaluate(benchmark::State& state) {
  fsk::AlphaSurface s(sin_sin, bump_operator(), fsk::ScaleFunction::constant(0.3), fsk::uniform_net(2, 2),
                      {257, 1e-10, 0, fsk::Engine::pointwise});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int depth = s.surface().pointwise_depth();
  for (auto _ : state) benchmark::DoNotOptimize(fsk::pointwise_evaluate(s.family(), u(rng), u(rng), depth));
}
BENCHMARK(BM_PointwiseEvaluate);

void BM_BoxCount(benchmark::State& state) {
  const fsk::Net net = fsk::uniform_net(4, 4);
  fsk::Lattice z(5, 5);
  for (int l = 0; l <= 4; ++l)
    for (int k = 0; k <= 4; ++k) z(k, l) = std::sin(1.7 * k + 0.9 * l);
  const fsk::BilinearData data = fsk::make_bilinear_data(net, z, fsk::Lattice(5, 5, 0.5));
  const fsk::SampledField field = fsk::build_bilinear_fis(data, net, {1025}).solution().field;
  for (auto _ : state) benchmark::DoNotOptimize(fsk::box_count_dimension(field, 3, 9).dimension);
}
BENCHMARK(BM_BoxCount)->Unit(benchmark::kMillisecond);

void BM_MinimaxFit(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const fsk::PolySpace space = fsk::poly_basis((degree + 1) / 2, degree / 2);
  for (auto _ : state) benchmark::DoNotOptimize(fsk::best_approx(sin_sin, space, 129).sup_error);
}
BENCHMARK(BM_MinimaxFit)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
