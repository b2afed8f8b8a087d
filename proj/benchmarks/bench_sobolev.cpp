#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "smoothwass/sobolev.hpp"

namespace {

using namespace smoothwass;

GridMeasure bump_density(const Grid& g) {
  GridMeasure m;
  m.grid = g;
  m.density.resize(g.total_nodes());
  for (int i = 0; i < g.nodes[0]; ++i) {
    const double t = static_cast<double>(i) / g.nodes[0];
    m.density[i] = 0.4 + std::sin(std::numbers::pi * t);
  }
  return renormalize(std::move(m));
}

GridSigned mode(const Grid& g, int k) {
  GridSigned h;
  h.grid = g;
  h.values.resize(g.total_nodes());
  for (int i = 0; i < g.nodes[0]; ++i)
    h.values[i] = std::cos(2.0 * std::numbers::pi * k * g.coord(0, i));
  return h;
}

void BM_DualNormP2(benchmark::State& state) {
  const Grid g = Grid::line(static_cast<int>(state.range(0)), 0.0, 1.0,
                            Boundary::periodic);
  const auto rho = bump_density(g);
  const auto h = mode(g, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_norm_p2(rho, h));
  }
}
BENCHMARK(BM_DualNormP2)->RangeMultiplier(2)->Range(128, 2048);

void BM_DualNormGeneralP(benchmark::State& state) {
  const Grid g = Grid::line(static_cast<int>(state.range(0)), 0.0, 1.0,
                            Boundary::periodic);
  const auto rho = bump_density(g);
  const auto h = mode(g, 3);
  const double p = state.range(1) == 0 ? 1.5 : 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_norm_general_p(rho, h, p, 1e-9));
  }
}
BENCHMARK(BM_DualNormGeneralP)
    ->Args({256, 0})
    ->Args({256, 1})
    ->Args({512, 0})
    ->Args({512, 1});

}  // namespace
