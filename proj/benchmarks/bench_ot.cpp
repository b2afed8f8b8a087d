#include <benchmark/benchmark.h>

#include "smoothwass/measures.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/rng.hpp"

namespace {

using namespace smoothwass;

DiscreteMeasure random_atoms(int k, int d, std::uint64_t seed) {
  Rng rng(seed);
  DiscreteMeasure m;
  m.k = k;
  m.d = d;
  m.points.resize(static_cast<std::size_t>(k) * d);
  for (auto& x : m.points) x = rng.normal();
  m.weights.assign(k, 1.0 / k);
  return m;
}

void BM_Monotone1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mu = random_atoms(n, 1, 1);
  const auto nu = random_atoms(n, 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein_1d(mu, nu, 2.0));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Monotone1D)->RangeMultiplier(4)->Range(1 << 10, 1 << 20)
    ->Complexity(benchmark::oNLogN);

void BM_Monotone1DWithDuals(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mu = random_atoms(n, 1, 3);
  const auto nu = random_atoms(n, 1, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exact(mu, nu, 2.0, OtMethod::monotone_1d));
  }
}
BENCHMARK(BM_Monotone1DWithDuals)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_NetworkSimplex(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mu = random_atoms(n, 2, 5);
  const auto nu = random_atoms(n + n / 3, 2, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exact(mu, nu, 2.0, OtMethod::network_simplex));
  }
}
BENCHMARK(BM_NetworkSimplex)->RangeMultiplier(2)->Range(16, 256);

}  // namespace
