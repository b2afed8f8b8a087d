#include <benchmark/benchmark.h>

#include "smoothwass/estimator.hpp"
#include "smoothwass/measures.hpp"

namespace {

using namespace smoothwass;

void BM_EstimateSwd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const auto mu = DistributionSpec::uniform_box_on({0.0}, {1.0});
  const auto nu = DistributionSpec::uniform_box_on({0.5}, {1.5});
  const auto x = sample(mu, n, SeedPath(1).child("x"));
  const auto y = sample(nu, n, SeedPath(1).child("y"));
  const auto cfg = SmoothingConfig::make(2.0, 0.5, m);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_swd(x, y, cfg, SeedPath(2).child(rep++), false));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * m);
}
BENCHMARK(BM_EstimateSwd)
    ->Args({200, 32})
    ->Args({400, 32})
    ->Args({400, 128})
    ->Args({2000, 32});

}  // namespace
