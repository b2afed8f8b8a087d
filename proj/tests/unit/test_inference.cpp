#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "smoothwass/errors.hpp"
#include "smoothwass/inference.hpp"
#include "smoothwass/stats.hpp"

using namespace smoothwass;

namespace {

Sample draw_uniform(double lo, double hi, int n, std::uint64_t seed) {
  return sample(DistributionSpec::uniform_box_on({lo}, {hi}), n,
                SeedPath(seed).child("data"));
}

BootstrapDistribution manual(std::vector<double> values) {
  BootstrapDistribution d;
  std::sort(values.begin(), values.end());
  d.B = static_cast<int>(values.size());
  d.values = std::move(values);
  return d;
}

}  // namespace

TEST_CASE("bootstrap replicate counts and sorting") {
  const auto x = draw_uniform(0.0, 1.0, 25, 1);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);
  const auto d = bootstrap_one_sample_null(x, cfg, 3, SeedPath(2).child("b"));
  REQUIRE(d.B == 3);
  CHECK(std::is_sorted(d.values.begin(), d.values.end()));
  CHECK(d.scheme == BootstrapScheme::one_sample_null);
}

TEST_CASE("n = 1 degenerate resampling gives pure-noise distances") {
  Sample x;
  x.n = 1;
  x.d = 1;
  x.points = {0.4};
  const auto cfg = SmoothingConfig::make(2.0, 1.0, 8);
  const auto d = bootstrap_one_sample_null(x, cfg, 5, SeedPath(3).child("b"));
  for (double v : d.values) CHECK(v >= 0.0);
  CHECK(d.values.back() > 0.0);
}

TEST_CASE("one-sample-alt centering is exact for forced identical resamples") {
  Sample x;
  x.n = 1;
  x.d = 1;
  x.points = {1.7};
  const auto nu = draw_uniform(0.0, 1.0, 50, 4);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);
  const auto d = bootstrap_one_sample_alt(x, nu, cfg, 3, SeedPath(5).child("b"));
  for (double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("bootstrap determinism and sign conventions") {
  const auto x = draw_uniform(0.0, 1.0, 30, 6);
  const auto y = draw_uniform(0.4, 1.4, 30, 7);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);

  const auto p1 = bootstrap_pooled_null(x, y, cfg, 12, SeedPath(8).child("b"));
  const auto p2 = bootstrap_pooled_null(x, y, cfg, 12, SeedPath(8).child("b"));
  CHECK(p1.values == p2.values);
  for (double v : p1.values) CHECK(v >= 0.0);

  const auto n1 = bootstrap_naive_null(x, y, cfg, 12, SeedPath(9).child("b"));
  for (double v : n1.values) CHECK(v >= 0.0);

  const auto alt = bootstrap_two_sample_alt(x, y, cfg, 12, SeedPath(10).child("b"));
  const bool has_negative =
      std::any_of(alt.values.begin(), alt.values.end(),
                  [](double v) { return v < 0.0; });
  CHECK(has_negative);  // centered values take both signs

  Sample bad = y;
  bad.n = 29;
  bad.points.resize(29);
  CHECK_THROWS_AS(bootstrap_pooled_null(x, bad, cfg, 4, SeedPath(1)),
                  ConfigError);
}

TEST_CASE("quantile conventions") {
  const auto d = manual({1.0, 2.0, 3.0, 4.0});
  CHECK(quantile(d, 0.0) == 1.0);
  CHECK(quantile(d, 1.0) == 4.0);
  CHECK(quantile(d, 0.5) == 2.0);
  CHECK(quantile(d, 0.75) == 3.0);
  BootstrapDistribution empty;
  CHECK_THROWS_AS(quantile(empty, 0.5), ConfigError);
}

TEST_CASE("confidence interval basics") {
  const auto x = draw_uniform(0.0, 1.0, 40, 11);
  const auto y = draw_uniform(0.5, 1.5, 40, 12);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 8);
  const auto ci =
      confidence_interval(x, y, cfg, 0.05, 60, SeedPath(13).child("ci"));
  CHECK(ci.lo <= ci.hi);
  CHECK(ci.lo >= 0.0);

  const auto tight =
      confidence_interval(x, y, cfg, 0.99, 60, SeedPath(13).child("ci"));
  CHECK(tight.hi - tight.lo <= ci.hi - ci.lo);

  CHECK_THROWS_AS(confidence_interval(x, y, cfg, 0.0, 10, SeedPath(1)),
                  ConfigError);
  CHECK_THROWS_AS(confidence_interval(x, y, cfg, 1.0, 10, SeedPath(1)),
                  ConfigError);
}

TEST_CASE("confidence interval endpoints scale with the data and sigma") {
  const auto x = draw_uniform(0.0, 1.0, 30, 14);
  const auto y = draw_uniform(0.5, 1.5, 30, 15);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);
  const SeedPath seed = SeedPath(16).child("ci");
  const auto base = confidence_interval(x, y, cfg, 0.1, 40, seed);

  const double lambda = 3.0;
  Sample xs = x, ys = y;
  for (auto& v : xs.points) v *= lambda;
  for (auto& v : ys.points) v *= lambda;
  const auto scfg = SmoothingConfig::make(2.0, lambda * 0.5, 4);
  const auto scaled = confidence_interval(xs, ys, scfg, 0.1, 40, seed);
  CHECK(scaled.lo == doctest::Approx(lambda * base.lo).epsilon(1e-9));
  CHECK(scaled.hi == doctest::Approx(lambda * base.hi).epsilon(1e-9));
}

TEST_CASE("equality test invariants") {
  const auto x = draw_uniform(0.0, 1.0, 40, 17);
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);

  // Identical arrays with common noise: statistic is exactly zero.
  const auto same = equality_test(x, x, cfg, 0.1, 30, SeedPath(18).child("t"));
  CHECK(same.statistic == 0.0);
  CHECK_FALSE(same.reject);
  CHECK(same.p_value == doctest::Approx(1.0));

  const auto y = draw_uniform(2.0, 3.0, 40, 19);
  const auto far = equality_test(x, y, cfg, 0.1, 30, SeedPath(20).child("t"));
  CHECK(far.reject == (far.statistic > far.critical_value));
  CHECK(far.p_value >= 1.0 / 31.0);
  CHECK(far.p_value <= 1.0);
  CHECK(far.reject);

  Sample bad = y;
  bad.n = 39;
  bad.points.resize(39);
  CHECK_THROWS_AS(equality_test(x, bad, cfg, 0.1, 10, SeedPath(1)), ConfigError);
}
