#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smoothwass/errors.hpp"
#include "smoothwass/estimator.hpp"
#include "smoothwass/stats.hpp"

using namespace smoothwass;

namespace {

Sample make_sample(std::vector<double> pts, int d = 1) {
  Sample s;
  s.d = d;
  s.n = static_cast<int>(pts.size()) / d;
  s.points = std::move(pts);
  return s;
}

Sample draw(const DistributionSpec& spec, int n, std::uint64_t seed,
            const char* tag) {
  return sample(spec, n, SeedPath(seed).child(tag));
}

}  // namespace

TEST_CASE("identical samples with common noise give exactly zero") {
  const auto x = make_sample({0.1, 0.7, -0.3, 2.0});
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 8);
  const auto est = estimate_swd(x, x, cfg, SeedPath(1).child("e"), true);
  CHECK(est.value_wp == 0.0);
  CHECK(est.value_sp == 0.0);
}

TEST_CASE("point masses recover the closed-form distance between gaussians") {
  // W_2(N(a, s^2), N(b, s^2)) = |a - b|.
  const auto x = make_sample({-0.75});
  const auto y = make_sample({1.25});
  const auto cfg = SmoothingConfig::make(2.0, 0.8, 10000);
  const auto est = estimate_swd(x, y, cfg, SeedPath(2).child("pm"), false);
  CHECK(std::abs(est.value_wp - 2.0) < 0.05);
  CHECK(est.value_sp ==
        doctest::Approx(std::pow(est.value_wp, 2.0)).epsilon(1e-10));
}

TEST_CASE("estimates are monotone non-increasing in sigma up to MC error") {
  const auto mu = DistributionSpec::gaussian_mixture_of(
      {0.5, 0.5}, {{0.0}, {1.0}}, {0.05, 0.05});
  const auto nu = DistributionSpec::point_mass_at({0.5});
  const auto lo = SmoothingConfig::make(2.0, 0.3, 16);
  const auto hi = SmoothingConfig::make(2.0, 0.6, 16);
  const int R = 20;
  std::vector<double> diffs(R);
  for (int r = 0; r < R; ++r) {
    const SeedPath seed = SeedPath(100 + r);
    const auto x = sample(mu, 200, seed.child("x"));
    const auto y = sample(nu, 200, seed.child("y"));
    // Same seed path: the noise tensor is identical, scaled by sigma.
    const double w_lo = estimate_swd(x, y, lo, seed.child("est"), false).value_wp;
    const double w_hi = estimate_swd(x, y, hi, seed.child("est"), false).value_wp;
    diffs[r] = w_hi - w_lo;
  }
  const double m = mean(diffs);
  const double se = std::sqrt(sample_variance(diffs) / R);
  CHECK(m <= 3.0 * se);
}

TEST_CASE("translation invariance") {
  const auto x = draw(DistributionSpec::uniform_box_on({0.0}, {1.0}), 60, 3, "x");
  const auto y = draw(DistributionSpec::uniform_box_on({0.2}, {1.4}), 60, 3, "y");
  const auto cfg = SmoothingConfig::make(2.0, 0.4, 8);
  const SeedPath seed = SeedPath(4).child("t");
  const double w0 = estimate_swd(x, y, cfg, seed, false).value_wp;
  Sample xs = x, ys = y;
  for (auto& v : xs.points) v += 17.25;
  for (auto& v : ys.points) v += 17.25;
  const double w1 = estimate_swd(xs, ys, cfg, seed, false).value_wp;
  CHECK(std::abs(w0 - w1) <= 1e-9);
}

TEST_CASE("exact scale equivariance with scaled sigma") {
  const auto x = draw(DistributionSpec::uniform_box_on({0.0}, {1.0}), 50, 5, "x");
  const auto y = draw(DistributionSpec::uniform_box_on({0.5}, {1.5}), 50, 5, "y");
  const double lambda = 2.5;
  const auto cfg = SmoothingConfig::make(2.0, 0.4, 8);
  const auto cfg_scaled = SmoothingConfig::make(2.0, lambda * 0.4, 8);
  const SeedPath seed = SeedPath(6).child("s");
  const double w0 = estimate_swd(x, y, cfg, seed, false).value_wp;
  Sample xs = x, ys = y;
  for (auto& v : xs.points) v *= lambda;
  for (auto& v : ys.points) v *= lambda;
  const double w1 = estimate_swd(xs, ys, cfg_scaled, seed, false).value_wp;
  CHECK(std::abs(w1 - lambda * w0) <= 1e-10 * (1.0 + w1));
}

TEST_CASE("symmetry under sample swap with shared noise") {
  const auto x = draw(DistributionSpec::uniform_box_on({0.0}, {1.0}), 40, 7, "x");
  const auto y = draw(DistributionSpec::uniform_box_on({0.3}, {1.6}), 40, 7, "y");
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 8);
  const SeedPath seed = SeedPath(8).child("sym");
  const double wxy = estimate_swd(x, y, cfg, seed, true).value_wp;
  const double wyx = estimate_swd(y, x, cfg, seed, true).value_wp;
  CHECK(std::abs(wxy - wyx) <= 1e-9);
}

TEST_CASE("common noise demands equal sizes") {
  const auto x = make_sample({0.0, 1.0});
  const auto y = make_sample({0.0, 1.0, 2.0});
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 2);
  CHECK_THROWS_AS(estimate_swd(x, y, cfg, SeedPath(9), true), ConfigError);
  Sample y2 = y;
  y2.d = 3;
  y2.n = 1;
  CHECK_THROWS_AS(estimate_swd(x, y2, cfg, SeedPath(9), false), ConfigError);
}

TEST_CASE("barycentric potential averages over children") {
  DualPotentials duals;
  duals.g = {1.0, 3.0, 2.0, 4.0};
  duals.gc = {};
  const std::vector<int> origin{0, 1, 0, 1};

  SUBCASE("m = 1 is a reordering") {
    DualPotentials d1;
    d1.g = {5.0, 6.0};
    const auto bar = barycentric_potential(d1, {1, 0}, Side::source, 2);
    CHECK(bar == std::vector<double>{6.0, 5.0});
  }
  SUBCASE("averages and linearity") {
    const auto bar = barycentric_potential(duals, origin, Side::source, 2);
    CHECK(bar[0] == doctest::Approx(1.5));
    CHECK(bar[1] == doctest::Approx(3.5));
    auto shifted = duals;
    for (auto& v : shifted.g) v += 2.25;
    const auto bar2 = barycentric_potential(shifted, origin, Side::source, 2);
    for (int i = 0; i < 2; ++i)
      CHECK(bar2[i] == doctest::Approx(bar[i] + 2.25).epsilon(1e-15));
  }
  SUBCASE("constant potential stays constant") {
    DualPotentials c;
    c.g.assign(4, 7.5);
    const auto bar = barycentric_potential(c, origin, Side::source, 2);
    for (double v : bar) CHECK(v == 7.5);
  }
  SUBCASE("missing origins are rejected") {
    CHECK_THROWS_AS(barycentric_potential(duals, {0, 0, 0, 0}, Side::source, 2),
                    ConfigError);
    CHECK_THROWS_AS(barycentric_potential(duals, {0, 1}, Side::source, 2),
                    ConfigError);
  }
}

TEST_CASE("plug-in variance: shift invariance and modes") {
  const auto x = draw(DistributionSpec::uniform_box_on({0.0}, {1.0}), 80, 10, "x");
  const auto y = draw(DistributionSpec::uniform_box_on({2.0}, {3.0}), 80, 10, "y");
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 16);
  auto est = estimate_swd(x, y, cfg, SeedPath(11).child("v"), false);

  const auto v1 = plugin_variance(est, VarianceMode::one_sample);
  const auto v2 = plugin_variance(est, VarianceMode::two_sample);
  CHECK(v1.v_squared > 0.0);
  CHECK(v2.v_squared > v1.v_squared);
  CHECK(v2.var_gc > 0.0);
  CHECK(v1.denominator ==
        doctest::Approx(4.0 * std::pow(est.value_wp, 2.0)).epsilon(1e-12));

  // Constant dual shifts (g + a, gc - a) do not move the variance.
  auto shifted = est;
  for (auto& g : shifted.duals.g) g += 3.0;
  for (auto& gc : shifted.duals.gc) gc -= 3.0;
  const auto v1s = plugin_variance(shifted, VarianceMode::one_sample);
  const auto v2s = plugin_variance(shifted, VarianceMode::two_sample);
  CHECK(v1s.v_squared == doctest::Approx(v1.v_squared).epsilon(1e-9));
  CHECK(v2s.v_squared == doctest::Approx(v2.v_squared).epsilon(1e-9));
}

TEST_CASE("plug-in variance rejects the degenerate null") {
  const auto x = make_sample({0.4, 0.9, 0.1});
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);
  const auto est = estimate_swd(x, x, cfg, SeedPath(12).child("n"), true);
  CHECK_THROWS_AS(plugin_variance(est, VarianceMode::one_sample),
                  DegenerateNullError);
}

TEST_CASE("embedded plan and duals satisfy the solver contract") {
  const auto x = draw(DistributionSpec::uniform_box_on({0.0}, {1.0}), 30, 13, "x");
  const auto y = draw(DistributionSpec::uniform_box_on({0.5}, {1.5}), 30, 13, "y");
  const auto cfg = SmoothingConfig::make(2.0, 0.5, 4);
  const auto est = estimate_swd(x, y, cfg, SeedPath(14).child("c"), false);
  CHECK(std::abs(est.duals.dual_value - est.value_sp) <=
        1e-8 * (1.0 + est.value_sp));
  double row_total = 0.0;
  for (const auto& e : est.plan.entries) row_total += e.mass;
  CHECK(row_total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.origin_mu.size() == static_cast<std::size_t>(30 * cfg.m));
}
