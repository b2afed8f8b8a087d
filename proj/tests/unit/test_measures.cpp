#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "smoothwass/errors.hpp"
#include "smoothwass/measures.hpp"
#include "smoothwass/rng.hpp"
#include "smoothwass/stats.hpp"

using namespace smoothwass;

TEST_CASE("seed derivation is deterministic, order sensitive, label sensitive") {
  const SeedPath a = derive_seed(42, {"a", "b"});
  const SeedPath b = derive_seed(42, {"a", "b"});
  CHECK(a.stream() == b.stream());
  CHECK(derive_seed(42, {"b", "a"}).stream() != a.stream());
  CHECK(derive_seed(42, {"a", "c"}).stream() != a.stream());
  CHECK(derive_seed(43, {"a", "b"}).stream() != a.stream());
  CHECK(a.to_string() == "42:a/b");
}

TEST_CASE("rng produces exact moments at scale") {
  Rng rng(SeedPath(7).child("moments"));
  const int n = 200000;
  KahanSum sum, sum2;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum.add(z);
    sum2.add(z * z);
  }
  CHECK(std::abs(sum.value() / n) < 0.01);
  CHECK(std::abs(sum2.value() / n - 1.0) < 0.02);
}

TEST_CASE("point mass sampling returns the location") {
  const auto spec = DistributionSpec::point_mass_at({3.5});
  const auto s = sample(spec, 4, SeedPath(1).child("pm"));
  REQUIRE(s.n == 4);
  for (int i = 0; i < 4; ++i) CHECK(s.at(i, 0) == 3.5);
}

TEST_CASE("uniform box sample mean matches the analytic mean") {
  const auto spec = DistributionSpec::uniform_box_on({0.0}, {1.0});
  const auto s = sample(spec, 100000, SeedPath(2).child("u"));
  CHECK(std::abs(mean(s.points) - 0.5) < 0.01);
}

TEST_CASE("sampling is a pure function of the seed path") {
  const auto spec = DistributionSpec::gaussian_iso({0.0, 1.0}, 1.5);
  const SeedPath seed = derive_seed(9, {"x", "3"});
  const auto a = sample(spec, 50, seed);
  const auto b = sample(spec, 50, seed);
  CHECK(a.points == b.points);
  const auto c = sample(spec, 50, derive_seed(9, {"x", "4"}));
  CHECK(a.points != c.points);
}

TEST_CASE("truncated gaussian stays inside the window") {
  const auto spec = DistributionSpec::gaussian_iso({0.5}, 1.0, 3.0);
  CHECK(spec.compactly_supported());
  const auto s = sample(spec, 5000, SeedPath(3).child("t"));
  for (int i = 0; i < s.n; ++i) {
    CHECK(s.at(i, 0) <= 3.5);
    CHECK(s.at(i, 0) >= -2.5);
  }
}

TEST_CASE("empirical weights are uniform and atoms are kept distinct") {
  Sample s;
  s.n = 2;
  s.d = 1;
  s.points = {0.0, 1.0};
  const auto mu = empirical(s);
  CHECK(mu.weights == std::vector<double>{0.5, 0.5});
  CHECK(mu.origin_index == std::vector<int>{0, 1});

  Sample dup;
  dup.n = 3;
  dup.d = 1;
  dup.points = {2.0, 2.0, 2.0};
  const auto nu = empirical(dup);
  CHECK(nu.k == 3);  // duplicates are not merged

  Sample one;
  one.n = 1;
  one.d = 1;
  one.points = {0.25};
  CHECK(empirical(one).weights[0] == 1.0);
}

TEST_CASE("smooth_augment cardinality, mass preservation, origin mapping") {
  Sample s;
  s.n = 3;
  s.d = 1;
  s.points = {0.0, 1.0, 5.0};
  const auto mu = empirical(s);

  const auto cfg1 = SmoothingConfig::make(2.0, 0.7, 1);
  const auto a1 = smooth_augment(mu, cfg1, SeedPath(4).child("m1"));
  CHECK(a1.k == 3);
  CHECK(a1.weights == mu.weights);

  const auto cfg = SmoothingConfig::make(2.0, 0.7, 8);
  const auto a = smooth_augment(mu, cfg, SeedPath(4).child("m8"));
  a.validate();
  CHECK(a.k == 24);
  // Per-origin mass is preserved.
  std::vector<double> per_origin(3, 0.0);
  for (int c = 0; c < a.k; ++c) per_origin[a.origin_index[c]] += a.weights[c];
  for (double w : per_origin) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("smooth_augment children concentrate correctly") {
  Sample s;
  s.n = 1;
  s.d = 1;
  s.points = {0.0};
  const auto mu = empirical(s);
  const int m = 100000;
  const auto cfg = SmoothingConfig::make(2.0, 1.0, m);
  const auto a = smooth_augment(mu, cfg, SeedPath(5).child("var"));
  CHECK(std::abs(sample_variance(a.points) - 1.0) < 0.02);
  CHECK(std::abs(mean(a.points)) < 4.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("pool stacks X rows then Y rows with uniform pooled weights") {
  Sample x, y;
  x.n = y.n = 2;
  x.d = y.d = 1;
  x.points = {0.0, 1.0};
  y.points = {2.0, 3.0};
  const auto pooled = pool(x, y);
  CHECK(pooled.n == 4);
  CHECK(pooled.points == std::vector<double>{0.0, 1.0, 2.0, 3.0});
  const auto emp = empirical(pooled);
  for (double w : emp.weights) CHECK(w == doctest::Approx(0.25));

  Sample z = x;
  z.n = 3;
  z.points = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(pool(x, z), ConfigError);
}

TEST_CASE("moment condition report") {
  const auto cfg = SmoothingConfig::make(2.0, 1.0, 4);  // bound sigma/sqrt(1) = 1
  const auto box = DistributionSpec::uniform_box_on({0.0}, {1.0});
  CHECK(check_moment_condition(box, cfg).status == MomentStatus::satisfied);

  auto g = DistributionSpec::gaussian_iso({0.0}, 1.0);
  g.sub_gaussian_psi2 = 2.0;  // 2 sigma >= sigma/sqrt(p-1)
  CHECK(check_moment_condition(g, cfg).status == MomentStatus::not_satisfied);

  g.sub_gaussian_psi2.reset();
  CHECK(check_moment_condition(g, cfg).status == MomentStatus::unknown);

  g.sub_gaussian_psi2 = 0.5;
  CHECK(check_moment_condition(g, cfg).status == MomentStatus::satisfied);
}

TEST_CASE("spec json round trip") {
  auto spec = DistributionSpec::gaussian_mixture_of(
      {0.25, 0.75}, {{0.0, 1.0}, {2.0, -1.0}}, {0.5, 1.5});
  spec.sub_gaussian_psi2 = 0.9;
  const auto j = spec.to_json();
  const auto back = DistributionSpec::from_json(j);
  CHECK(back.family == Family::gaussian_mixture);
  CHECK(back.weights == spec.weights);
  CHECK(back.locations == spec.locations);
  CHECK(back.scales == spec.scales);
  CHECK(back.sub_gaussian_psi2 == spec.sub_gaussian_psi2);

  // Invalid: weights off by more than the tolerance.
  nlohmann::json bad = j;
  bad["params"]["weights"] = {0.2, 0.75};
  CHECK_THROWS_AS(DistributionSpec::from_json(bad), ConfigError);
}

TEST_CASE("smoothing config validation") {
  CHECK_THROWS_AS(SmoothingConfig::make(1.0, 0.5, 4), ConfigError);
  CHECK_THROWS_AS(SmoothingConfig::make(2.0, 0.0, 4), ConfigError);
  CHECK_THROWS_AS(SmoothingConfig::make(2.0, 0.5, 0), ConfigError);
  const auto cfg = SmoothingConfig::make(3.0, 0.5, 4);
  CHECK(cfg.q == doctest::Approx(1.5).epsilon(1e-14));
}
