#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "smoothwass/errors.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/rng.hpp"

using namespace smoothwass;
using testing::make_measure;
using testing::random_measure;
using testing::random_rational_measure;
using testing::transport_dp_oracle;
using testing::uniform_atoms_1d;

namespace {

// Feasibility, complementary slackness, marginals and the duality gap, the
// full optimality certificate for a solution.
void check_certificate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       double p, const OtSolution& sol) {
  const auto& plan = sol.plan;
  const auto& duals = sol.duals;
  REQUIRE(static_cast<int>(duals.g.size()) == mu.k);
  REQUIRE(static_cast<int>(duals.gc.size()) == nu.k);

  for (int i = 0; i < mu.k; ++i) {
    for (int j = 0; j < nu.k; ++j) {
      const double c = transport_cost(
          euclidean_dist(mu.points.data() + i * mu.d,
                         nu.points.data() + j * nu.d, mu.d),
          p);
      CHECK(duals.g[i] + duals.gc[j] <= c + 1e-9);
    }
  }
  std::vector<double> row(mu.k, 0.0), col(nu.k, 0.0);
  for (const auto& e : plan.entries) {
    CHECK(e.mass > 0.0);
    row[e.i] += e.mass;
    col[e.j] += e.mass;
    if (e.mass > 1e-12) {
      const double c = transport_cost(
          euclidean_dist(mu.points.data() + e.i * mu.d,
                         nu.points.data() + e.j * nu.d, mu.d),
          p);
      CHECK(std::abs(duals.g[e.i] + duals.gc[e.j] - c) <= 1e-8);
    }
  }
  for (int i = 0; i < mu.k; ++i)
    CHECK(std::abs(row[i] - mu.weights[i]) <= 1e-9);
  for (int j = 0; j < nu.k; ++j)
    CHECK(std::abs(col[j] - nu.weights[j]) <= 1e-9);
  CHECK(static_cast<int>(plan.entries.size()) <= mu.k + nu.k - 1);
  CHECK(duality_gap(plan, duals, mu, nu) <= 1e-8 * (1.0 + plan.primal_cost));
  CHECK(duals.g[0] == 0.0);
  // The reported gc is the c-transform of g (canonical representative).
  const auto gc = c_transform(duals.g, mu, nu, p);
  for (int j = 0; j < nu.k; ++j) CHECK(std::abs(gc[j] - duals.gc[j]) <= 1e-9);
}

}  // namespace

TEST_CASE("single atom pair") {
  const auto mu = uniform_atoms_1d({0.0});
  const auto nu = uniform_atoms_1d({1.0});
  for (const auto method : {OtMethod::monotone_1d, OtMethod::network_simplex}) {
    const auto sol = solve_exact(mu, nu, 2.0, method);
    CHECK(sol.plan.primal_cost == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(sol.plan.entries.size() == 1);
    CHECK(sol.plan.entries[0].mass == doctest::Approx(1.0));
    check_certificate(mu, nu, 2.0, sol);
  }
}

TEST_CASE("identical measures cost zero, including duplicate atoms") {
  const auto mu = uniform_atoms_1d({0.3, 0.3, 1.0, -2.0});
  for (const auto method : {OtMethod::monotone_1d, OtMethod::network_simplex}) {
    const auto sol = solve_exact(mu, mu, 2.0, method);
    CHECK(sol.plan.primal_cost == doctest::Approx(0.0));
    check_certificate(mu, mu, 2.0, sol);
  }
}

TEST_CASE("two-atom monotone matching") {
  const auto mu = uniform_atoms_1d({0.0, 2.0});
  const auto nu = uniform_atoms_1d({1.0, 3.0});
  for (const auto method : {OtMethod::monotone_1d, OtMethod::network_simplex}) {
    const auto sol = solve_exact(mu, nu, 2.0, method);
    CHECK(sol.plan.primal_cost == doctest::Approx(1.0).epsilon(1e-12));
    check_certificate(mu, nu, 2.0, sol);
  }
  CHECK(wasserstein_1d(mu, nu, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wasserstein_1d basics") {
  const auto mu = uniform_atoms_1d({0.0, 1.0});
  CHECK(wasserstein_1d(mu, mu, 2.0) == 0.0);
  const auto nu = uniform_atoms_1d({1.0, 2.0});
  CHECK(wasserstein_1d(mu, nu, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  DiscreteMeasure bad = mu;
  bad.d = 2;
  bad.k = 1;
  CHECK_THROWS_AS(wasserstein_1d(bad, bad, 2.0), ConfigError);
}

TEST_CASE("quantile formula agrees with the simplex LP on random instances") {
  Rng rng(SeedPath(11).child("w1d"));
  for (int t = 0; t < 100; ++t) {
    const double p = (t % 3 == 0) ? 1.5 : (t % 3 == 1 ? 2.0 : 3.0);
    const int k = 2 + static_cast<int>(rng.uniform_index(49));
    const int l = 2 + static_cast<int>(rng.uniform_index(49));
    const auto mu = random_measure(rng, k);
    const auto nu = random_measure(rng, l);
    const auto lp = solve_exact(mu, nu, p, OtMethod::network_simplex);
    const double w_lp = std::pow(lp.plan.primal_cost, 1.0 / p);
    CHECK(std::abs(wasserstein_1d(mu, nu, p) - w_lp) <= 1e-10);
  }
}

TEST_CASE("both solvers match the exhaustive DP oracle, including 5x7") {
  Rng rng(SeedPath(12).child("dp"));
  for (int t = 0; t < 25; ++t) {
    const int k = t == 0 ? 5 : 2 + static_cast<int>(rng.uniform_index(4));
    const int l = t == 0 ? 7 : 2 + static_cast<int>(rng.uniform_index(4));
    const int total = std::max(k, l) + 2 + static_cast<int>(rng.uniform_index(6));
    std::vector<int> su, du;
    const auto mu = random_rational_measure(rng, k, total, &su);
    const auto nu = random_rational_measure(rng, l, total, &du);
    const double p = t % 2 == 0 ? 2.0 : 1.5;

    std::vector<std::vector<double>> cost(k, std::vector<double>(l));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < l; ++j)
        cost[i][j] = transport_cost(std::abs(mu.points[i] - nu.points[j]), p);
    const double oracle = transport_dp_oracle(su, du, cost) / total;

    const auto lp = solve_exact(mu, nu, p, OtMethod::network_simplex);
    CHECK(std::abs(lp.plan.primal_cost - oracle) <= 1e-10 * (1.0 + oracle));
    const auto mono = solve_exact(mu, nu, p, OtMethod::monotone_1d);
    CHECK(std::abs(mono.plan.primal_cost - oracle) <= 1e-10 * (1.0 + oracle));
    check_certificate(mu, nu, p, lp);
    check_certificate(mu, nu, p, mono);
  }
}

TEST_CASE("certificates hold on degenerate equal-weight instances") {
  Rng rng(SeedPath(13).child("deg"));
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_index(40));
    std::vector<double> xs(n), ys(n);
    for (auto& v : xs) v = rng.normal();
    for (auto& v : ys) v = rng.normal();
    if (t % 4 == 0) {
      ys = xs;  // zero-distance pairs
      ys[0] += 0.5;
    }
    const auto mu = uniform_atoms_1d(xs);
    const auto nu = uniform_atoms_1d(ys);
    const double p = t % 3 == 0 ? 3.0 : 2.0;
    const auto sol = solve_exact(mu, nu, p, OtMethod::monotone_1d);
    check_certificate(mu, nu, p, sol);
    const auto lp = solve_exact(mu, nu, p, OtMethod::network_simplex);
    check_certificate(mu, nu, p, lp);
    CHECK(std::abs(lp.plan.primal_cost - sol.plan.primal_cost) <=
          1e-10 * (1.0 + lp.plan.primal_cost));
  }
}

TEST_CASE("two dimensional instances match nothing but themselves") {
  // d = 2 goes through the simplex; certificate checks only.
  Rng rng(SeedPath(14).child("d2"));
  for (int t = 0; t < 10; ++t) {
    const auto mu = random_measure(rng, 8, 2);
    const auto nu = random_measure(rng, 11, 2);
    const auto sol = solve_exact(mu, nu, 2.0);
    check_certificate(mu, nu, 2.0, sol);
  }
}

TEST_CASE("metric axioms on random 1-D instances") {
  Rng rng(SeedPath(15).child("metric"));
  for (int t = 0; t < 25; ++t) {
    const double p = t % 2 == 0 ? 2.0 : 1.5;
    const auto a = random_measure(rng, 2 + static_cast<int>(rng.uniform_index(28)));
    const auto b = random_measure(rng, 2 + static_cast<int>(rng.uniform_index(28)));
    const auto c = random_measure(rng, 2 + static_cast<int>(rng.uniform_index(28)));
    const double wab = wasserstein_1d(a, b, p);
    const double wba = wasserstein_1d(b, a, p);
    CHECK(std::abs(wab - wba) <= 1e-9);
    const double wac = wasserstein_1d(a, c, p);
    const double wcb = wasserstein_1d(c, b, p);
    CHECK(wab <= wac + wcb + 1e-8);
  }
}

TEST_CASE("c-transform definition and algebra") {
  const std::vector<double> x{0.0};
  const std::vector<double> y{1.0};
  const std::vector<double> g{0.0};
  const auto h = c_transform(g, x, 1, y, 1, 1, 2.0);
  REQUIRE(h.size() == 1);
  CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(SeedPath(16).child("ct"));
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + static_cast<int>(rng.uniform_index(10));
    const int l = 2 + static_cast<int>(rng.uniform_index(10));
    const double p = t % 3 == 0 ? 1.5 : (t % 3 == 1 ? 2.0 : 3.0);
    const auto mu = random_measure(rng, k);
    const auto nu = random_measure(rng, l);
    std::vector<double> pot(k);
    for (auto& v : pot) v = rng.normal();

    // Shift equivariance: ct(g + a) = ct(g) - a, exactly.
    const double shift = 0.625;  // dyadic, keeps float arithmetic exact
    auto shifted = pot;
    for (auto& v : shifted) v += shift;
    const auto hs = c_transform(shifted, mu, nu, p);
    const auto h0 = c_transform(pot, mu, nu, p);
    for (int j = 0; j < l; ++j)
      CHECK(std::abs(hs[j] - (h0[j] - shift)) <= 1e-12);

    // Triple transform equals single transform (to the last few ulps).
    const auto gc = c_transform(pot, mu, nu, p);
    const auto gcc = c_transform(gc, nu, mu, p);
    const auto gccc = c_transform(gcc, mu, nu, p);
    for (int j = 0; j < l; ++j) CHECK(std::abs(gccc[j] - gc[j]) <= 1e-12);
  }
}

TEST_CASE("duality gap responds linearly to dual perturbations") {
  const auto mu = make_measure({0.0, 1.0}, {0.25, 0.75});
  const auto nu = uniform_atoms_1d({0.5, 2.0});
  auto sol = solve_exact(mu, nu, 2.0);
  CHECK(duality_gap(sol.plan, sol.duals, mu, nu) <= 1e-8);

  auto bumped = sol.duals;
  bumped.g[0] += 1.0;
  const double gap = duality_gap(sol.plan, bumped, mu, nu);
  CHECK(gap == doctest::Approx(mu.weights[0]).epsilon(1e-12));

  // Zero-distance degenerate case: mu = nu with zero potentials.
  const auto same = solve_exact(mu, mu, 2.0);
  DualPotentials zero;
  zero.g.assign(mu.k, 0.0);
  zero.gc.assign(mu.k, 0.0);
  CHECK(duality_gap(same.plan, zero, mu, mu) == doctest::Approx(0.0));
}

TEST_CASE("dual potential Lipschitz bound on the support") {
  Rng rng(SeedPath(17).child("lip"));
  for (int t = 0; t < 20; ++t) {
    const double p = t % 2 == 0 ? 2.0 : 3.0;
    const auto mu = random_measure(rng, 12);
    const auto nu = random_measure(rng, 9);
    const auto sol = solve_exact(mu, nu, p, OtMethod::network_simplex);
    double big = 0.0;
    for (int i = 0; i < mu.k; ++i)
      for (int j = 0; j < nu.k; ++j)
        big = std::max(big, std::abs(mu.points[i] - nu.points[j]));
    const double lip = p * std::pow(big, p - 1.0);
    for (int i = 0; i < mu.k; ++i)
      for (int k2 = 0; k2 < mu.k; ++k2)
        CHECK(sol.duals.g[i] - sol.duals.g[k2] <=
              lip * std::abs(mu.points[i] - mu.points[k2]) + 1e-8);
  }
}

TEST_CASE("solver input validation") {
  const auto mu = uniform_atoms_1d({0.0});
  DiscreteMeasure empty;
  CHECK_THROWS_AS(solve_exact(mu, empty, 2.0), ConfigError);
  CHECK_THROWS_AS(solve_exact(mu, mu, 1.0), ConfigError);
  DiscreteMeasure d2 = mu;
  d2.d = 2;
  d2.points = {0.0, 0.0};
  CHECK_THROWS_AS(solve_exact(mu, d2, 2.0), ConfigError);
  CHECK_THROWS_AS(solve_exact(d2, d2, 2.0, OtMethod::monotone_1d), ConfigError);
}
