#include "smoothwass/estimator.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "smoothwass/errors.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

nlohmann::json SmoothDistanceEstimate::to_json() const {
  return {{"value_wp", value_wp}, {"value_sp", value_sp}, {"p", cfg.p},
          {"sigma", cfg.sigma},   {"m", cfg.m},           {"n", n_mu},
          {"n_y", n_nu},          {"seed_path", seed_path.to_string()}};
}

SmoothDistanceEstimate estimate_swd(const Sample& x, const Sample& y,
                                    const SmoothingConfig& cfg,
                                    const SeedPath& seed_path,
                                    bool common_noise) {
  x.validate();
  y.validate();
  cfg.validate();
  if (x.d != y.d) throw ConfigError("estimate_swd: dimension mismatch");
  if (common_noise && x.n != y.n)
    throw ConfigError("estimate_swd: common noise requires equal sample sizes");

  const DiscreteMeasure mu = empirical(x);
  const DiscreteMeasure nu = empirical(y);

  const SeedPath noise_seed = seed_path.child("noise");
  DiscreteMeasure mu_aug, nu_aug;
  if (common_noise) {
    const auto z = gaussian_noise_tensor(x.n, cfg.m, x.d, noise_seed.child("xy"));
    mu_aug = smooth_augment_with(mu, cfg, z);
    nu_aug = smooth_augment_with(nu, cfg, z);
  } else {
    mu_aug = smooth_augment(mu, cfg, noise_seed.child("x"));
    nu_aug = smooth_augment(nu, cfg, noise_seed.child("y"));
  }

  return estimate_from_augmented(mu_aug, x.n, nu_aug, y.n, cfg, seed_path);
}

SmoothDistanceEstimate estimate_from_augmented(const DiscreteMeasure& mu_aug,
                                               int n_mu,
                                               const DiscreteMeasure& nu_aug,
                                               int n_nu,
                                               const SmoothingConfig& cfg,
                                               const SeedPath& seed_path) {
  if (mu_aug.origin_index.empty() || nu_aug.origin_index.empty())
    throw ConfigError("estimate_from_augmented: origin maps are required");
  OtSolution sol = solve_exact(mu_aug, nu_aug, cfg.p);

  SmoothDistanceEstimate est;
  est.value_sp = sol.plan.primal_cost;
  est.value_wp = est.value_sp <= 0.0
                     ? 0.0
                     : std::exp(std::log(est.value_sp) / cfg.p);
  est.plan = std::move(sol.plan);
  est.duals = std::move(sol.duals);
  est.cfg = cfg;
  est.origin_mu = mu_aug.origin_index;
  est.origin_nu = nu_aug.origin_index;
  est.n_mu = n_mu;
  est.n_nu = n_nu;
  est.seed_path = seed_path;
  return est;
}

std::vector<double> barycentric_potential(const DualPotentials& duals,
                                          const std::vector<int>& origin_index,
                                          Side side, int n_origin) {
  const std::vector<double>& vals = side == Side::source ? duals.g : duals.gc;
  if (origin_index.size() != vals.size())
    throw ConfigError("barycentric_potential: origin map does not cover duals");
  std::vector<double> sum(n_origin, 0.0);
  std::vector<int> count(n_origin, 0);
  for (std::size_t c = 0; c < vals.size(); ++c) {
    const int i = origin_index[c];
    if (i < 0 || i >= n_origin)
      throw ConfigError("barycentric_potential: origin index out of range");
    sum[i] += vals[c];
    ++count[i];
  }
  for (int i = 0; i < n_origin; ++i) {
    if (count[i] == 0)
      throw ConfigError("barycentric_potential: origin with no children");
    sum[i] /= static_cast<double>(count[i]);
  }
  return sum;
}

VarianceEstimate plugin_variance(const SmoothDistanceEstimate& est,
                                 VarianceMode mode) {
  if (est.value_wp <= 1e-8)
    throw DegenerateNullError(
        "plugin_variance: estimate is at the null (W ~ 0); the alternative "
        "variance formula is invalid");
  const double p = est.cfg.p;
  VarianceEstimate v;
  v.denominator = p * p * std::pow(est.value_wp, 2.0 * (p - 1.0));
  const auto gbar =
      barycentric_potential(est.duals, est.origin_mu, Side::source, est.n_mu);
  v.var_g = sample_variance(gbar);
  if (mode == VarianceMode::two_sample) {
    const auto gcbar = barycentric_potential(est.duals, est.origin_nu,
                                             Side::target, est.n_nu);
    v.var_gc = sample_variance(gcbar);
  }
  v.v_squared = (v.var_g + v.var_gc) / v.denominator;
  return v;
}

}  // namespace smoothwass
