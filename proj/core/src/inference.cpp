#include "smoothwass/inference.hpp"

#include <algorithm>
#include <cmath>

#include "smoothwass/errors.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

Sample resample_rows(const Sample& x, Rng& rng, int n_out) {
  Sample out;
  out.n = n_out;
  out.d = x.d;
  out.points.resize(static_cast<std::size_t>(n_out) * x.d);
  for (int r = 0; r < n_out; ++r) {
    const auto i = static_cast<int>(rng.uniform_index(x.n));
    for (int a = 0; a < x.d; ++a)
      out.points[static_cast<std::size_t>(r) * x.d + a] = x.at(i, a);
  }
  out.spec_label = x.spec_label;
  out.seed_path = x.seed_path;
  return out;
}

double w_value(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
  double cost;
  if (a.d == 1) {
    cost = detail::monotone_cost(detail::sort_1d(a), detail::sort_1d(b), p);
  } else {
    cost = solve_exact(a, b, p).plan.primal_cost;
  }
  return cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / p);
}

BootstrapDistribution finish(std::vector<double> values, BootstrapScheme s,
                             const SeedPath& seed, bool scaled) {
  std::sort(values.begin(), values.end());
  BootstrapDistribution d;
  d.B = static_cast<int>(values.size());
  d.values = std::move(values);
  d.scheme = s;
  d.seed_path = seed;
  d.sqrt_n_scaled = scaled;
  return d;
}

}  // namespace

std::string scheme_name(BootstrapScheme s) {
  switch (s) {
    case BootstrapScheme::one_sample_null: return "one_sample_null";
    case BootstrapScheme::one_sample_alt: return "one_sample_alt";
    case BootstrapScheme::two_sample_alt: return "two_sample_alt";
    case BootstrapScheme::pooled_null: return "pooled_null";
    case BootstrapScheme::naive_null: return "naive_null";
  }
  throw ConfigError("unknown bootstrap scheme");
}

namespace detail {

double smooth_w_between(const Sample& x, const Sample& y,
                        const SmoothingConfig& cfg, const SeedPath& noise_seed,
                        bool common) {
  const DiscreteMeasure mu = empirical(x);
  const DiscreteMeasure nu = empirical(y);
  DiscreteMeasure mu_aug, nu_aug;
  if (common) {
    require(x.n == y.n, "common noise requires equal sample sizes");
    const auto z = gaussian_noise_tensor(x.n, cfg.m, x.d, noise_seed.child("xy"));
    mu_aug = smooth_augment_with(mu, cfg, z);
    nu_aug = smooth_augment_with(nu, cfg, z);
  } else {
    mu_aug = smooth_augment(mu, cfg, noise_seed.child("x"));
    nu_aug = smooth_augment(nu, cfg, noise_seed.child("y"));
  }
  return w_value(mu_aug, nu_aug, cfg.p);
}

}  // namespace detail

BootstrapDistribution bootstrap_one_sample_null(const Sample& x,
                                                const SmoothingConfig& cfg,
                                                int B,
                                                const SeedPath& seed_path) {
  x.validate();
  cfg.validate();
  require(B >= 1, "B must be positive");
  const double sqrt_n = std::sqrt(static_cast<double>(x.n));
  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample xs = resample_rows(x, rng, x.n);
    values[b] =
        sqrt_n * detail::smooth_w_between(xs, x, cfg, sb.child("noise"), false);
  }
  return finish(std::move(values), BootstrapScheme::one_sample_null, seed_path,
                true);
}

BootstrapDistribution bootstrap_one_sample_alt(const Sample& x,
                                               const Sample& nu_dense,
                                               const SmoothingConfig& cfg,
                                               int B,
                                               const SeedPath& seed_path) {
  x.validate();
  nu_dense.validate();
  cfg.validate();
  require(B >= 1, "B must be positive");
  require(x.d == nu_dense.d, "dimension mismatch");
  const double sqrt_n = std::sqrt(static_cast<double>(x.n));
  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample xs = resample_rows(x, rng, x.n);
    // One noise stream per replicate: the resample and the baseline share
    // row-keyed data noise and the nu-side noise, so identical resamples
    // give exactly zero.
    const SeedPath noise = sb.child("noise");
    const double w_star =
        detail::smooth_w_between(xs, nu_dense, cfg, noise, false);
    const double w_base =
        detail::smooth_w_between(x, nu_dense, cfg, noise, false);
    values[b] = sqrt_n * (w_star - w_base);
  }
  return finish(std::move(values), BootstrapScheme::one_sample_alt, seed_path,
                true);
}

BootstrapDistribution bootstrap_two_sample_alt(const Sample& x,
                                               const Sample& y,
                                               const SmoothingConfig& cfg,
                                               int B,
                                               const SeedPath& seed_path) {
  x.validate();
  y.validate();
  cfg.validate();
  require(B >= 1, "B must be positive");
  require(x.d == y.d, "dimension mismatch");
  require(x.n == y.n, "two-sample bootstrap requires equal sample sizes");
  const double sqrt_n = std::sqrt(static_cast<double>(x.n));
  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample xs = resample_rows(x, rng, x.n);
    const Sample ys = resample_rows(y, rng, y.n);
    const SeedPath noise = sb.child("noise");
    const double w_star = detail::smooth_w_between(xs, ys, cfg, noise, false);
    const double w_base = detail::smooth_w_between(x, y, cfg, noise, false);
    values[b] = sqrt_n * (w_star - w_base);
  }
  return finish(std::move(values), BootstrapScheme::two_sample_alt, seed_path,
                true);
}

BootstrapDistribution bootstrap_pooled_null(const Sample& x, const Sample& y,
                                            const SmoothingConfig& cfg, int B,
                                            const SeedPath& seed_path) {
  require(B >= 1, "B must be positive");
  const Sample pooled = pool(x, y);
  const int n = x.n;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample redraw = resample_rows(pooled, rng, 2 * n);
    Sample first, second;
    first.n = second.n = n;
    first.d = second.d = x.d;
    first.points.assign(redraw.points.begin(),
                        redraw.points.begin() + static_cast<std::ptrdiff_t>(n) * x.d);
    second.points.assign(redraw.points.begin() + static_cast<std::ptrdiff_t>(n) * x.d,
                         redraw.points.end());
    values[b] = sqrt_n * detail::smooth_w_between(first, second, cfg,
                                                  sb.child("noise"), true);
  }
  return finish(std::move(values), BootstrapScheme::pooled_null, seed_path,
                true);
}

BootstrapDistribution bootstrap_naive_null(const Sample& x, const Sample& y,
                                           const SmoothingConfig& cfg, int B,
                                           const SeedPath& seed_path) {
  x.validate();
  y.validate();
  require(B >= 1, "B must be positive");
  require(x.d == y.d, "dimension mismatch");
  require(x.n == y.n, "naive null bootstrap requires equal sample sizes");
  const double sqrt_n = std::sqrt(static_cast<double>(x.n));
  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample xs = resample_rows(x, rng, x.n);
    const Sample ys = resample_rows(y, rng, y.n);
    values[b] = sqrt_n * detail::smooth_w_between(xs, ys, cfg,
                                                  sb.child("noise"), true);
  }
  return finish(std::move(values), BootstrapScheme::naive_null, seed_path,
                true);
}

double quantile(const BootstrapDistribution& dist, double alpha) {
  require(!dist.values.empty(), "quantile: empty distribution");
  require(alpha >= 0.0 && alpha <= 1.0, "quantile: alpha must be in [0, 1]");
  return lower_quantile_sorted(dist.values, alpha);
}

Interval confidence_interval(const Sample& x, const Sample& y,
                             const SmoothingConfig& cfg, double alpha, int B,
                             const SeedPath& seed_path) {
  x.validate();
  y.validate();
  cfg.validate();
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie strictly in (0, 1)");
  require(B >= 1, "B must be positive");
  require(x.d == y.d, "dimension mismatch");
  const bool common = x.n == y.n;

  const double w_hat = detail::smooth_w_between(
      x, y, cfg, seed_path.child("estimate").child("noise"), common);

  std::vector<double> values(B);
  for (int b = 0; b < B; ++b) {
    const SeedPath sb = seed_path.child("boot").child("rep").child(b);
    Rng rng(sb.child("resample"));
    const Sample xs = resample_rows(x, rng, x.n);
    const Sample ys = resample_rows(y, rng, y.n);
    values[b] =
        detail::smooth_w_between(xs, ys, cfg, sb.child("noise"), common);
  }
  std::sort(values.begin(), values.end());
  const double z_lo = lower_quantile_sorted(values, alpha / 2.0);
  const double z_hi = lower_quantile_sorted(values, 1.0 - alpha / 2.0);

  Interval ci;
  ci.lo = std::max(0.0, 2.0 * w_hat - z_hi);
  ci.hi = std::max(ci.lo, 2.0 * w_hat - z_lo);
  return ci;
}

TestResult equality_test(const Sample& x, const Sample& y,
                         const SmoothingConfig& cfg, double alpha, int B,
                         const SeedPath& seed_path) {
  x.validate();
  y.validate();
  cfg.validate();
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie strictly in (0, 1)");
  require(x.n == y.n, "equality test requires equal sample sizes");
  require(x.d == y.d, "dimension mismatch");

  const double sqrt_n = std::sqrt(static_cast<double>(x.n));
  TestResult r;
  r.alpha = alpha;
  r.statistic = sqrt_n * detail::smooth_w_between(
                             x, y, cfg,
                             seed_path.child("statistic").child("noise"), true);
  const BootstrapDistribution boot =
      bootstrap_pooled_null(x, y, cfg, B, seed_path.child("pooled"));
  r.critical_value = quantile(boot, 1.0 - alpha);
  int count = 0;
  for (double v : boot.values)
    if (v >= r.statistic) ++count;
  r.p_value = (1.0 + count) / static_cast<double>(boot.B + 1);
  r.reject = r.statistic > r.critical_value;
  return r;
}

}  // namespace smoothwass
