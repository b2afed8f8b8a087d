#ifndef SMOOTHWASS_INFERENCE_HPP_
#define SMOOTHWASS_INFERENCE_HPP_

#include <vector>

#include "smoothwass/estimator.hpp"
#include "smoothwass/measures.hpp"

namespace smoothwass {

enum class BootstrapScheme {
  one_sample_null,
  one_sample_alt,
  two_sample_alt,
  pooled_null,
  naive_null,
};

std::string scheme_name(BootstrapScheme s);

// Sorted replicate statistics from one bootstrap run.
struct BootstrapDistribution {
  std::vector<double> values;  // ascending
  int B = 0;
  BootstrapScheme scheme = BootstrapScheme::one_sample_null;
  SeedPath seed_path;
  bool sqrt_n_scaled = true;
};

// sqrt(n) W(x*, x) over B resamples of x, fresh noise per replicate.
BootstrapDistribution bootstrap_one_sample_null(const Sample& x,
                                                const SmoothingConfig& cfg,
                                                int B,
                                                const SeedPath& seed_path);

// sqrt(n) (W(x*, nu) - W(x, nu)); the baseline is recomputed with the
// replicate's own noise so the difference isolates resampling variation.
// nu_dense is the frozen dense representation of the known population.
BootstrapDistribution bootstrap_one_sample_alt(const Sample& x,
                                               const Sample& nu_dense,
                                               const SmoothingConfig& cfg,
                                               int B,
                                               const SeedPath& seed_path);

// sqrt(n) (W(x*, y*) - W(x, y)) with per-replicate matched noise.
BootstrapDistribution bootstrap_two_sample_alt(const Sample& x,
                                               const Sample& y,
                                               const SmoothingConfig& cfg,
                                               int B,
                                               const SeedPath& seed_path);

// sqrt(n) W(r*_1, r*_2) where 2n points are redrawn from the pooled sample
// and split n/n.  The correct scheme for two-sample null inference.
BootstrapDistribution bootstrap_pooled_null(const Sample& x, const Sample& y,
                                            const SmoothingConfig& cfg, int B,
                                            const SeedPath& seed_path);

// sqrt(n) W(x*, y*) from per-sample resampling.  Known to be inconsistent
// for the two-sample null; exposed only to demonstrate the failure.
BootstrapDistribution bootstrap_naive_null(const Sample& x, const Sample& y,
                                           const SmoothingConfig& cfg, int B,
                                           const SeedPath& seed_path);

// Lower empirical quantile: values[ceil(alpha B) - 1], clamped.
double quantile(const BootstrapDistribution& dist, double alpha);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Bootstrap percentile-type interval [2W - z_{1-a/2}, 2W - z_{a/2}] with z
// the conditional quantiles of the unscaled resampled distance; the lower
// endpoint is clamped at zero.
Interval confidence_interval(const Sample& x, const Sample& y,
                             const SmoothingConfig& cfg, double alpha, int B,
                             const SeedPath& seed_path);

struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.0;
};

// Equality-of-distributions test: statistic sqrt(n) W(x, y), critical value
// the (1-alpha) pooled-bootstrap quantile.
TestResult equality_test(const Sample& x, const Sample& y,
                         const SmoothingConfig& cfg, double alpha, int B,
                         const SeedPath& seed_path);

namespace detail {

// Distance between noise-augmented empiricals of two samples, value only.
// When common is true both sides share one row-keyed noise tensor.
double smooth_w_between(const Sample& x, const Sample& y,
                        const SmoothingConfig& cfg, const SeedPath& noise_seed,
                        bool common);

}  // namespace detail

}  // namespace smoothwass

#endif  // SMOOTHWASS_INFERENCE_HPP_
