#ifndef SMOOTHWASS_STATS_HPP_
#define SMOOTHWASS_STATS_HPP_

#include <span>
#include <vector>

namespace smoothwass {

// Kahan compensated accumulator; summation order fixed by the caller.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

double kahan_total(std::span<const double> xs);
double mean(std::span<const double> xs);

// Unbiased sample variance (1/(n-1)), compensated two-pass.
double sample_variance(std::span<const double> xs);

double median(std::vector<double> xs);

// Lower empirical quantile over a sorted vector: sorted[ceil(alpha*n)-1],
// index clamped to [0, n-1].
double lower_quantile_sorted(std::span<const double> sorted, double alpha);

double normal_cdf(double z);

// sup_x |F_a(x) - F_b(x)| between the empirical CDFs of two samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// sup_x |F_hat(x) - Phi((x-mean)/sd)|.
double ks_vs_normal(std::span<const double> values, double mu, double sd);

}  // namespace smoothwass

#endif  // SMOOTHWASS_STATS_HPP_
