#include "smoothwass/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "smoothwass/errors.hpp"

namespace smoothwass {

double kahan_total(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ConfigError("mean: empty input");
  return kahan_total(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw ConfigError("sample_variance: need at least two values");
  const double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(n - 1);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw ConfigError("median: empty input");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double lower_quantile_sorted(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw ConfigError("quantile: empty distribution");
  const auto n = static_cast<std::ptrdiff_t>(sorted.size());
  std::ptrdiff_t idx =
      static_cast<std::ptrdiff_t>(std::ceil(alpha * static_cast<double>(n))) -
      1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, n - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty input");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double ks = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / na -
                               static_cast<double>(j) / nb));
  }
  return ks;
}

double ks_vs_normal(std::span<const double> values, double mu, double sd) {
  if (values.empty()) throw ConfigError("ks_vs_normal: empty input");
  if (!(sd > 0)) throw ConfigError("ks_vs_normal: sd must be positive");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf((v[i] - mu) / sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max({ks, std::abs(f - lo), std::abs(f - hi)});
  }
  return ks;
}

}  // namespace smoothwass
