#ifndef SMOOTHWASS_MEASURES_HPP_
#define SMOOTHWASS_MEASURES_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smoothwass/rng.hpp"

namespace smoothwass {

enum class Family {
  point_mass,
  gaussian,
  uniform_box,
  gaussian_mixture,
  uniform_mixture,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// A sampleable distribution on R^d, d <= 3.  Mixtures are stored as
// component lists; the simple families are one-component mixtures.
// `truncate`, when positive, restricts Gaussian components to
// |x - mean| <= truncate (d = 1 only), which makes the support compact.
struct DistributionSpec {
  Family family = Family::point_mass;
  int dim = 1;
  std::vector<double> weights;                 // one weight per component
  std::vector<std::vector<double>> locations;  // point_mass / gaussian means
  std::vector<double> scales;                  // gaussian isotropic sigmas
  std::vector<std::vector<double>> lo;         // uniform box corners
  std::vector<std::vector<double>> hi;
  double truncate = 0.0;
  std::optional<double> sub_gaussian_psi2;

  void validate() const;
  bool compactly_supported() const;

  nlohmann::json to_json() const;
  static DistributionSpec from_json(const nlohmann::json& j);

  static DistributionSpec point_mass_at(std::vector<double> loc);
  static DistributionSpec gaussian_iso(std::vector<double> mean, double scale,
                                       double truncate = 0.0);
  static DistributionSpec uniform_box_on(std::vector<double> lo,
                                         std::vector<double> hi);
  static DistributionSpec gaussian_mixture_of(
      std::vector<double> weights, std::vector<std::vector<double>> means,
      std::vector<double> scales);
  static DistributionSpec uniform_mixture_of(
      std::vector<double> weights, std::vector<std::vector<double>> lo,
      std::vector<std::vector<double>> hi);
};

// n points in R^d, row-major.
struct Sample {
  std::vector<double> points;
  int n = 0;
  int d = 1;
  std::string spec_label;
  SeedPath seed_path;

  double at(int i, int k) const { return points[static_cast<size_t>(i) * d + k]; }
  void validate() const;
};

// Weighted point cloud; origin_index maps atoms back to the sample row
// they were generated from (identity for plain empiricals).
struct DiscreteMeasure {
  std::vector<double> points;
  int k = 0;
  int d = 1;
  std::vector<double> weights;
  std::vector<int> origin_index;

  double at(int i, int a) const { return points[static_cast<size_t>(i) * d + a]; }
  void validate() const;
};

struct SmoothingConfig {
  double p = 2.0;
  double q = 2.0;   // conjugate index, 1/p + 1/q = 1
  double sigma = 1.0;
  int m = 32;       // noise copies per support point

  static SmoothingConfig make(double p, double sigma, int m);
  void validate() const;

  nlohmann::json to_json() const;
  static SmoothingConfig from_json(const nlohmann::json& j);
};

Sample sample(const DistributionSpec& spec, int n, const SeedPath& seed_path);

DiscreteMeasure empirical(const Sample& s);

// k*m*d standard normals, laid out child-major: ((i*m + j)*d + a).
std::vector<double> gaussian_noise_tensor(int k, int m, int d,
                                          const SeedPath& seed_path);

// Replace every atom x_i by m children x_i + sigma * Z_ij with weight w_i/m.
DiscreteMeasure smooth_augment(const DiscreteMeasure& mu,
                               const SmoothingConfig& cfg,
                               const SeedPath& seed_path);

// Same, with a caller-provided noise tensor (for common random numbers).
DiscreteMeasure smooth_augment_with(const DiscreteMeasure& mu,
                                    const SmoothingConfig& cfg,
                                    std::span<const double> noise);

// 2n rows: X rows then Y rows.
Sample pool(const Sample& x, const Sample& y);

enum class MomentStatus { satisfied, not_satisfied, unknown };

struct MomentReport {
  MomentStatus status = MomentStatus::unknown;
  std::string detail;
};

// Advisory check of the sufficient moment condition for the CLT regime:
// compact support always passes; a declared psi2 bound passes iff
// psi2 < sigma / sqrt(p - 1).  Never blocks execution.
MomentReport check_moment_condition(const DistributionSpec& spec,
                                    const SmoothingConfig& cfg);

}  // namespace smoothwass

#endif  // SMOOTHWASS_MEASURES_HPP_
