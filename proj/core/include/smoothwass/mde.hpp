#ifndef SMOOTHWASS_MDE_HPP_
#define SMOOTHWASS_MDE_HPP_

#include <span>
#include <string>
#include <vector>

#include "smoothwass/estimator.hpp"
#include "smoothwass/experiment.hpp"
#include "smoothwass/measures.hpp"
#include "smoothwass/ot.hpp"

namespace smoothwass {

enum class ModelFamily {
  gaussian_location,        // N(theta, I_d), d0 = d
  gaussian_location_scale,  // N(theta_loc, s^2 I_d), theta = (loc, s), d0 = d+1
  uniform_location,         // Unif[theta, theta+1]^d, d0 = d
};

std::string model_family_name(ModelFamily f);
ModelFamily model_family_from_name(const std::string& name);

struct ParametricFamily {
  ModelFamily family = ModelFamily::gaussian_location;
  int dim = 1;
  std::vector<double> lower;  // theta box
  std::vector<double> upper;

  int d0() const;
  void validate() const;
  bool base_is_gaussian() const;

  // Maps the frozen base draws (n x dim standard normal or uniform) to a
  // model sample at theta; the transform is what makes common random
  // numbers work across theta evaluations.
  void transform(std::span<const double> theta, std::span<const double> base,
                 int n, std::vector<double>& out) const;

  void clamp(std::vector<double>& theta) const;

  static ParametricFamily make(ModelFamily f, int dim,
                               std::vector<double> lower,
                               std::vector<double> upper);
};

struct MdeOptions {
  double xtol = 1e-6;   // simplex diameter for convergence
  double ftol = 1e-10;  // value-spread stop
  int max_iter = 400;   // Nelder-Mead iterations per start
  int multistart = 5;   // quasi-random starts over the box
};

struct TraceEntry {
  std::vector<double> theta;
  double value = 0.0;
};

struct MdeResult {
  std::vector<double> theta_hat;
  double value = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  int evaluations = 0;

  nlohmann::json to_json() const;
};

// MDE objective theta -> W_p^(sigma)(empirical(x), model(theta)) with all
// randomness frozen at construction: one base draw transformed by theta and
// one noise tensor per side reused across every evaluation.
class MdeObjective {
 public:
  MdeObjective(const Sample& x, const ParametricFamily& fam,
               const SmoothingConfig& cfg, int n_model,
               const SeedPath& seed_path);

  double operator()(std::span<const double> theta) const;
  const ParametricFamily& family() const { return fam_; }

 private:
  ParametricFamily fam_;
  SmoothingConfig cfg_;
  int n_model_;
  std::vector<double> base_;        // frozen model base draws
  std::vector<double> model_noise_; // frozen augmentation noise (model side)
  detail::Sorted1D data_sorted_;    // d == 1 fast path
  DiscreteMeasure data_aug_;        // general-d path
  mutable std::vector<double> scratch_points_;
};

// Nelder-Mead over the box with reflection-clamping, multi-started from
// quasi-random box points; deterministic given the seed path.
MdeResult fit_mde(const Sample& x, const ParametricFamily& fam,
                  const SmoothingConfig& cfg, int n_model,
                  const MdeOptions& opts, const SeedPath& seed_path);

// R replications of sqrt(n) (theta_hat - theta_star); columns dev_0..,
// value, converged.  Summary carries per-coordinate moments and a KS
// statistic against the moment-fitted normal.
ReplicationReport mde_limit_experiment(const ParametricFamily& fam,
                                       const std::vector<double>& theta_star,
                                       const SmoothingConfig& cfg, int n, int R,
                                       const SeedPath& seed_path,
                                       const MdeOptions& opts = {},
                                       int parallelism = 1);

// R replications of the scaled optimal value sqrt(n) inf_theta W, plus the
// scaled value at theta_star under the same frozen randomness.
ReplicationReport mde_value_experiment(const ParametricFamily& fam,
                                       const std::vector<double>& theta_star,
                                       const SmoothingConfig& cfg, int n, int R,
                                       const SeedPath& seed_path,
                                       const MdeOptions& opts = {},
                                       int parallelism = 1);

}  // namespace smoothwass

#endif  // SMOOTHWASS_MDE_HPP_
