#ifndef SMOOTHWASS_ESTIMATOR_HPP_
#define SMOOTHWASS_ESTIMATOR_HPP_

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smoothwass/measures.hpp"
#include "smoothwass/ot.hpp"

namespace smoothwass {

enum class Side { source, target };
enum class VarianceMode { one_sample, two_sample };

// Point estimate of the smooth distance between the two samples together
// with the coupling and duals it was computed from.
struct SmoothDistanceEstimate {
  double value_wp = 0.0;  // distance
  double value_sp = 0.0;  // distance^p (the transport cost)
  TransportPlan plan;
  DualPotentials duals;
  SmoothingConfig cfg;
  std::vector<int> origin_mu;  // augmented atom -> original sample row
  std::vector<int> origin_nu;
  int n_mu = 0;
  int n_nu = 0;
  SeedPath seed_path;

  nlohmann::json to_json() const;
};

// W_p between the noise-augmented empiricals of x and y.  With common_noise
// the same noise tensor is applied to both sides, matched by sample row
// (requires equal sizes); identical samples then give exactly zero.
SmoothDistanceEstimate estimate_swd(const Sample& x, const Sample& y,
                                    const SmoothingConfig& cfg,
                                    const SeedPath& seed_path,
                                    bool common_noise = false);

// Lower-level variant over measures that were already noise-augmented
// (their origin_index must map atoms to original rows).  Lets callers use
// different m per side, e.g. a frozen dense reference.
SmoothDistanceEstimate estimate_from_augmented(const DiscreteMeasure& mu_aug,
                                               int n_mu,
                                               const DiscreteMeasure& nu_aug,
                                               int n_nu,
                                               const SmoothingConfig& cfg,
                                               const SeedPath& seed_path);

// Averages a dual potential over the noise children of each original point:
// gbar_i = (1/m) sum_{j: origin=i} g_j.
std::vector<double> barycentric_potential(const DualPotentials& duals,
                                          const std::vector<int>& origin_index,
                                          Side side, int n_origin);

struct VarianceEstimate {
  double v_squared = 0.0;
  double var_g = 0.0;        // source-side component
  double var_gc = 0.0;       // target-side component (two_sample only)
  double denominator = 0.0;  // p^2 * W^(2(p-1))
};

// Plug-in asymptotic variance of sqrt(n) (What - W).  Invalid at W ~ 0
// (the null), where a DegenerateNullError is raised.
VarianceEstimate plugin_variance(const SmoothDistanceEstimate& est,
                                 VarianceMode mode);

}  // namespace smoothwass

#endif  // SMOOTHWASS_ESTIMATOR_HPP_
