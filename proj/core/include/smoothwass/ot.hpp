#ifndef SMOOTHWASS_OT_HPP_
#define SMOOTHWASS_OT_HPP_

#include <span>
#include <vector>

#include "smoothwass/measures.hpp"

namespace smoothwass {

struct PlanEntry {
  int i;
  int j;
  double mass;
};

// Sparse optimal coupling between two discrete measures.  A basic solution
// carries at most k + l - 1 entries.
struct TransportPlan {
  std::vector<PlanEntry> entries;
  double primal_cost = 0.0;
  int source_size = 0;
  int target_size = 0;
};

// Kantorovich duals over the two supports, normalized so g[0] = 0 and
// gc = c_transform(g).  dual_value equals primal_cost at optimality.
struct DualPotentials {
  std::vector<double> g;
  std::vector<double> gc;
  double dual_value = 0.0;
};

struct OtSolution {
  TransportPlan plan;
  DualPotentials duals;
};

enum class OtMethod {
  automatic,        // monotone quantile solver when d == 1, simplex otherwise
  network_simplex,  // transportation LP, any dimension
  monotone_1d,      // sorted merge, d == 1 only
};

// |x-y|^p as exp(p log r), guarded at r = 0.
double transport_cost(double dist, double p);

double euclidean_dist(const double* x, const double* y, int d);

OtSolution solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       double p, OtMethod method = OtMethod::automatic);

// Exact L^p distance between the two quantile functions (d == 1), computed
// by merging the two weight partitions of [0, 1].  Returns the distance
// itself (p-th root of the transport cost).
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      double p);

// h_j = min_i (|x_i - y_j|^p - g_i).
std::vector<double> c_transform(std::span<const double> g,
                                std::span<const double> x_points, int k,
                                std::span<const double> y_points, int l,
                                int d, double p);
std::vector<double> c_transform(std::span<const double> g,
                                const DiscreteMeasure& x,
                                const DiscreteMeasure& y, double p);

double duality_gap(const TransportPlan& plan, const DualPotentials& duals,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu);

namespace detail {

// Atoms sorted ascending with aligned weights and original indices;
// reusable across many solves against the same measure.
struct Sorted1D {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<int> order;
};

Sorted1D sort_1d(const DiscreteMeasure& mu);
Sorted1D sort_1d(std::span<const double> points, std::span<const double> weights);

// Transport cost (p-th power) of the monotone coupling; value-only fast path.
double monotone_cost(const Sorted1D& a, const Sorted1D& b, double p);

}  // namespace detail

}  // namespace smoothwass

#endif  // SMOOTHWASS_OT_HPP_
