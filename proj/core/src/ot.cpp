#include "smoothwass/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "smoothwass/errors.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

double transport_cost(double dist, double p) {
  return dist == 0.0 ? 0.0 : std::exp(p * std::log(dist));
}

double euclidean_dist(const double* x, const double* y, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double diff = x[a] - y[a];
    s += diff * diff;
  }
  return std::sqrt(s);
}

namespace detail {

Sorted1D sort_1d(std::span<const double> points,
                 std::span<const double> weights) {
  const int k = static_cast<int>(points.size());
  Sorted1D s;
  s.order.resize(k);
  std::iota(s.order.begin(), s.order.end(), 0);
  std::sort(s.order.begin(), s.order.end(), [&](int a, int b) {
    if (points[a] != points[b]) return points[a] < points[b];
    return a < b;
  });
  s.x.resize(k);
  s.w.resize(k);
  for (int r = 0; r < k; ++r) {
    s.x[r] = points[s.order[r]];
    s.w[r] = weights[s.order[r]];
  }
  return s;
}

Sorted1D sort_1d(const DiscreteMeasure& mu) {
  if (mu.d != 1) throw ConfigError("sort_1d: measure must be one-dimensional");
  return sort_1d(mu.points, mu.weights);
}

namespace {

// Walks the merged quantile partition of [0,1].  visit(a, b, mass, adv_a,
// adv_b) is called once per segment; adv flags say which side advances next
// (both on an exact cumulative tie).
template <typename Visit>
void merge_partitions(const Sorted1D& sa, const Sorted1D& sb, Visit&& visit) {
  const std::size_t k = sa.x.size(), l = sb.x.size();
  std::size_t a = 0, b = 0;
  double ca = sa.w[0], cb = sb.w[0];
  double prev = 0.0;
  while (true) {
    const double cur = std::min(ca, cb);
    const double mass = std::max(0.0, cur - prev);
    prev = cur;
    bool adv_a = ca <= cb;
    bool adv_b = cb <= ca;
    if (adv_a && a + 1 == k) adv_a = false;
    if (adv_b && b + 1 == l) adv_b = false;
    visit(a, b, mass, adv_a, adv_b);
    if (!adv_a && !adv_b) break;
    if (adv_a) ca += sa.w[++a];
    if (adv_b) cb += sb.w[++b];
  }
}

}  // namespace

double monotone_cost(const Sorted1D& sa, const Sorted1D& sb, double p) {
  KahanSum cost;
  merge_partitions(sa, sb, [&](std::size_t a, std::size_t b, double mass,
                               bool, bool) {
    if (mass > 0.0)
      cost.add(mass * transport_cost(std::abs(sa.x[a] - sb.x[b]), p));
  });
  return cost.value();
}

namespace {

// Optimal plan and duals for d == 1 from the monotone coupling.  The merged
// segment path, including zero-mass tie steps, is a spanning staircase of
// the bipartite support; duals follow from tightness along it (row side
// advances first on ties).  Feasibility off the path holds because the cost
// |x-y|^p over sorted atoms satisfies the Monge inequality.
OtSolution solve_monotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          double p) {
  const Sorted1D sa = sort_1d(mu);
  const Sorted1D sb = sort_1d(nu);
  const std::size_t k = sa.x.size(), l = sb.x.size();

  std::vector<double> gs(k, 0.0), gcs(l, 0.0);
  gcs[0] = transport_cost(std::abs(sa.x[0] - sb.x[0]), p);

  OtSolution out;
  out.plan.source_size = static_cast<int>(k);
  out.plan.target_size = static_cast<int>(l);
  out.plan.entries.reserve(k + l);
  KahanSum cost;

  merge_partitions(sa, sb, [&](std::size_t a, std::size_t b, double mass,
                               bool adv_a, bool adv_b) {
    if (mass > 0.0) {
      const double c = transport_cost(std::abs(sa.x[a] - sb.x[b]), p);
      cost.add(mass * c);
      out.plan.entries.push_back({sa.order[a], sb.order[b], mass});
    }
    if (adv_a) {
      gs[a + 1] = transport_cost(std::abs(sa.x[a + 1] - sb.x[b]), p) - gcs[b];
      if (adv_b) {
        gcs[b + 1] =
            transport_cost(std::abs(sa.x[a + 1] - sb.x[b + 1]), p) - gs[a + 1];
      }
    } else if (adv_b) {
      gcs[b + 1] = transport_cost(std::abs(sa.x[a] - sb.x[b + 1]), p) - gs[a];
    }
  });
  out.plan.primal_cost = cost.value();

  auto& duals = out.duals;
  duals.g.resize(k);
  duals.gc.resize(l);
  for (std::size_t r = 0; r < k; ++r) duals.g[sa.order[r]] = gs[r];
  for (std::size_t r = 0; r < l; ++r) duals.gc[sb.order[r]] = gcs[r];

  const double shift = duals.g[0];
  for (auto& v : duals.g) v -= shift;
  for (auto& v : duals.gc) v += shift;

  KahanSum dv;
  for (std::size_t i = 0; i < k; ++i) dv.add(mu.weights[i] * duals.g[i]);
  for (std::size_t j = 0; j < l; ++j) dv.add(nu.weights[j] * duals.gc[j]);
  duals.dual_value = dv.value();
  return out;
}

// Transportation LP by network simplex on the dense bipartite graph.
// Entering arc: most negative reduced cost, ties broken by lowest arc index;
// after a long degenerate stall the rule switches to Bland's (lowest index
// with negative reduced cost), which cannot cycle.
class NetworkSimplex {
 public:
  NetworkSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 double p)
      : k_(mu.k), l_(nu.k), n_(mu.k + nu.k) {
    cost_.resize(static_cast<std::size_t>(k_) * l_);
    double cmax = 0.0;
    for (int i = 0; i < k_; ++i) {
      const double* xi = mu.points.data() + static_cast<std::size_t>(i) * mu.d;
      for (int j = 0; j < l_; ++j) {
        const double* yj =
            nu.points.data() + static_cast<std::size_t>(j) * nu.d;
        const double c = transport_cost(euclidean_dist(xi, yj, mu.d), p);
        if (!std::isfinite(c)) throw ConfigError("non-finite transport cost");
        cost_[arc(i, j)] = c;
        cmax = std::max(cmax, c);
      }
    }
    tol_ = 1e-12 * (1.0 + cmax);
    supply_ = mu.weights;
    demand_ = nu.weights;
    parent_.assign(n_, -1);
    parent_arc_.assign(n_, -1);
    flow_to_parent_.assign(n_, 0.0);
    pot_.assign(n_, 0.0);
    adj_.assign(n_, {});
    northwest_basis();
    rebuild_tree();
  }

  OtSolution run() {
    const long max_pivots = 2000 + 64L * k_ * l_;
    long degenerate_streak = 0;
    bool bland = false;
    for (long it = 0; it < max_pivots; ++it) {
      const int enter = find_entering(bland);
      if (enter < 0) return extract();
      const double moved = pivot(enter);
      if (moved <= 0.0) {
        if (++degenerate_streak > 4L * n_) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
    throw SolverError("network simplex exceeded pivot limit");
  }

 private:
  std::size_t arc(int i, int j) const {
    return static_cast<std::size_t>(i) * l_ + j;
  }
  int src_of(int a) const { return a / l_; }
  int snk_node(int a) const { return k_ + a % l_; }

  void northwest_basis() {
    int i = 0, j = 0;
    double r = supply_[0], c = demand_[0];
    while (true) {
      basis_.push_back(static_cast<int>(arc(i, j)));
      basis_flow_.push_back(std::min(r, c));
      const bool row_first = r <= c;
      if (row_first && i + 1 < k_) {
        c -= r;
        r = supply_[++i];
      } else if (j + 1 < l_) {
        r -= c;
        c = demand_[++j];
      } else if (i + 1 < k_) {
        c -= r;
        r = supply_[++i];
      } else {
        break;
      }
    }
  }

  void rebuild_tree() {
    for (auto& v : adj_) v.clear();
    for (std::size_t t = 0; t < basis_.size(); ++t) {
      const int a = basis_[t];
      adj_[src_of(a)].push_back(static_cast<int>(t));
      adj_[snk_node(a)].push_back(static_cast<int>(t));
    }
    // BFS from node 0 assigns parents, flows-to-parent and potentials.
    std::fill(parent_.begin(), parent_.end(), -2);
    std::vector<int> queue{0};
    parent_[0] = -1;
    parent_arc_[0] = -1;
    pot_[0] = 0.0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (int t : adj_[u]) {
        const int a = basis_[t];
        const int v = src_of(a) == u ? snk_node(a) : src_of(a);
        if (parent_[v] != -2) continue;
        parent_[v] = u;
        parent_arc_[v] = t;
        flow_to_parent_[v] = basis_flow_[t];
        pot_[v] = cost_[a] - pot_[u];  // alpha_i + beta_j = c_ij on the tree
        queue.push_back(v);
      }
    }
    if (queue.size() != static_cast<std::size_t>(n_))
      throw SolverError("network simplex basis is not spanning");
  }

  int find_entering(bool bland) const {
    int best = -1;
    double best_rc = -tol_;
    const std::size_t total = cost_.size();
    for (std::size_t a = 0; a < total; ++a) {
      const double rc =
          cost_[a] - pot_[a / l_] - pot_[k_ + a % l_];
      if (rc < best_rc) {
        if (bland) return static_cast<int>(a);
        best_rc = rc;
        best = static_cast<int>(a);
      }
    }
    return best;
  }

  // Push along the cycle closed by `enter`; returns the amount moved.
  double pivot(int enter) {
    const int si = src_of(enter);
    const int sj = snk_node(enter);
    // Mark path si -> root.
    std::vector<char> on_path(n_, 0);
    for (int u = si; u != -1; u = parent_[u]) on_path[u] = 1;
    int lca = sj;
    while (!on_path[lca]) lca = parent_[lca];

    // Collect cycle tree-arcs with their direction relative to pushing
    // one unit from si to sj over the entering arc.
    // The cycle is traversed si -(entering)-> sj -(tree)-> lca -(tree)-> si.
    // A tree arc traversed with its natural source->sink direction gains
    // flow, one traversed against it loses flow.  On the sj->lca walk the
    // traversal direction is child->parent; on the si->lca walk the cycle
    // runs parent->child, the reverse of the walk.
    struct Step {
      int node;      // child endpoint whose parent_arc_ is on the cycle
      bool forward;  // true when the arc gains flow
    };
    std::vector<Step> steps;
    for (int u = sj; u != lca; u = parent_[u]) {
      const int a = basis_[parent_arc_[u]];
      const bool child_is_source = snk_node(a) != u;
      steps.push_back({u, child_is_source});
    }
    for (int u = si; u != lca; u = parent_[u]) {
      const int a = basis_[parent_arc_[u]];
      const bool child_is_source = snk_node(a) != u;
      steps.push_back({u, !child_is_source});
    }
    double theta = std::numeric_limits<double>::infinity();
    int leave_step = -1;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (steps[s].forward) continue;
      const double f = flow_to_parent_[steps[s].node];
      const int arc_id = basis_[parent_arc_[steps[s].node]];
      if (f < theta ||
          (f == theta && leave_step >= 0 &&
           arc_id < basis_[parent_arc_[steps[leave_step].node]])) {
        theta = f;
        leave_step = static_cast<int>(s);
      }
    }
    if (leave_step < 0)
      throw SolverError("network simplex: unbounded pivot cycle");
    if (!std::isfinite(theta))
      throw SolverError("network simplex: no leaving arc");

    for (const auto& s : steps) {
      basis_flow_[parent_arc_[s.node]] += s.forward ? theta : -theta;
      flow_to_parent_[s.node] = basis_flow_[parent_arc_[s.node]];
    }
    const int leave_tree_idx = parent_arc_[steps[leave_step].node];
    basis_[leave_tree_idx] = enter;
    basis_flow_[leave_tree_idx] = theta;
    rebuild_tree();
    return theta;
  }

  OtSolution extract() const {
    OtSolution out;
    out.plan.source_size = k_;
    out.plan.target_size = l_;
    KahanSum cost;
    for (std::size_t t = 0; t < basis_.size(); ++t) {
      if (basis_flow_[t] <= 0.0) continue;
      const int a = basis_[t];
      out.plan.entries.push_back({src_of(a), a % l_, basis_flow_[t]});
      cost.add(basis_flow_[t] * cost_[a]);
    }
    std::sort(out.plan.entries.begin(), out.plan.entries.end(),
              [](const PlanEntry& u, const PlanEntry& v) {
                return u.i != v.i ? u.i < v.i : u.j < v.j;
              });
    out.plan.primal_cost = cost.value();
    out.duals.g.assign(pot_.begin(), pot_.begin() + k_);
    out.duals.gc.assign(pot_.begin() + k_, pot_.end());
    return out;
  }

  const int k_, l_, n_;
  std::vector<double> cost_;
  std::vector<double> supply_, demand_;
  double tol_ = 0.0;

  std::vector<int> basis_;           // arc ids of the k+l-1 basic arcs
  std::vector<double> basis_flow_;   // aligned flows
  std::vector<std::vector<int>> adj_;
  std::vector<int> parent_, parent_arc_;
  std::vector<double> flow_to_parent_;
  std::vector<double> pot_;  // alpha on sources, beta on sinks
};

}  // namespace
}  // namespace detail

std::vector<double> c_transform(std::span<const double> g,
                                std::span<const double> x_points, int k,
                                std::span<const double> y_points, int l,
                                int d, double p) {
  if (static_cast<int>(g.size()) != k)
    throw ConfigError("c_transform: potential size mismatch");
  std::vector<double> h(l, std::numeric_limits<double>::infinity());
  for (int j = 0; j < l; ++j) {
    const double* yj = y_points.data() + static_cast<std::size_t>(j) * d;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double* xi = x_points.data() + static_cast<std::size_t>(i) * d;
      const double v = transport_cost(euclidean_dist(xi, yj, d), p) - g[i];
      best = std::min(best, v);
    }
    h[j] = best;
  }
  return h;
}

std::vector<double> c_transform(std::span<const double> g,
                                const DiscreteMeasure& x,
                                const DiscreteMeasure& y, double p) {
  if (x.d != y.d) throw ConfigError("c_transform: dimension mismatch");
  return c_transform(g, x.points, x.k, y.points, y.k, x.d, p);
}

namespace {

void canonical_duals(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     double p, OtSolution& sol) {
  auto& d = sol.duals;
  const double shift = d.g[0];
  for (auto& v : d.g) v -= shift;
  d.gc = c_transform(d.g, mu, nu, p);
  d.g = c_transform(d.gc, nu, mu, p);
  // The double transform reproduces g up to rounding; re-pin the gauge.
  const double residue = d.g[0];
  if (residue != 0.0) {
    for (auto& v : d.g) v -= residue;
    for (auto& v : d.gc) v += residue;
  }
  KahanSum dv;
  for (int i = 0; i < mu.k; ++i) dv.add(mu.weights[i] * d.g[i]);
  for (int j = 0; j < nu.k; ++j) dv.add(nu.weights[j] * d.gc[j]);
  d.dual_value = dv.value();
}

}  // namespace

OtSolution solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       double p, OtMethod method) {
  mu.validate();
  nu.validate();
  if (mu.d != nu.d) throw ConfigError("solve_exact: dimension mismatch");
  if (!(p > 1.0)) throw ConfigError("solve_exact: p must exceed 1");

  if (method == OtMethod::automatic)
    method = mu.d == 1 ? OtMethod::monotone_1d : OtMethod::network_simplex;

  if (method == OtMethod::monotone_1d) {
    if (mu.d != 1)
      throw ConfigError("monotone_1d method requires one-dimensional data");
    return detail::solve_monotone(mu, nu, p);
  }
  detail::NetworkSimplex solver(mu, nu, p);
  OtSolution sol = solver.run();
  canonical_duals(mu, nu, p, sol);
  return sol;
}

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      double p) {
  mu.validate();
  nu.validate();
  if (mu.d != 1 || nu.d != 1)
    throw ConfigError("wasserstein_1d requires one-dimensional measures");
  if (!(p >= 1.0)) throw ConfigError("wasserstein_1d: p must be at least 1");
  const double cost =
      detail::monotone_cost(detail::sort_1d(mu), detail::sort_1d(nu), p);
  return cost == 0.0 ? 0.0 : std::exp(std::log(cost) / p);
}

double duality_gap(const TransportPlan& plan, const DualPotentials& duals,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (static_cast<int>(duals.g.size()) != mu.k ||
      static_cast<int>(duals.gc.size()) != nu.k)
    throw ConfigError("duality_gap: size mismatch");
  KahanSum dual;
  for (int i = 0; i < mu.k; ++i) dual.add(mu.weights[i] * duals.g[i]);
  for (int j = 0; j < nu.k; ++j) dual.add(nu.weights[j] * duals.gc[j]);
  return std::abs(plan.primal_cost - dual.value());
}

}  // namespace smoothwass
