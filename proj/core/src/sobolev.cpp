#include "smoothwass/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>

#include "smoothwass/errors.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/parallel.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

namespace {

constexpr double kBoundaryMassTol = 1e-6;

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double phi_sigma(double z, double sigma) {
  return std_normal_pdf(z / sigma) / sigma;
}

}  // namespace

Grid Grid::line(int n, double lo, double hi, Boundary b) {
  Grid g;
  g.dim = 1;
  g.nodes = {n, 1};
  const double h = (hi - lo) / n;
  g.spacing = {h, 1.0};
  g.origin = {b == Boundary::periodic ? lo : lo + 0.5 * h, 0.0};
  g.boundary = b;
  g.validate();
  return g;
}

Grid Grid::rect(int nx, int ny, std::array<double, 2> lo,
                std::array<double, 2> hi, Boundary b) {
  Grid g;
  g.dim = 2;
  g.nodes = {nx, ny};
  g.spacing = {(hi[0] - lo[0]) / nx, (hi[1] - lo[1]) / ny};
  if (b == Boundary::periodic) {
    g.origin = {lo[0], lo[1]};
  } else {
    g.origin = {lo[0] + 0.5 * g.spacing[0], lo[1] + 0.5 * g.spacing[1]};
  }
  g.boundary = b;
  g.validate();
  return g;
}

void Grid::validate() const {
  require(dim == 1 || dim == 2, "grid dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    require(nodes[a] >= 4, "grid needs at least 4 nodes per axis");
    require(spacing[a] > 0.0, "grid spacing must be positive");
  }
  if (dim == 1) require(nodes[1] == 1, "1-D grid must have nodes[1] == 1");
}

bool Grid::same_layout(const Grid& other) const {
  return dim == other.dim && nodes == other.nodes &&
         spacing == other.spacing && origin == other.origin &&
         boundary == other.boundary;
}

double GridMeasure::grid_mass() const {
  return kahan_total(density) * grid.cell_volume();
}

double GridMeasure::min_density() const {
  return *std::min_element(density.begin(), density.end());
}

void GridMeasure::validate() const {
  grid.validate();
  require(density.size() == static_cast<std::size_t>(grid.total_nodes()),
          "grid measure size mismatch");
  for (double v : density) require(v >= 0.0, "density must be nonnegative");
  require(std::abs(grid_mass() - 1.0) <= 1e-10,
          "grid measure must have unit mass");
}

void GridSigned::validate() const {
  grid.validate();
  require(values.size() == static_cast<std::size_t>(grid.total_nodes()),
          "grid signed function size mismatch");
  require(std::abs(kahan_total(values) * grid.cell_volume()) <= 1e-8,
          "grid signed function must have zero total mass");
}

GridMeasure renormalize(GridMeasure m) {
  const double mass = m.grid_mass();
  require(mass > 0.0, "renormalize: zero total mass");
  for (auto& v : m.density) v /= mass;
  return m;
}

// ---------------------------------------------------------------------------
// Edge structure for divergence-form operators.

namespace {

struct Edge {
  int u, v;
  double inv_h;
};

std::vector<Edge> make_edges(const Grid& g) {
  std::vector<Edge> edges;
  const bool per = g.boundary == Boundary::periodic;
  if (g.dim == 1) {
    const int n = g.nodes[0];
    const int ne = per ? n : n - 1;
    edges.reserve(ne);
    for (int i = 0; i < ne; ++i)
      edges.push_back({i, (i + 1) % n, 1.0 / g.spacing[0]});
    return edges;
  }
  const int nx = g.nodes[0], ny = g.nodes[1];
  const int nex = per ? nx : nx - 1;
  const int ney = per ? ny : ny - 1;
  edges.reserve(static_cast<std::size_t>(nex) * ny +
                static_cast<std::size_t>(nx) * ney);
  for (int ix = 0; ix < nex; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      edges.push_back(
          {g.node_id(ix, iy), g.node_id((ix + 1) % nx, iy), 1.0 / g.spacing[0]});
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ney; ++iy)
      edges.push_back(
          {g.node_id(ix, iy), g.node_id(ix, (iy + 1) % ny), 1.0 / g.spacing[1]});
  return edges;
}

// Harmonic edge averages of a node density.
std::vector<double> edge_density(const std::vector<Edge>& edges,
                                 const std::vector<double>& rho) {
  std::vector<double> w(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double a = rho[edges[e].u], b = rho[edges[e].v];
    w[e] = 2.0 * a * b / (a + b);
  }
  return w;
}

void project_mean_zero(std::vector<double>& v) {
  const double m = kahan_total(v) / static_cast<double>(v.size());
  for (auto& x : v) x -= m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

}  // namespace

std::vector<double> apply_weighted_laplacian(const GridMeasure& rho,
                                             std::span<const double> u) {
  const auto edges = make_edges(rho.grid);
  const auto w = edge_density(edges, rho.density);
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double flux =
        w[e] * edges[e].inv_h * edges[e].inv_h * (u[edges[e].u] - u[edges[e].v]);
    out[edges[e].u] += flux;
    out[edges[e].v] -= flux;
  }
  return out;
}

std::vector<double> solve_weighted_poisson(const GridMeasure& rho,
                                           const GridSigned& h, double tol,
                                           int max_iter) {
  rho.validate();
  h.validate();
  require(rho.grid.same_layout(h.grid), "rho and h live on different grids");
  require(rho.min_density() > 0.0,
          "reference density must be strictly positive");
  const int n = rho.grid.total_nodes();
  if (max_iter <= 0) max_iter = std::max(20000, 60 * n);

  const auto edges = make_edges(rho.grid);
  const auto w = edge_density(edges, rho.density);
  std::vector<double> diag(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double c = w[e] * edges[e].inv_h * edges[e].inv_h;
    diag[edges[e].u] += c;
    diag[edges[e].v] += c;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double flux =
          w[e] * edges[e].inv_h * edges[e].inv_h * (x[edges[e].u] - x[edges[e].v]);
      out[edges[e].u] += flux;
      out[edges[e].v] -= flux;
    }
  };

  std::vector<double> b = h.values;
  project_mean_zero(b);  // exact compatibility with the singular operator
  const double bnorm = std::sqrt(dot(b, b));
  std::vector<double> u(n, 0.0);
  if (bnorm == 0.0) return u;

  std::vector<double> r = b, z(n), pvec(n), ap(n);
  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  pvec = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    apply(pvec, ap);
    const double alpha = rz / dot(pvec, ap);
    for (int i = 0; i < n; ++i) {
      u[i] += alpha * pvec[i];
      r[i] -= alpha * ap[i];
    }
    if ((it + 1) % 64 == 0) project_mean_zero(r);
    const double rnorm = std::sqrt(dot(r, r));
    if (rnorm <= tol * bnorm) {
      project_mean_zero(u);
      return u;
    }
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) pvec[i] = z[i] + beta * pvec[i];
  }
  std::ostringstream msg;
  msg << "weighted Poisson CG did not reach tol " << tol << " in " << max_iter
      << " iterations; residual " << std::sqrt(dot(r, r)) / bnorm;
  throw SolverError(msg.str());
}

GradientField potential_gradient(const Grid& grid, std::span<const double> phi) {
  GradientField f;
  f.grid = grid;
  const auto edges = make_edges(grid);
  // Edges are emitted axis 0 first, then axis 1; split by count.
  const bool per = grid.boundary == Boundary::periodic;
  std::size_t n0;
  if (grid.dim == 1) {
    n0 = static_cast<std::size_t>(per ? grid.nodes[0] : grid.nodes[0] - 1);
  } else {
    n0 = static_cast<std::size_t>(per ? grid.nodes[0] : grid.nodes[0] - 1) *
         grid.nodes[1];
  }
  f.components[0].reserve(n0);
  f.components[1].reserve(edges.size() - n0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double v = (phi[edges[e].v] - phi[edges[e].u]) * edges[e].inv_h;
    (e < n0 ? f.components[0] : f.components[1]).push_back(v);
  }
  return f;
}

double dual_norm_p2(const GridMeasure& rho, const GridSigned& h, double tol,
                    int max_iter) {
  const auto u = solve_weighted_poisson(rho, h, tol, max_iter);
  std::vector<double> b = h.values;
  project_mean_zero(b);
  const double energy = dot(b, u) * rho.grid.cell_volume();
  return std::sqrt(std::max(0.0, energy));
}

// ---------------------------------------------------------------------------
// General p: minimize J(phi) = (1/q) sum_e rho_e |grad phi|^q vol
//                              - sum_i h_i phi_i vol
// over node potentials, by FISTA with backtracking and function restarts.
// At the optimum -p J equals the norm to the p-th power.

double dual_norm_general_p(const GridMeasure& rho, const GridSigned& h,
                           double p, double tol, int max_iter) {
  rho.validate();
  h.validate();
  require(rho.grid.same_layout(h.grid), "rho and h live on different grids");
  require(p > 1.0, "dual_norm_general_p: p must exceed 1");
  require(rho.min_density() > 0.0,
          "reference density must be strictly positive");
  const double q = p / (p - 1.0);
  const int n = rho.grid.total_nodes();
  const double vol = rho.grid.cell_volume();

  const auto edges = make_edges(rho.grid);
  const auto w = edge_density(edges, rho.density);

  std::vector<double> hv = h.values;
  project_mean_zero(hv);

  auto objective = [&](const std::vector<double>& phi) {
    KahanSum t1;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double v = (phi[edges[e].v] - phi[edges[e].u]) * edges[e].inv_h;
      t1.add(w[e] * std::pow(std::abs(v), q));
    }
    KahanSum t2;
    for (int i = 0; i < n; ++i) t2.add(hv[i] * phi[i]);
    return vol * (t1.value() / q - t2.value());
  };

  auto gradient = [&](const std::vector<double>& phi, std::vector<double>& g) {
    for (int i = 0; i < n; ++i) g[i] = -hv[i] * vol;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double v = (phi[edges[e].v] - phi[edges[e].u]) * edges[e].inv_h;
      if (v == 0.0) continue;
      const double jq = std::pow(std::abs(v), q - 1.0) * (v > 0 ? 1.0 : -1.0);
      const double s = w[e] * jq * edges[e].inv_h * vol;
      g[edges[e].v] += s;
      g[edges[e].u] -= s;
    }
  };

  std::vector<double> phi(n, 0.0), phi_prev(n, 0.0), y(n, 0.0), grad(n),
      cand(n);
  double t_momentum = 1.0;
  double L = 1.0;
  double j_cur = objective(phi);
  int stall = 0;

  for (int it = 0; it < max_iter; ++it) {
    gradient(y, grad);
    const double jy = objective(y);
    const double g2 = dot(grad, grad);
    if (g2 == 0.0) break;

    double jc = 0.0;
    for (int back = 0; back < 80; ++back) {
      for (int i = 0; i < n; ++i) cand[i] = y[i] - grad[i] / L;
      jc = objective(cand);
      if (jc <= jy - 0.5 * g2 / L + 1e-15 * (1.0 + std::abs(jy))) break;
      L *= 2.0;
    }

    const double j_prev_val = j_cur;
    phi_prev.swap(phi);
    phi = cand;
    if (jc > j_prev_val) {
      t_momentum = 1.0;  // function restart
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    const double beta = (t_momentum - 1.0) / t_next;
    for (int i = 0; i < n; ++i) y[i] = phi[i] + beta * (phi[i] - phi_prev[i]);
    t_momentum = t_next;
    j_cur = jc;
    L = std::max(1e-12, L * 0.95);

    if (std::abs(jc - j_prev_val) <= tol * (1.0 + std::abs(jc))) {
      if (++stall >= 10) {
        const double val = -p * std::min(0.0, j_cur);
        return val == 0.0 ? 0.0 : std::exp(std::log(val) / p);
      }
    } else {
      stall = 0;
    }
  }
  std::ostringstream msg;
  msg << "dual_norm_general_p did not converge in " << max_iter
      << " iterations; last objective " << j_cur;
  throw SolverError(msg.str());
}

double dual_norm(const GridMeasure& rho, const GridSigned& h, double p) {
  if (p == 2.0) return dual_norm_p2(rho, h);
  return dual_norm_general_p(rho, h, p);
}

// ---------------------------------------------------------------------------
// Projection of smoothed measures to grids.

namespace {

// Smoothed density of one spec component at z (dim-dimensional node).
double component_density(const DistributionSpec& spec, int c, double sigma,
                         const double* z, const Grid& g, int ix, int iy) {
  switch (spec.family) {
    case Family::point_mass: {
      double v = 1.0;
      for (int a = 0; a < spec.dim; ++a)
        v *= phi_sigma(z[a] - spec.locations[c][a], sigma);
      return v;
    }
    case Family::gaussian:
    case Family::gaussian_mixture: {
      const double s = spec.scales[c];
      const double seff = std::sqrt(s * s + sigma * sigma);
      if (spec.truncate > 0.0) {
        // dim == 1.  Mass of the component inside the truncation window.
        const double a0 = spec.locations[c][0];
        const double r = spec.truncate;
        const double mass = 2.0 * normal_cdf(r / s) - 1.0;
        if (sigma == 0.0) {
          // Cell average (the density jumps at the window edges).
          const double half = 0.5 * g.spacing[0];
          const double lo = std::max(z[0] - half, a0 - r);
          const double hi = std::min(z[0] + half, a0 + r);
          if (hi <= lo) return 0.0;
          return (normal_cdf((hi - a0) / s) - normal_cdf((lo - a0) / s)) /
                 (mass * g.spacing[0]);
        }
        const double tau = s * sigma / seff;
        const double m =
            a0 + (s * s) * (z[0] - a0) / (seff * seff);
        const double window = normal_cdf((a0 + r - m) / tau) -
                              normal_cdf((a0 - r - m) / tau);
        return phi_sigma(z[0] - a0, seff) * window / mass;
      }
      double v = 1.0;
      for (int a = 0; a < spec.dim; ++a)
        v *= phi_sigma(z[a] - spec.locations[c][a], seff);
      return v;
    }
    case Family::uniform_box:
    case Family::uniform_mixture: {
      double v = 1.0;
      for (int a = 0; a < spec.dim; ++a) {
        const double lo = spec.lo[c][a], hi = spec.hi[c][a];
        if (sigma > 0.0) {
          v *= (normal_cdf((z[a] - lo) / sigma) -
                normal_cdf((z[a] - hi) / sigma)) /
               (hi - lo);
        } else {
          // Cell-averaged indicator: overlap of the node cell with the box.
          const double half = 0.5 * g.spacing[a];
          const double o =
              std::min(z[a] + half, hi) - std::max(z[a] - half, lo);
          v *= std::max(0.0, o) / ((hi - lo) * g.spacing[a]);
        }
      }
      return v;
    }
  }
  (void)ix;
  (void)iy;
  return 0.0;
}

GridMeasure finalize_grid_measure(const Grid& grid,
                                  std::vector<double> density) {
  GridMeasure m;
  m.grid = grid;
  m.density = std::move(density);
  const double raw = kahan_total(m.density) * grid.cell_volume();
  if (std::abs(raw - 1.0) > kBoundaryMassTol) {
    std::ostringstream msg;
    msg << "grid too small: captured mass " << raw
        << " differs from 1 by more than " << kBoundaryMassTol;
    throw ConfigError(msg.str());
  }
  for (auto& v : m.density) v /= raw;
  return m;
}

}  // namespace

GridMeasure project_to_grid(const DistributionSpec& spec, double sigma,
                            const Grid& grid) {
  spec.validate();
  grid.validate();
  require(sigma >= 0.0, "sigma must be nonnegative");
  require(grid.dim == spec.dim, "grid and spec dimension mismatch");
  if (sigma == 0.0)
    require(spec.family != Family::point_mass,
            "a point mass has no density at sigma = 0");
  const int n = grid.total_nodes();
  std::vector<double> density(n, 0.0);
  double z[2];
  for (int ix = 0; ix < grid.nodes[0]; ++ix) {
    z[0] = grid.coord(0, ix);
    const int ny = grid.dim == 1 ? 1 : grid.nodes[1];
    for (int iy = 0; iy < ny; ++iy) {
      if (grid.dim == 2) z[1] = grid.coord(1, iy);
      double v = 0.0;
      for (std::size_t c = 0; c < spec.weights.size(); ++c)
        v += spec.weights[c] *
             component_density(spec, static_cast<int>(c), sigma, z, grid, ix, iy);
      density[grid.dim == 1 ? ix : grid.node_id(ix, iy)] = v;
    }
  }
  return finalize_grid_measure(grid, std::move(density));
}

GridMeasure project_to_grid(const DiscreteMeasure& mu, double sigma,
                            const Grid& grid) {
  mu.validate();
  grid.validate();
  require(sigma > 0.0, "projecting a discrete measure requires sigma > 0");
  require(grid.dim == mu.d, "grid and measure dimension mismatch");
  const int n = grid.total_nodes();
  std::vector<double> density(n, 0.0);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma,
                               -0.5 * mu.d);
  if (grid.dim == 1) {
    for (int i = 0; i < mu.k; ++i) {
      const double xi = mu.at(i, 0);
      const double wi = mu.weights[i] * norm;
      for (int ix = 0; ix < grid.nodes[0]; ++ix) {
        const double dz = grid.coord(0, ix) - xi;
        density[ix] += wi * std::exp(-dz * dz * inv2s2);
      }
    }
  } else {
    for (int i = 0; i < mu.k; ++i) {
      const double xi = mu.at(i, 0), yi = mu.at(i, 1);
      const double wi = mu.weights[i] * norm;
      for (int ix = 0; ix < grid.nodes[0]; ++ix) {
        const double dx = grid.coord(0, ix) - xi;
        for (int iy = 0; iy < grid.nodes[1]; ++iy) {
          const double dy = grid.coord(1, iy) - yi;
          density[grid.node_id(ix, iy)] +=
              wi * std::exp(-(dx * dx + dy * dy) * inv2s2);
        }
      }
    }
  }
  return finalize_grid_measure(grid, std::move(density));
}

// ---------------------------------------------------------------------------

DiscreteMeasure coarsen_to_atoms(const GridMeasure& m, int max_atoms) {
  m.validate();
  require(max_atoms >= 1, "coarsen_to_atoms: max_atoms must be positive");
  const Grid& g = m.grid;
  const int n = g.total_nodes();
  const double vol = g.cell_volume();

  DiscreteMeasure out;
  out.d = g.dim;

  if (g.dim == 1 || n <= max_atoms) {
    // Contiguous mass blocks of roughly equal mass; the trailing remainder
    // block keeps the atom count at or below max_atoms.
    const double target =
        1.0 / static_cast<double>(std::max(1, max_atoms - 1));
    double block_mass = 0.0;
    std::vector<double> moment(g.dim, 0.0);
    auto flush = [&]() {
      if (block_mass <= 0.0) return;
      for (int a = 0; a < g.dim; ++a)
        out.points.push_back(moment[a] / block_mass);
      out.weights.push_back(block_mass);
      block_mass = 0.0;
      std::fill(moment.begin(), moment.end(), 0.0);
    };
    for (int ix = 0; ix < g.nodes[0]; ++ix) {
      const int ny = g.dim == 1 ? 1 : g.nodes[1];
      for (int iy = 0; iy < ny; ++iy) {
        const int id = g.dim == 1 ? ix : g.node_id(ix, iy);
        const double mass = m.density[id] * vol;
        if (n <= max_atoms) {
          // No coarsening needed; one atom per node.
          if (mass > 0.0) {
            out.points.push_back(g.coord(0, ix));
            if (g.dim == 2) out.points.push_back(g.coord(1, iy));
            out.weights.push_back(mass);
          }
          continue;
        }
        block_mass += mass;
        moment[0] += mass * g.coord(0, ix);
        if (g.dim == 2) moment[1] += mass * g.coord(1, iy);
        if (block_mass >= target) flush();
      }
    }
    if (n > max_atoms) flush();
  } else {
    // 2-D: merge square patches of nodes.
    int t = 1;
    while ((g.nodes[0] + t - 1) / t * ((g.nodes[1] + t - 1) / t) > max_atoms)
      ++t;
    for (int bx = 0; bx < g.nodes[0]; bx += t) {
      for (int by = 0; by < g.nodes[1]; by += t) {
        double mass = 0.0, mx = 0.0, my = 0.0;
        for (int ix = bx; ix < std::min(bx + t, g.nodes[0]); ++ix)
          for (int iy = by; iy < std::min(by + t, g.nodes[1]); ++iy) {
            const double w = m.density[g.node_id(ix, iy)] * vol;
            mass += w;
            mx += w * g.coord(0, ix);
            my += w * g.coord(1, iy);
          }
        if (mass > 0.0) {
          out.points.push_back(mx / mass);
          out.points.push_back(my / mass);
          out.weights.push_back(mass);
        }
      }
    }
  }

  out.k = static_cast<int>(out.weights.size());
  const double total = kahan_total(out.weights);
  for (auto& w : out.weights) w /= total;
  return out;
}

ComparisonReport verify_comparison(const GridMeasure& rho,
                                   const GridMeasure& mu0,
                                   const GridMeasure& mu1, double p) {
  rho.validate();
  mu0.validate();
  mu1.validate();
  require(rho.grid.same_layout(mu0.grid) && rho.grid.same_layout(mu1.grid),
          "verify_comparison: grids must agree");
  require(p > 1.0, "verify_comparison: p must exceed 1");
  require(rho.min_density() > 0.0, "rho must be strictly positive");

  ComparisonReport rep;
  const int n = rho.grid.total_nodes();
  double c0 = std::numeric_limits<double>::infinity();
  double c1 = c0;
  for (int i = 0; i < n; ++i) {
    c0 = std::min(c0, mu0.density[i] / rho.density[i]);
    c1 = std::min(c1, mu1.density[i] / rho.density[i]);
  }
  rep.c0 = c0;
  rep.c1 = c1;
  const double c = std::max(c0, c1);
  if (c <= 0.0)
    throw ConfigError("verify_comparison: neither density ratio is bounded "
                      "below by a positive constant");

  GridSigned h;
  h.grid = rho.grid;
  h.values.resize(n);
  for (int i = 0; i < n; ++i) h.values[i] = mu1.density[i] - mu0.density[i];
  rep.norm = dual_norm(rho, h, p);

  const double q = p / (p - 1.0);
  rep.rhs_from_f0 = c0 > 0.0 ? p * std::pow(c0, -1.0 / q) * rep.norm
                             : std::numeric_limits<double>::infinity();
  rep.rhs_from_f1 = c1 > 0.0 ? p * std::pow(c1, -1.0 / q) * rep.norm
                             : std::numeric_limits<double>::infinity();
  rep.rhs = std::min(rep.rhs_from_f0, rep.rhs_from_f1);

  const DiscreteMeasure a0 = coarsen_to_atoms(mu0, 400);
  const DiscreteMeasure a1 = coarsen_to_atoms(mu1, 400);
  const double cost = solve_exact(a0, a1, p).plan.primal_cost;
  rep.lhs = cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / p);

  rep.holds = rep.lhs <= rep.rhs * 1.05;
  return rep;
}

double null_limit_replicate(const GridMeasure& rho,
                            const DistributionSpec& spec,
                            const SmoothingConfig& cfg, int n_surrogate,
                            const SeedPath& rep_seed) {
  const double sqrt_n = std::sqrt(static_cast<double>(n_surrogate));
  const Sample s = sample(spec, n_surrogate, rep_seed);
  const GridMeasure emp = project_to_grid(empirical(s), cfg.sigma, rho.grid);
  GridSigned h;
  h.grid = rho.grid;
  h.values.resize(rho.density.size());
  for (std::size_t i = 0; i < h.values.size(); ++i)
    h.values[i] = sqrt_n * (emp.density[i] - rho.density[i]);
  return dual_norm(rho, h, cfg.p);
}

std::vector<double> simulate_null_limit(const DistributionSpec& spec,
                                        const SmoothingConfig& cfg,
                                        const Grid& grid, int n_surrogate,
                                        int R, const SeedPath& seed_path,
                                        int parallelism) {
  spec.validate();
  cfg.validate();
  grid.validate();
  require(n_surrogate >= 1000, "simulate_null_limit: n_surrogate >= 1000");
  require(R >= 1, "simulate_null_limit: R must be positive");

  const GridMeasure rho = project_to_grid(spec, cfg.sigma, grid);
  std::vector<double> out(R);
  parallel_for(R, effective_parallelism(parallelism), [&](int r) {
    out[r] = null_limit_replicate(rho, spec, cfg, n_surrogate,
                                  seed_path.child("rep").child(r));
  });
  return out;
}

}  // namespace smoothwass
