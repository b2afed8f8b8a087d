#include "smoothwass/mde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smoothwass/errors.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kHaltonBases[6] = {2, 3, 5, 7, 11, 13};

}  // namespace

std::string model_family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::gaussian_location: return "gaussian_location";
    case ModelFamily::gaussian_location_scale: return "gaussian_location_scale";
    case ModelFamily::uniform_location: return "uniform_location";
  }
  throw ConfigError("unknown model family");
}

ModelFamily model_family_from_name(const std::string& name) {
  if (name == "gaussian_location") return ModelFamily::gaussian_location;
  if (name == "gaussian_location_scale")
    return ModelFamily::gaussian_location_scale;
  if (name == "uniform_location") return ModelFamily::uniform_location;
  throw ConfigError("unknown model family: " + name);
}

int ParametricFamily::d0() const {
  return family == ModelFamily::gaussian_location_scale ? dim + 1 : dim;
}

bool ParametricFamily::base_is_gaussian() const {
  return family != ModelFamily::uniform_location;
}

void ParametricFamily::validate() const {
  require(dim >= 1 && dim <= 3, "model dim must be in {1, 2, 3}");
  require(static_cast<int>(lower.size()) == d0() &&
              static_cast<int>(upper.size()) == d0(),
          "theta box size must match d0");
  for (int j = 0; j < d0(); ++j)
    require(upper[j] > lower[j], "theta box must have nonempty interior");
  if (family == ModelFamily::gaussian_location_scale)
    require(lower[dim] > 0.0, "scale coordinate must be bounded away from 0");
}

void ParametricFamily::transform(std::span<const double> theta,
                                 std::span<const double> base, int n,
                                 std::vector<double>& out) const {
  out.resize(static_cast<std::size_t>(n) * dim);
  switch (family) {
    case ModelFamily::gaussian_location:
    case ModelFamily::uniform_location:
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = theta[i % dim] + base[i];
      return;
    case ModelFamily::gaussian_location_scale: {
      const double s = theta[dim];
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = theta[i % dim] + s * base[i];
      return;
    }
  }
}

void ParametricFamily::clamp(std::vector<double>& theta) const {
  for (int j = 0; j < d0(); ++j)
    theta[j] = std::clamp(theta[j], lower[j], upper[j]);
}

ParametricFamily ParametricFamily::make(ModelFamily f, int dim,
                                        std::vector<double> lower,
                                        std::vector<double> upper) {
  ParametricFamily fam;
  fam.family = f;
  fam.dim = dim;
  fam.lower = std::move(lower);
  fam.upper = std::move(upper);
  fam.validate();
  return fam;
}

nlohmann::json MdeResult::to_json() const {
  return {{"theta_hat", theta_hat},
          {"value", value},
          {"converged", converged},
          {"evaluations", evaluations}};
}

MdeObjective::MdeObjective(const Sample& x, const ParametricFamily& fam,
                           const SmoothingConfig& cfg, int n_model,
                           const SeedPath& seed_path)
    : fam_(fam), cfg_(cfg), n_model_(n_model > 0 ? n_model : x.n) {
  x.validate();
  fam_.validate();
  cfg_.validate();
  require(x.d == fam_.dim, "data dimension does not match the model family");

  const SeedPath base_seed = seed_path.child("base");
  if (fam_.base_is_gaussian()) {
    base_ = gaussian_noise_tensor(n_model_, 1, fam_.dim, base_seed);
  } else {
    base_.resize(static_cast<std::size_t>(n_model_) * fam_.dim);
    Rng rng(base_seed);
    for (auto& u : base_) u = rng.uniform01();
  }
  model_noise_ = gaussian_noise_tensor(n_model_, cfg_.m, fam_.dim,
                                       seed_path.child("noise").child("model"));
  const auto data_noise = gaussian_noise_tensor(
      x.n, cfg_.m, x.d, seed_path.child("noise").child("x"));
  data_aug_ = smooth_augment_with(empirical(x), cfg_, data_noise);
  if (x.d == 1) data_sorted_ = detail::sort_1d(data_aug_);
}

double MdeObjective::operator()(std::span<const double> theta) const {
  fam_.transform(theta, base_, n_model_, scratch_points_);
  DiscreteMeasure model;
  model.points = scratch_points_;
  model.k = n_model_;
  model.d = fam_.dim;
  model.weights.assign(n_model_, 1.0 / static_cast<double>(n_model_));
  const DiscreteMeasure model_aug =
      smooth_augment_with(model, cfg_, model_noise_);
  double cost;
  if (fam_.dim == 1) {
    cost = detail::monotone_cost(data_sorted_, detail::sort_1d(model_aug),
                                 cfg_.p);
  } else {
    cost = solve_exact(data_aug_, model_aug, cfg_.p).plan.primal_cost;
  }
  return cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / cfg_.p);
}

namespace {

struct NmState {
  std::vector<std::vector<double>> vertices;
  std::vector<double> values;
};

double simplex_diameter(const NmState& s) {
  double diam = 0.0;
  for (std::size_t a = 0; a < s.vertices.size(); ++a)
    for (std::size_t b = a + 1; b < s.vertices.size(); ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < s.vertices[a].size(); ++j) {
        const double d = s.vertices[a][j] - s.vertices[b][j];
        d2 += d * d;
      }
      diam = std::max(diam, std::sqrt(d2));
    }
  return diam;
}

// One Nelder-Mead run from a given start; candidates are clamped back into
// the box.  Returns true if the simplex collapsed below xtol.
bool nelder_mead(const MdeObjective& obj, const ParametricFamily& fam,
                 std::vector<double> start, const MdeOptions& opts,
                 MdeResult& global) {
  const int d0 = fam.d0();
  auto eval = [&](const std::vector<double>& th) {
    const double v = obj(th);
    global.trace.push_back({th, v});
    ++global.evaluations;
    if (v < global.value) {
      global.value = v;
      global.theta_hat = th;
    }
    return v;
  };

  NmState s;
  fam.clamp(start);
  s.vertices.push_back(start);
  for (int j = 0; j < d0; ++j) {
    auto v = start;
    const double step = 0.1 * (fam.upper[j] - fam.lower[j]);
    v[j] += v[j] + step <= fam.upper[j] ? step : -step;
    fam.clamp(v);
    s.vertices.push_back(v);
  }
  s.values.resize(s.vertices.size());
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    s.values[i] = eval(s.vertices[i]);

  for (int it = 0; it < opts.max_iter; ++it) {
    // Order: best first.
    std::vector<std::size_t> ord(s.vertices.size());
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      return s.values[a] != s.values[b] ? s.values[a] < s.values[b] : a < b;
    });
    NmState t;
    for (auto i : ord) {
      t.vertices.push_back(s.vertices[i]);
      t.values.push_back(s.values[i]);
    }
    s = std::move(t);

    if (simplex_diameter(s) < opts.xtol) return true;
    if (s.values.back() - s.values.front() < opts.ftol) return false;

    const std::size_t worst = s.vertices.size() - 1;
    std::vector<double> centroid(d0, 0.0);
    for (std::size_t i = 0; i < worst; ++i)
      for (int j = 0; j < d0; ++j) centroid[j] += s.vertices[i][j];
    for (int j = 0; j < d0; ++j) centroid[j] /= static_cast<double>(worst);

    auto blend = [&](double c) {
      std::vector<double> v(d0);
      for (int j = 0; j < d0; ++j)
        v[j] = centroid[j] + c * (centroid[j] - s.vertices[worst][j]);
      fam.clamp(v);
      return v;
    };

    const auto reflected = blend(1.0);
    const double fr = eval(reflected);
    if (fr < s.values.front()) {
      const auto expanded = blend(2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        s.vertices[worst] = expanded;
        s.values[worst] = fe;
      } else {
        s.vertices[worst] = reflected;
        s.values[worst] = fr;
      }
    } else if (fr < s.values[worst - 1]) {
      s.vertices[worst] = reflected;
      s.values[worst] = fr;
    } else {
      const bool outside = fr < s.values[worst];
      auto contracted = blend(outside ? 0.5 : -0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, s.values[worst])) {
        s.vertices[worst] = contracted;
        s.values[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 1; i < s.vertices.size(); ++i) {
          for (int j = 0; j < d0; ++j)
            s.vertices[i][j] =
                0.5 * (s.vertices[i][j] + s.vertices[0][j]);
          fam.clamp(s.vertices[i]);
          s.values[i] = eval(s.vertices[i]);
        }
      }
    }
  }
  return simplex_diameter(s) < opts.xtol;
}

}  // namespace

MdeResult fit_mde(const Sample& x, const ParametricFamily& fam,
                  const SmoothingConfig& cfg, int n_model,
                  const MdeOptions& opts, const SeedPath& seed_path) {
  const MdeObjective obj(x, fam, cfg, n_model, seed_path);
  const int d0 = fam.d0();

  MdeResult result;
  result.value = std::numeric_limits<double>::infinity();

  const int starts = std::max(1, opts.multistart);
  bool any_converged = false;
  for (int sidx = 0; sidx < starts; ++sidx) {
    std::vector<double> start(d0);
    for (int j = 0; j < d0; ++j) {
      const double u = halton(sidx + 1, kHaltonBases[j % 6]);
      start[j] = fam.lower[j] + u * (fam.upper[j] - fam.lower[j]);
    }
    any_converged = nelder_mead(obj, fam, std::move(start), opts, result) ||
                    any_converged;
  }
  result.converged = any_converged;
  return result;
}

ReplicationReport mde_limit_experiment(const ParametricFamily& fam,
                                       const std::vector<double>& theta_star,
                                       const SmoothingConfig& cfg, int n, int R,
                                       const SeedPath& seed_path,
                                       const MdeOptions& opts,
                                       int parallelism) {
  fam.validate();
  cfg.validate();
  require(static_cast<int>(theta_star.size()) == fam.d0(),
          "theta_star size must match d0");
  for (int j = 0; j < fam.d0(); ++j)
    require(theta_star[j] > fam.lower[j] && theta_star[j] < fam.upper[j],
            "theta_star must be interior to the box");

  const int d0 = fam.d0();
  std::vector<std::string> columns;
  for (int j = 0; j < d0; ++j) columns.push_back("dev_" + std::to_string(j));
  columns.push_back("value");
  columns.push_back("converged");

  const double sqrt_n = std::sqrt(static_cast<double>(n));
  auto fn = [&](int, const SeedPath& sr) {
    // Fresh data from the model at theta_star.
    std::vector<double> base;
    if (fam.base_is_gaussian()) {
      base = gaussian_noise_tensor(n, 1, fam.dim, sr.child("data"));
    } else {
      base.resize(static_cast<std::size_t>(n) * fam.dim);
      Rng rng(sr.child("data"));
      for (auto& u : base) u = rng.uniform01();
    }
    Sample data;
    data.n = n;
    data.d = fam.dim;
    fam.transform(theta_star, base, n, data.points);
    const MdeResult fit = fit_mde(data, fam, cfg, n, opts, sr.child("fit"));
    std::vector<double> row;
    for (int j = 0; j < d0; ++j)
      row.push_back(sqrt_n * (fit.theta_hat[j] - theta_star[j]));
    row.push_back(fit.value);
    row.push_back(fit.converged ? 1.0 : 0.0);
    return row;
  };

  ReplicationReport rep =
      run_replications(columns, R, parallelism, seed_path, fn);
  // Per-coordinate limit diagnostics against the moment-fitted normal.
  nlohmann::json diag;
  for (int j = 0; j < d0; ++j) {
    const auto devs = rep.column("dev_" + std::to_string(j));
    if (devs.size() >= 2) {
      const double m = mean(devs);
      const double s2 = sample_variance(devs);
      diag["dev_" + std::to_string(j)] = {
          {"mean", m},
          {"variance", s2},
          {"ks_fitted_normal", ks_vs_normal(devs, m, std::sqrt(s2))},
          {"se_mean", std::sqrt(s2 / static_cast<double>(devs.size()))}};
    }
  }
  rep.summary["mde_limit"] = diag;
  return rep;
}

ReplicationReport mde_value_experiment(const ParametricFamily& fam,
                                       const std::vector<double>& theta_star,
                                       const SmoothingConfig& cfg, int n, int R,
                                       const SeedPath& seed_path,
                                       const MdeOptions& opts,
                                       int parallelism) {
  fam.validate();
  cfg.validate();
  require(static_cast<int>(theta_star.size()) == fam.d0(),
          "theta_star size must match d0");

  const std::vector<std::string> columns{"scaled_value",
                                         "scaled_value_at_star", "converged"};
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  auto fn = [&](int, const SeedPath& sr) {
    std::vector<double> base;
    if (fam.base_is_gaussian()) {
      base = gaussian_noise_tensor(n, 1, fam.dim, sr.child("data"));
    } else {
      base.resize(static_cast<std::size_t>(n) * fam.dim);
      Rng rng(sr.child("data"));
      for (auto& u : base) u = rng.uniform01();
    }
    Sample data;
    data.n = n;
    data.d = fam.dim;
    fam.transform(theta_star, base, n, data.points);
    const SeedPath fit_seed = sr.child("fit");
    const MdeResult fit = fit_mde(data, fam, cfg, n, opts, fit_seed);
    // Same frozen randomness as inside the fit.
    const MdeObjective obj(data, fam, cfg, n, fit_seed);
    return std::vector<double>{sqrt_n * fit.value, sqrt_n * obj(theta_star),
                               fit.converged ? 1.0 : 0.0};
  };

  ReplicationReport rep =
      run_replications(columns, R, parallelism, seed_path, fn);
  const auto vals = rep.column("scaled_value");
  if (!vals.empty()) {
    rep.summary["scaled_value_median"] = median(vals);
  }
  return rep;
}

}  // namespace smoothwass
