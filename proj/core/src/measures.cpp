#include "smoothwass/measures.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smoothwass/errors.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

namespace {

constexpr double kWeightTol = 1e-12;

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::point_mass: return "point_mass";
    case Family::gaussian: return "gaussian";
    case Family::uniform_box: return "uniform_box";
    case Family::gaussian_mixture: return "gaussian_mixture";
    case Family::uniform_mixture: return "uniform_mixture";
  }
  throw ConfigError("unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "point_mass") return Family::point_mass;
  if (name == "gaussian") return Family::gaussian;
  if (name == "uniform_box") return Family::uniform_box;
  if (name == "gaussian_mixture") return Family::gaussian_mixture;
  if (name == "uniform_mixture") return Family::uniform_mixture;
  throw ConfigError("unknown family name: " + name);
}

void DistributionSpec::validate() const {
  require(dim >= 1 && dim <= 3, "dim must be in {1, 2, 3}");
  require(!weights.empty(), "spec has no components");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "mixture weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= kWeightTol,
          "mixture weights must sum to 1");
  const std::size_t c = weights.size();

  const bool is_gauss =
      family == Family::gaussian || family == Family::gaussian_mixture;
  const bool is_unif =
      family == Family::uniform_box || family == Family::uniform_mixture;

  if (family == Family::point_mass || is_gauss) {
    require(locations.size() == c, "locations/weights size mismatch");
    for (const auto& l : locations) {
      require(static_cast<int>(l.size()) == dim, "location dim mismatch");
      require(all_finite(l), "locations must be finite");
    }
  }
  if (is_gauss) {
    require(scales.size() == c, "scales/weights size mismatch");
    for (double s : scales) require(s > 0.0, "scales must be positive");
    if (truncate > 0.0)
      require(dim == 1, "gaussian truncation is supported for dim 1 only");
  }
  if (is_unif) {
    require(lo.size() == c && hi.size() == c, "box/weights size mismatch");
    for (std::size_t i = 0; i < c; ++i) {
      require(static_cast<int>(lo[i].size()) == dim &&
                  static_cast<int>(hi[i].size()) == dim,
              "box dim mismatch");
      for (int a = 0; a < dim; ++a)
        require(hi[i][a] > lo[i][a], "box must have positive side lengths");
    }
  }
  if (family == Family::point_mass || family == Family::gaussian ||
      family == Family::uniform_box) {
    require(c == 1, "non-mixture family must have one component");
  }
  if (sub_gaussian_psi2)
    require(*sub_gaussian_psi2 >= 0.0, "psi2 must be nonnegative");
}

bool DistributionSpec::compactly_supported() const {
  switch (family) {
    case Family::point_mass:
    case Family::uniform_box:
    case Family::uniform_mixture:
      return true;
    case Family::gaussian:
    case Family::gaussian_mixture:
      return truncate > 0.0;
  }
  return false;
}

nlohmann::json DistributionSpec::to_json() const {
  nlohmann::json params;
  switch (family) {
    case Family::point_mass:
      params["location"] = locations[0];
      break;
    case Family::gaussian:
      params["location"] = locations[0];
      params["scale"] = scales[0];
      if (truncate > 0.0) params["truncate"] = truncate;
      break;
    case Family::uniform_box:
      params["lo"] = lo[0];
      params["hi"] = hi[0];
      break;
    case Family::gaussian_mixture:
      params["weights"] = weights;
      params["locations"] = locations;
      params["scales"] = scales;
      if (truncate > 0.0) params["truncate"] = truncate;
      break;
    case Family::uniform_mixture:
      params["weights"] = weights;
      params["los"] = lo;
      params["his"] = hi;
      break;
  }
  nlohmann::json j{{"family", family_name(family)},
                   {"params", params},
                   {"dim", dim}};
  if (sub_gaussian_psi2) j["psi2"] = *sub_gaussian_psi2;
  return j;
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  DistributionSpec s;
  try {
    s.family = family_from_name(j.at("family").get<std::string>());
    s.dim = j.at("dim").get<int>();
    const auto& p = j.at("params");
    switch (s.family) {
      case Family::point_mass:
        s.weights = {1.0};
        s.locations = {p.at("location").get<std::vector<double>>()};
        break;
      case Family::gaussian:
        s.weights = {1.0};
        s.locations = {p.at("location").get<std::vector<double>>()};
        s.scales = {p.at("scale").get<double>()};
        s.truncate = p.value("truncate", 0.0);
        break;
      case Family::uniform_box:
        s.weights = {1.0};
        s.lo = {p.at("lo").get<std::vector<double>>()};
        s.hi = {p.at("hi").get<std::vector<double>>()};
        break;
      case Family::gaussian_mixture:
        s.weights = p.at("weights").get<std::vector<double>>();
        s.locations = p.at("locations").get<std::vector<std::vector<double>>>();
        s.scales = p.at("scales").get<std::vector<double>>();
        s.truncate = p.value("truncate", 0.0);
        break;
      case Family::uniform_mixture:
        s.weights = p.at("weights").get<std::vector<double>>();
        s.lo = p.at("los").get<std::vector<std::vector<double>>>();
        s.hi = p.at("his").get<std::vector<std::vector<double>>>();
        break;
    }
    if (j.contains("psi2")) s.sub_gaussian_psi2 = j.at("psi2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad distribution spec: ") + e.what());
  }
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::point_mass_at(std::vector<double> loc) {
  DistributionSpec s;
  s.family = Family::point_mass;
  s.dim = static_cast<int>(loc.size());
  s.weights = {1.0};
  s.locations = {std::move(loc)};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::gaussian_iso(std::vector<double> mean,
                                                double scale,
                                                double truncate) {
  DistributionSpec s;
  s.family = Family::gaussian;
  s.dim = static_cast<int>(mean.size());
  s.weights = {1.0};
  s.locations = {std::move(mean)};
  s.scales = {scale};
  s.truncate = truncate;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::uniform_box_on(std::vector<double> lo,
                                                  std::vector<double> hi) {
  DistributionSpec s;
  s.family = Family::uniform_box;
  s.dim = static_cast<int>(lo.size());
  s.weights = {1.0};
  s.lo = {std::move(lo)};
  s.hi = {std::move(hi)};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::gaussian_mixture_of(
    std::vector<double> weights, std::vector<std::vector<double>> means,
    std::vector<double> scales) {
  DistributionSpec s;
  s.family = Family::gaussian_mixture;
  s.dim = means.empty() ? 1 : static_cast<int>(means[0].size());
  s.weights = std::move(weights);
  s.locations = std::move(means);
  s.scales = std::move(scales);
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::uniform_mixture_of(
    std::vector<double> weights, std::vector<std::vector<double>> lo,
    std::vector<std::vector<double>> hi) {
  DistributionSpec s;
  s.family = Family::uniform_mixture;
  s.dim = lo.empty() ? 1 : static_cast<int>(lo[0].size());
  s.weights = std::move(weights);
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  s.validate();
  return s;
}

void Sample::validate() const {
  require(n >= 1, "sample must have at least one point");
  require(d >= 1, "sample dim must be positive");
  require(points.size() == static_cast<std::size_t>(n) * d,
          "sample storage size mismatch");
  require(all_finite(points), "sample entries must be finite");
}

void DiscreteMeasure::validate() const {
  require(k >= 1, "measure must have at least one atom");
  require(points.size() == static_cast<std::size_t>(k) * d,
          "measure storage size mismatch");
  require(weights.size() == static_cast<std::size_t>(k),
          "weights size mismatch");
  require(all_finite(points), "measure points must be finite");
  KahanSum total;
  for (double w : weights) {
    require(w >= 0.0, "weights must be nonnegative");
    total.add(w);
  }
  require(std::abs(total.value() - 1.0) <= kWeightTol,
          "weights must sum to 1");
  if (!origin_index.empty())
    require(origin_index.size() == static_cast<std::size_t>(k),
            "origin_index size mismatch");
}

SmoothingConfig SmoothingConfig::make(double p, double sigma, int m) {
  SmoothingConfig cfg;
  cfg.p = p;
  cfg.q = p / (p - 1.0);
  cfg.sigma = sigma;
  cfg.m = m;
  cfg.validate();
  return cfg;
}

void SmoothingConfig::validate() const {
  require(p > 1.0, "p must exceed 1");
  require(std::abs(1.0 / p + 1.0 / q - 1.0) <= 1e-12,
          "q must be the conjugate index of p");
  require(sigma > 0.0, "sigma must be positive");
  require(m >= 1, "m must be at least 1");
}

nlohmann::json SmoothingConfig::to_json() const {
  return {{"p", p}, {"q", q}, {"sigma", sigma}, {"m", m}};
}

SmoothingConfig SmoothingConfig::from_json(const nlohmann::json& j) {
  SmoothingConfig cfg;
  try {
    cfg.p = j.at("p").get<double>();
    cfg.q = j.contains("q") ? j.at("q").get<double>() : cfg.p / (cfg.p - 1.0);
    cfg.sigma = j.at("sigma").get<double>();
    cfg.m = j.value("m", 32);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad smoothing config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

int pick_component(const DistributionSpec& spec, Rng& rng) {
  if (spec.weights.size() == 1) return 0;
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < spec.weights.size(); ++c) {
    acc += spec.weights[c];
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(spec.weights.size()) - 1;
}

void draw_point(const DistributionSpec& spec, Rng& rng, double* out) {
  const int c = pick_component(spec, rng);
  switch (spec.family) {
    case Family::point_mass:
      for (int a = 0; a < spec.dim; ++a) out[a] = spec.locations[c][a];
      return;
    case Family::gaussian:
    case Family::gaussian_mixture: {
      const double s = spec.scales[c];
      if (spec.truncate > 0.0) {
        // dim == 1 (validated); redraw until inside the truncation window.
        double z;
        do {
          z = s * rng.normal();
        } while (std::abs(z) > spec.truncate);
        out[0] = spec.locations[c][0] + z;
      } else {
        for (int a = 0; a < spec.dim; ++a)
          out[a] = spec.locations[c][a] + s * rng.normal();
      }
      return;
    }
    case Family::uniform_box:
    case Family::uniform_mixture:
      for (int a = 0; a < spec.dim; ++a) {
        const double u = rng.uniform01();
        out[a] = spec.lo[c][a] + u * (spec.hi[c][a] - spec.lo[c][a]);
      }
      return;
  }
}

}  // namespace

Sample sample(const DistributionSpec& spec, int n, const SeedPath& seed_path) {
  spec.validate();
  require(n >= 1, "sample size must be positive");
  Sample s;
  s.n = n;
  s.d = spec.dim;
  s.points.resize(static_cast<std::size_t>(n) * spec.dim);
  s.spec_label = family_name(spec.family);
  s.seed_path = seed_path;
  Rng rng(seed_path);
  for (int i = 0; i < n; ++i)
    draw_point(spec, rng, s.points.data() + static_cast<std::size_t>(i) * spec.dim);
  return s;
}

DiscreteMeasure empirical(const Sample& s) {
  s.validate();
  DiscreteMeasure mu;
  mu.points = s.points;
  mu.k = s.n;
  mu.d = s.d;
  mu.weights.assign(s.n, 1.0 / static_cast<double>(s.n));
  mu.origin_index.resize(s.n);
  for (int i = 0; i < s.n; ++i) mu.origin_index[i] = i;
  return mu;
}

std::vector<double> gaussian_noise_tensor(int k, int m, int d,
                                          const SeedPath& seed_path) {
  std::vector<double> noise(static_cast<std::size_t>(k) * m * d);
  Rng rng(seed_path);
  for (auto& z : noise) z = rng.normal();
  return noise;
}

DiscreteMeasure smooth_augment(const DiscreteMeasure& mu,
                               const SmoothingConfig& cfg,
                               const SeedPath& seed_path) {
  const auto noise = gaussian_noise_tensor(mu.k, cfg.m, mu.d, seed_path);
  return smooth_augment_with(mu, cfg, noise);
}

DiscreteMeasure smooth_augment_with(const DiscreteMeasure& mu,
                                    const SmoothingConfig& cfg,
                                    std::span<const double> noise) {
  mu.validate();
  cfg.validate();
  const int m = cfg.m;
  require(noise.size() == static_cast<std::size_t>(mu.k) * m * mu.d,
          "noise tensor size mismatch");
  DiscreteMeasure out;
  out.k = mu.k * m;
  out.d = mu.d;
  out.points.resize(static_cast<std::size_t>(out.k) * out.d);
  out.weights.resize(out.k);
  out.origin_index.resize(out.k);
  const double inv_m = 1.0 / static_cast<double>(m);
  std::size_t idx = 0;
  for (int i = 0; i < mu.k; ++i) {
    const double wi = mu.weights[i] * inv_m;
    const int oi = mu.origin_index.empty() ? i : mu.origin_index[i];
    for (int j = 0; j < m; ++j) {
      for (int a = 0; a < mu.d; ++a) {
        out.points[idx * mu.d + a] =
            mu.at(i, a) + cfg.sigma * noise[idx * mu.d + a];
      }
      out.weights[idx] = wi;
      out.origin_index[idx] = oi;
      ++idx;
    }
  }
  return out;
}

Sample pool(const Sample& x, const Sample& y) {
  x.validate();
  y.validate();
  require(x.d == y.d, "pool: dimension mismatch");
  require(x.n == y.n, "pool: sample sizes must be equal");
  Sample out;
  out.n = 2 * x.n;
  out.d = x.d;
  out.points.reserve(out.points.size() + x.points.size() + y.points.size());
  out.points = x.points;
  out.points.insert(out.points.end(), y.points.begin(), y.points.end());
  out.spec_label = "pooled";
  out.seed_path = x.seed_path;
  return out;
}

MomentReport check_moment_condition(const DistributionSpec& spec,
                                    const SmoothingConfig& cfg) {
  spec.validate();
  cfg.validate();
  MomentReport r;
  const double bound = cfg.sigma / std::sqrt(cfg.p - 1.0);
  std::ostringstream detail;
  if (spec.compactly_supported()) {
    r.status = MomentStatus::satisfied;
    detail << "compactly supported distribution";
  } else if (spec.sub_gaussian_psi2) {
    const double psi2 = *spec.sub_gaussian_psi2;
    if (psi2 < bound) {
      r.status = MomentStatus::satisfied;
      detail << "psi2=" << psi2 << " < sigma/sqrt(p-1)=" << bound;
    } else {
      r.status = MomentStatus::not_satisfied;
      detail << "psi2=" << psi2 << " >= sigma/sqrt(p-1)=" << bound
             << "; sufficient condition not verified";
    }
  } else {
    r.status = MomentStatus::unknown;
    detail << "unbounded support and no declared psi2 bound";
  }
  r.detail = detail.str();
  return r;
}

}  // namespace smoothwass
