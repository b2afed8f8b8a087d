#include "smoothwass/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "smoothwass/errors.hpp"
#include "smoothwass/estimator.hpp"
#include "smoothwass/inference.hpp"
#include "smoothwass/io.hpp"
#include "smoothwass/mde.hpp"
#include "smoothwass/measures.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/parallel.hpp"
#include "smoothwass/sobolev.hpp"
#include "smoothwass/stats.hpp"

namespace smoothwass {

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::json column_summary(std::vector<double> vals) {
  nlohmann::json j;
  j["count"] = vals.size();
  if (vals.empty()) return j;
  j["mean"] = mean(vals);
  if (vals.size() >= 2) j["variance"] = sample_variance(vals);
  std::sort(vals.begin(), vals.end());
  j["min"] = vals.front();
  j["max"] = vals.back();
  nlohmann::json q;
  for (double a : {0.05, 0.25, 0.5, 0.75, 0.95})
    q[format_double(a)] = lower_quantile_sorted(vals, a);
  j["quantiles"] = q;
  return j;
}

}  // namespace

nlohmann::json ReplicationReport::summarize(
    const std::vector<std::string>& columns,
    const std::vector<ReplicateRow>& rows) {
  nlohmann::json cols;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (const auto& r : rows)
      if (r.ok) vals.push_back(r.values[c]);
    cols[columns[c]] = column_summary(std::move(vals));
  }
  int n_ok = 0;
  for (const auto& r : rows) n_ok += r.ok ? 1 : 0;
  return {{"columns", cols},
          {"R", rows.size()},
          {"n_ok", n_ok}};
}

std::vector<double> ReplicationReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw ConfigError("report has no column named " + name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    if (r.ok) out.push_back(r.values[c]);
  return out;
}

std::string ReplicationReport::to_csv() const {
  std::string out = "replicate,seed,ok";
  for (const auto& c : columns) {
    out += ',';
    out += c;
  }
  out += ",error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.id);
    out += ',';
    out += r.seed;
    out += ',';
    out += r.ok ? '1' : '0';
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += ',';
      if (r.ok) out += format_double(r.values[c]);
    }
    out += ',';
    if (!r.error.empty()) out += csv_quote(r.error);
    out += '\n';
  }
  return out;
}

void ReplicationReport::write_csv(const std::string& path) const {
  write_text_file(path, to_csv());
}

void ReplicationReport::write_json(const std::string& path) const {
  nlohmann::json j{{"summary", summary}, {"metadata", metadata}};
  write_text_file(path, j.dump(2) + "\n");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.command = j.at("command").get<std::string>();
    cfg.params = j.value("params", nlohmann::json::object());
    cfg.master_seed = j.value("master_seed", std::uint64_t{1});
    cfg.R = j.value("R", 1);
    cfg.parallelism = j.value("parallelism", 1);
    cfg.out_prefix = j.value("out", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  if (cfg.command.empty()) throw ConfigError("experiment config: empty command");
  if (cfg.R < 1) throw ConfigError("experiment config: R must be positive");
  if (cfg.parallelism < 1)
    throw ConfigError("experiment config: parallelism must be positive");
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"command", command},       {"params", params},
          {"master_seed", master_seed}, {"R", R},
          {"parallelism", parallelism}, {"out", out_prefix}};
}

std::uint64_t ExperimentConfig::config_hash() const {
  const nlohmann::json id{{"command", command},
                          {"params", params},
                          {"master_seed", master_seed},
                          {"R", R}};
  return fnv1a64(id.dump());
}

ReplicationReport run_replications(const std::vector<std::string>& columns,
                                   int R, int parallelism,
                                   const SeedPath& root,
                                   const ReplicateFn& fn) {
  ReplicationReport rep;
  rep.columns = columns;
  rep.rows.resize(R);
  parallel_for(R, effective_parallelism(parallelism), [&](int r) {
    const SeedPath sr = root.child("rep").child(r);
    ReplicateRow row;
    row.id = r;
    row.seed = sr.to_string();
    try {
      row.values = fn(r, sr);
      if (row.values.size() != columns.size())
        throw SolverError("replicate produced wrong number of statistics");
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.values.clear();
    }
    rep.rows[r] = std::move(row);
  });
  rep.partial = std::any_of(rep.rows.begin(), rep.rows.end(),
                            [](const ReplicateRow& r) { return !r.ok; });
  rep.summary = ReplicationReport::summarize(rep.columns, rep.rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Command registry.

namespace {

SmoothingConfig smoothing_from(const nlohmann::json& p) {
  return SmoothingConfig::make(p.at("p").get<double>(),
                               p.at("sigma").get<double>(), p.value("m", 32));
}

DistributionSpec spec_from(const nlohmann::json& p, const char* key) {
  if (!p.contains(key))
    throw ConfigError(std::string("params missing spec: ") + key);
  return DistributionSpec::from_json(p.at(key));
}

Grid grid_from(const nlohmann::json& g) {
  const Boundary b = g.value("boundary", std::string("zero_flux")) == "periodic"
                         ? Boundary::periodic
                         : Boundary::zero_flux;
  if (g.at("lo").is_array()) {
    const auto lo = g.at("lo").get<std::vector<double>>();
    const auto hi = g.at("hi").get<std::vector<double>>();
    const auto nodes = g.at("nodes").get<std::vector<int>>();
    if (lo.size() != 2 || hi.size() != 2 || nodes.size() != 2)
      throw ConfigError("2-D grid spec needs lo, hi, nodes of size 2");
    return Grid::rect(nodes[0], nodes[1], {lo[0], lo[1]}, {hi[0], hi[1]}, b);
  }
  return Grid::line(g.at("nodes").get<int>(), g.at("lo").get<double>(),
                    g.at("hi").get<double>(), b);
}

// Frozen dense reference: a big sample augmented once with its own m.
struct DenseReference {
  DiscreteMeasure aug;
  detail::Sorted1D sorted;
  int n = 0;
};

DenseReference make_dense_reference(const DistributionSpec& spec, int size,
                                    int m_ref, const SmoothingConfig& cfg,
                                    const SeedPath& seed) {
  DenseReference ref;
  ref.n = size;
  const Sample s = sample(spec, size, seed.child("sample"));
  SmoothingConfig ref_cfg = cfg;
  ref_cfg.m = m_ref;
  ref.aug = smooth_augment(empirical(s), ref_cfg, seed.child("noise"));
  if (spec.dim == 1) ref.sorted = detail::sort_1d(ref.aug);
  return ref;
}

ReplicationReport run_null_one_mc(const ExperimentConfig& cfg,
                                  const SeedPath& root) {
  const auto& p = cfg.params;
  const DistributionSpec mu = spec_from(p, "mu");
  if (mu.dim != 1)
    throw ConfigError("null-one-mc currently supports d = 1 only");
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const int ref_size = p.value("ref_size", 100000);
  const int ref_m = p.value("ref_m", 4);

  const DenseReference ref =
      make_dense_reference(mu, ref_size, ref_m, sc, root.child("frozen"));
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  auto fn = [&, sc](int, const SeedPath& sr) {
    const Sample x = sample(mu, n, sr.child("x"));
    const DiscreteMeasure aug =
        smooth_augment(empirical(x), sc, sr.child("noise"));
    const double cost =
        detail::monotone_cost(detail::sort_1d(aug), ref.sorted, sc.p);
    const double w = cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / sc.p);
    return std::vector<double>{sqrt_n * w};
  };
  return run_replications({"stat"}, cfg.R, cfg.parallelism, root, fn);
}

ReplicationReport run_null_two_mc(const ExperimentConfig& cfg,
                                  const SeedPath& root) {
  const auto& p = cfg.params;
  const DistributionSpec mu = spec_from(p, "mu");
  const DistributionSpec nu =
      p.contains("nu") ? spec_from(p, "nu") : mu;
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const bool common = p.value("common_noise", true);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  auto fn = [&, sc](int, const SeedPath& sr) {
    const Sample x = sample(mu, n, sr.child("x"));
    const Sample y = sample(nu, n, sr.child("y"));
    const double w =
        detail::smooth_w_between(x, y, sc, sr.child("noise"), common);
    return std::vector<double>{sqrt_n * w};
  };
  return run_replications({"stat"}, cfg.R, cfg.parallelism, root, fn);
}

ReplicationReport run_clt_alt(const ExperimentConfig& cfg,
                              const SeedPath& root) {
  const auto& p = cfg.params;
  const std::string mode = p.value("mode", std::string("two"));
  const DistributionSpec mu = spec_from(p, "mu");
  const DistributionSpec nu = spec_from(p, "nu");
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const int ref_size = p.value("ref_size", 100000);
  const int ref_m = p.value("ref_m", 8);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  ReplicationReport rep;
  double w_ref = 0.0;

  if (mode == "one") {
    const DenseReference nu_ref =
        make_dense_reference(nu, ref_size, ref_m, sc, root.child("nuref"));
    if (p.contains("w_ref")) {
      w_ref = p.at("w_ref").get<double>();
    } else {
      // Reference value against the same frozen nu representation.
      const DenseReference mu_ref =
          make_dense_reference(mu, ref_size, ref_m, sc, root.child("muref"));
      const double cost = mu.dim == 1
                              ? detail::monotone_cost(mu_ref.sorted,
                                                      nu_ref.sorted, sc.p)
                              : solve_exact(mu_ref.aug, nu_ref.aug, sc.p)
                                    .plan.primal_cost;
      w_ref = cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / sc.p);
    }
    auto fn = [&, sc](int, const SeedPath& sr) {
      const Sample x = sample(mu, n, sr.child("x"));
      const DiscreteMeasure aug =
          smooth_augment(empirical(x), sc, sr.child("noise"));
      const auto est = estimate_from_augmented(aug, n, nu_ref.aug, nu_ref.n,
                                               sc, sr);
      const double v2 = plugin_variance(est, VarianceMode::one_sample).v_squared;
      return std::vector<double>{est.value_wp, v2};
    };
    rep = run_replications({"w", "v2"}, cfg.R, cfg.parallelism, root, fn);
  } else if (mode == "two") {
    if (p.contains("w_ref")) {
      w_ref = p.at("w_ref").get<double>();
    } else {
      const DenseReference mu_ref =
          make_dense_reference(mu, ref_size, ref_m, sc, root.child("muref"));
      const DenseReference nu_ref =
          make_dense_reference(nu, ref_size, ref_m, sc, root.child("nuref"));
      const double cost = mu.dim == 1
                              ? detail::monotone_cost(mu_ref.sorted,
                                                      nu_ref.sorted, sc.p)
                              : solve_exact(mu_ref.aug, nu_ref.aug, sc.p)
                                    .plan.primal_cost;
      w_ref = cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / sc.p);
    }
    auto fn = [&, sc](int, const SeedPath& sr) {
      const Sample x = sample(mu, n, sr.child("x"));
      const Sample y = sample(nu, n, sr.child("y"));
      const auto est = estimate_swd(x, y, sc, sr, false);
      const double v2 = plugin_variance(est, VarianceMode::two_sample).v_squared;
      return std::vector<double>{est.value_wp, v2};
    };
    rep = run_replications({"w", "v2"}, cfg.R, cfg.parallelism, root, fn);
  } else {
    throw ConfigError("clt-alt: mode must be 'one' or 'two'");
  }

  rep.metadata["w_ref"] = w_ref;
  const auto ws = rep.column("w");
  if (ws.size() >= 2) {
    std::vector<double> dev(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
      dev[i] = sqrt_n * (ws[i] - w_ref);
    const double m = mean(dev);
    const double s2 = sample_variance(dev);
    rep.summary["clt"] = {
        {"dev_mean", m},
        {"dev_variance", s2},
        {"ks_fitted_normal", ks_vs_normal(dev, m, std::sqrt(s2))},
        {"v2_median", median(rep.column("v2"))}};
  }
  return rep;
}

ReplicationReport run_null_sim(const ExperimentConfig& cfg,
                               const SeedPath& root) {
  const auto& p = cfg.params;
  const DistributionSpec mu = spec_from(p, "mu");
  SmoothingConfig sc = SmoothingConfig::make(p.at("p").get<double>(),
                                             p.at("sigma").get<double>(), 1);
  const int n_surrogate = p.at("n_surrogate").get<int>();
  const Grid grid = grid_from(p.at("grid"));
  const GridMeasure rho = project_to_grid(mu, sc.sigma, grid);

  auto fn = [&, sc](int, const SeedPath& sr) {
    return std::vector<double>{
        null_limit_replicate(rho, mu, sc, n_surrogate, sr)};
  };
  return run_replications({"norm"}, cfg.R, cfg.parallelism, root, fn);
}

ReplicationReport run_test_level(const ExperimentConfig& cfg,
                                 const SeedPath& root) {
  const auto& p = cfg.params;
  const DistributionSpec mu = spec_from(p, "mu");
  const DistributionSpec nu = p.contains("nu") ? spec_from(p, "nu") : mu;
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const double alpha = p.value("alpha", 0.1);
  const int B = p.value("B", 500);

  auto fn = [&, sc](int, const SeedPath& sr) {
    const Sample x = sample(mu, n, sr.child("x"));
    const Sample y = sample(nu, n, sr.child("y"));
    const TestResult t = equality_test(x, y, sc, alpha, B, sr.child("test"));
    return std::vector<double>{t.statistic, t.critical_value, t.p_value,
                               t.reject ? 1.0 : 0.0};
  };
  ReplicationReport rep = run_replications(
      {"statistic", "critical", "p_value", "reject"}, cfg.R, cfg.parallelism,
      root, fn);
  const auto rejects = rep.column("reject");
  if (!rejects.empty()) rep.summary["rejection_rate"] = mean(rejects);
  return rep;
}

ReplicationReport run_ci_coverage(const ExperimentConfig& cfg,
                                  const SeedPath& root) {
  const auto& p = cfg.params;
  const DistributionSpec mu = spec_from(p, "mu");
  const DistributionSpec nu = spec_from(p, "nu");
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const double alpha = p.value("alpha", 0.05);
  const int B = p.value("B", 500);

  double target;
  if (p.contains("target")) {
    target = p.at("target").get<double>();
  } else {
    const int ref_size = p.value("ref_size", 100000);
    const int ref_m = p.value("ref_m", 8);
    const DenseReference mu_ref =
        make_dense_reference(mu, ref_size, ref_m, sc, root.child("muref"));
    const DenseReference nu_ref =
        make_dense_reference(nu, ref_size, ref_m, sc, root.child("nuref"));
    const double cost =
        mu.dim == 1
            ? detail::monotone_cost(mu_ref.sorted, nu_ref.sorted, sc.p)
            : solve_exact(mu_ref.aug, nu_ref.aug, sc.p).plan.primal_cost;
    target = cost <= 0.0 ? 0.0 : std::exp(std::log(cost) / sc.p);
  }

  auto fn = [&, sc](int, const SeedPath& sr) {
    const Sample x = sample(mu, n, sr.child("x"));
    const Sample y = sample(nu, n, sr.child("y"));
    const Interval ci = confidence_interval(x, y, sc, alpha, B, sr.child("ci"));
    const double cover = ci.lo <= target && target <= ci.hi ? 1.0 : 0.0;
    return std::vector<double>{ci.lo, ci.hi, cover};
  };
  ReplicationReport rep = run_replications({"lo", "hi", "cover"}, cfg.R,
                                           cfg.parallelism, root, fn);
  rep.metadata["target_w"] = target;
  const auto covers = rep.column("cover");
  if (!covers.empty()) rep.summary["coverage"] = mean(covers);
  return rep;
}

ParametricFamily family_from(const nlohmann::json& p) {
  return ParametricFamily::make(
      model_family_from_name(p.at("family").get<std::string>()),
      p.value("dim", 1), p.at("lower").get<std::vector<double>>(),
      p.at("upper").get<std::vector<double>>());
}

MdeOptions mde_options_from(const nlohmann::json& p, int n) {
  MdeOptions opts;
  opts.xtol = p.value("xtol", 1e-6);
  opts.ftol = p.value("ftol", 1e-4 / std::sqrt(static_cast<double>(n)));
  opts.max_iter = p.value("max_iter", 400);
  opts.multistart = p.value("multistart", 5);
  return opts;
}

ReplicationReport run_mde_limit(const ExperimentConfig& cfg,
                                const SeedPath& root) {
  const auto& p = cfg.params;
  const ParametricFamily fam = family_from(p);
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const auto theta_star = p.at("theta_star").get<std::vector<double>>();
  return mde_limit_experiment(fam, theta_star, sc, n, cfg.R, root,
                              mde_options_from(p, n), cfg.parallelism);
}

ReplicationReport run_mde_value(const ExperimentConfig& cfg,
                                const SeedPath& root) {
  const auto& p = cfg.params;
  const ParametricFamily fam = family_from(p);
  const SmoothingConfig sc = smoothing_from(p);
  const int n = p.at("n").get<int>();
  const auto theta_star = p.at("theta_star").get<std::vector<double>>();
  return mde_value_experiment(fam, theta_star, sc, n, cfg.R, root,
                              mde_options_from(p, n), cfg.parallelism);
}

using CommandFn = ReplicationReport (*)(const ExperimentConfig&,
                                        const SeedPath&);

struct CommandEntry {
  const char* name;
  CommandFn fn;
};

constexpr CommandEntry kCommands[] = {
    {"null-one-mc", run_null_one_mc}, {"null-two-mc", run_null_two_mc},
    {"clt-alt", run_clt_alt},         {"null-sim", run_null_sim},
    {"test-level", run_test_level},   {"ci-coverage", run_ci_coverage},
    {"mde-limit", run_mde_limit},     {"mde-value", run_mde_value},
};

}  // namespace

std::vector<std::string> experiment_commands() {
  std::vector<std::string> out;
  for (const auto& c : kCommands) out.emplace_back(c.name);
  return out;
}

ReplicationReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CommandFn fn = nullptr;
  for (const auto& c : kCommands)
    if (cfg.command == c.name) fn = c.fn;
  if (!fn) throw ConfigError("unknown experiment command: " + cfg.command);

  SeedPath root(cfg.master_seed);
  root = root.child(cfg.command);
  ReplicationReport rep = fn(cfg, root);

  const auto t1 = std::chrono::steady_clock::now();
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cfg.config_hash()));
  rep.metadata["config"] = cfg.to_json();
  rep.metadata["config_hash"] = hash_hex;
  rep.metadata["version"] = kVersion;
  rep.metadata["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  rep.metadata["partial"] = rep.partial;

  if (!cfg.out_prefix.empty()) {
    rep.write_csv(cfg.out_prefix + ".csv");
    rep.write_json(cfg.out_prefix + ".json");
  }
  return rep;
}

}  // namespace smoothwass
