// Command line surface for the smoothwass library: point estimates,
// bootstrap distributions, confidence intervals, two-sample tests,
// null-limit simulation, comparison-inequality checks, minimum distance
// estimation, and replicated experiments driven by JSON configs.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "smoothwass/errors.hpp"
#include "smoothwass/estimator.hpp"
#include "smoothwass/experiment.hpp"
#include "smoothwass/inference.hpp"
#include "smoothwass/io.hpp"
#include "smoothwass/mde.hpp"
#include "smoothwass/measures.hpp"
#include "smoothwass/sobolev.hpp"

namespace sw = smoothwass;
using nlohmann::json;

namespace {

struct SampleInput {
  std::string csv;
  std::string spec;
  int n = 0;
};

void add_sample_options(CLI::App* cmd, SampleInput& in, const char* tag) {
  cmd->add_option(std::string("--") + tag + "-csv", in.csv,
                  std::string("CSV file with the ") + tag + " sample");
  cmd->add_option(std::string("--") + tag, in.spec,
                  std::string("distribution spec JSON file for ") + tag);
  cmd->add_option(std::string("--n-") + tag, in.n,
                  std::string("points to draw when --") + tag + " is a spec");
}

sw::Sample load_sample(const SampleInput& in, const sw::SeedPath& seed,
                       const char* tag) {
  if (!in.csv.empty()) return sw::sample_from_csv(sw::read_text_file(in.csv));
  if (in.spec.empty())
    throw sw::ConfigError(std::string("no input given for sample '") + tag +
                          "': pass --" + tag + "-csv or --" + tag);
  const auto spec =
      sw::DistributionSpec::from_json(json::parse(sw::read_text_file(in.spec)));
  if (in.n < 1)
    throw sw::ConfigError(std::string("--n-") + tag +
                          " must be set when sampling from a spec");
  return sw::sample(spec, in.n, seed.child(tag));
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    sw::write_text_file(out_path, text);
}

sw::Grid make_grid(int nodes, double lo, double hi, const std::string& bnd,
                   bool* ok = nullptr) {
  (void)ok;
  return sw::Grid::line(nodes, lo, hi,
                        bnd == "periodic" ? sw::Boundary::periodic
                                          : sw::Boundary::zero_flux);
}

int run(int argc, char** argv) {
  CLI::App app{"smooth p-Wasserstein distance estimation and inference"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t master_seed = 1;
  app.add_option("--master-seed", master_seed, "root seed for all randomness")
      ->capture_default_str();

  double p = 2.0, sigma = 1.0;
  int m = 32;
  auto add_smoothing = [&](CLI::App* cmd) {
    cmd->add_option("--p", p, "order of the distance (> 1)")
        ->capture_default_str();
    cmd->add_option("--sigma", sigma, "smoothing level (> 0)")
        ->capture_default_str();
    cmd->add_option("--m", m, "noise copies per support point")
        ->capture_default_str();
  };

  std::string out_path;

  // --- estimate -------------------------------------------------------
  auto* est_cmd = app.add_subcommand("estimate", "point estimate of W_p^(sigma)");
  SampleInput est_x, est_y;
  add_sample_options(est_cmd, est_x, "x");
  add_sample_options(est_cmd, est_y, "y");
  add_smoothing(est_cmd);
  bool common_noise = false;
  est_cmd->add_flag("--common-noise", common_noise,
                    "share one noise tensor across both sides");
  std::string plan_csv, duals_csv;
  est_cmd->add_option("--plan-csv", plan_csv, "write the optimal plan here");
  est_cmd->add_option("--duals-csv", duals_csv, "write the dual potentials here");
  bool with_variance = false;
  est_cmd->add_flag("--variance", with_variance,
                    "report plug-in variances (invalid at the null)");
  est_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- bootstrap ------------------------------------------------------
  auto* boot_cmd =
      app.add_subcommand("bootstrap", "bootstrap distribution (one-column CSV)");
  SampleInput boot_x, boot_y;
  add_sample_options(boot_cmd, boot_x, "x");
  add_sample_options(boot_cmd, boot_y, "y");
  add_smoothing(boot_cmd);
  std::string scheme = "pooled-null";
  boot_cmd
      ->add_option("--scheme", scheme,
                   "one-sample-null | one-sample-alt | two-sample-alt | "
                   "pooled-null")
      ->capture_default_str();
  bool naive_null = false;
  boot_cmd->add_flag("--naive-null", naive_null,
                     "per-sample resampling under the null (inconsistent; "
                     "demonstration only)");
  int B = 500;
  boot_cmd->add_option("--B", B, "bootstrap replicates")->capture_default_str();
  int bootstrap_m = 0;
  boot_cmd->add_option("--bootstrap-m", bootstrap_m,
                       "override m inside the bootstrap loop (default: --m)");
  int nu_size = 0;
  boot_cmd->add_option("--nu-dense-size", nu_size,
                       "dense representation size for one-sample-alt "
                       "(default max(10 n, 10000))");
  boot_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // --- ci ---------------------------------------------------------------
  auto* ci_cmd = app.add_subcommand("ci", "bootstrap confidence interval");
  SampleInput ci_x, ci_y;
  add_sample_options(ci_cmd, ci_x, "x");
  add_sample_options(ci_cmd, ci_y, "y");
  add_smoothing(ci_cmd);
  double alpha = 0.05;
  ci_cmd->add_option("--alpha", alpha, "1 - confidence level")
      ->capture_default_str();
  ci_cmd->add_option("--B", B, "bootstrap replicates")->capture_default_str();
  ci_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- test2 ------------------------------------------------------------
  auto* test_cmd =
      app.add_subcommand("test2", "two-sample equality-of-distributions test");
  SampleInput t_x, t_y;
  add_sample_options(test_cmd, t_x, "x");
  add_sample_options(test_cmd, t_y, "y");
  add_smoothing(test_cmd);
  double t_alpha = 0.1;
  test_cmd->add_option("--alpha", t_alpha, "nominal level")
      ->capture_default_str();
  test_cmd->add_option("--B", B, "bootstrap replicates")->capture_default_str();
  bool t_naive = false;
  test_cmd->add_flag("--naive-null", t_naive,
                     "use the naive per-sample bootstrap for the critical "
                     "value (inconsistent; demonstration only)");
  test_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- null-sim -----------------------------------------------------------
  auto* null_cmd = app.add_subcommand(
      "null-sim", "simulate the null limit law through the dual Sobolev norm");
  std::string null_mu;
  null_cmd->add_option("--mu", null_mu, "distribution spec JSON file")
      ->required();
  add_smoothing(null_cmd);
  int n_surrogate = 2000, R = 400;
  null_cmd->add_option("--n-surrogate", n_surrogate, "surrogate sample size")
      ->capture_default_str();
  null_cmd->add_option("--R", R, "replications")->capture_default_str();
  int grid_nodes = 512;
  double grid_lo = -3.0, grid_hi = 4.0;
  std::string grid_boundary = "zero_flux";
  null_cmd->add_option("--grid-nodes", grid_nodes, "")->capture_default_str();
  null_cmd->add_option("--grid-lo", grid_lo, "")->capture_default_str();
  null_cmd->add_option("--grid-hi", grid_hi, "")->capture_default_str();
  null_cmd->add_option("--grid-boundary", grid_boundary, "periodic | zero_flux")
      ->capture_default_str();
  int parallelism = 1;
  null_cmd->add_option("--parallelism", parallelism, "")->capture_default_str();
  null_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // --- compare-sobolev ------------------------------------------------------
  auto* cmp_cmd = app.add_subcommand(
      "compare-sobolev",
      "check W_p <= p c^{-1/q} ||mu1 - mu0||_{H^{-1,p}(rho)} on a grid");
  std::string cmp_mu0, cmp_mu1, cmp_rho;
  cmp_cmd->add_option("--mu0", cmp_mu0, "spec JSON file")->required();
  cmp_cmd->add_option("--mu1", cmp_mu1, "spec JSON file")->required();
  cmp_cmd->add_option("--rho", cmp_rho,
                      "reference spec JSON file (default: average of the "
                      "projected mu0, mu1)");
  add_smoothing(cmp_cmd);
  cmp_cmd->add_option("--grid-nodes", grid_nodes, "")->capture_default_str();
  cmp_cmd->add_option("--grid-lo", grid_lo, "")->capture_default_str();
  cmp_cmd->add_option("--grid-hi", grid_hi, "")->capture_default_str();
  cmp_cmd->add_option("--grid-boundary", grid_boundary, "")
      ->capture_default_str();
  cmp_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- mde -------------------------------------------------------------
  auto* mde_cmd =
      app.add_subcommand("mde", "minimum distance estimation over a family");
  SampleInput mde_x;
  add_sample_options(mde_cmd, mde_x, "x");
  add_smoothing(mde_cmd);
  std::string family = "gaussian_location";
  int fam_dim = 1;
  std::vector<double> lower, upper;
  mde_cmd->add_option("--family", family,
                      "gaussian_location | gaussian_location_scale | "
                      "uniform_location")
      ->capture_default_str();
  mde_cmd->add_option("--dim", fam_dim, "data dimension")->capture_default_str();
  mde_cmd->add_option("--lower", lower, "theta box lower corner")->required();
  mde_cmd->add_option("--upper", upper, "theta box upper corner")->required();
  int n_model = 0;
  mde_cmd->add_option("--n-model", n_model,
                      "model sample size (default: data size)");
  sw::MdeOptions mde_opts;
  mde_cmd->add_option("--xtol", mde_opts.xtol, "")->capture_default_str();
  mde_cmd->add_option("--ftol", mde_opts.ftol, "")->capture_default_str();
  mde_cmd->add_option("--max-iter", mde_opts.max_iter, "")
      ->capture_default_str();
  mde_cmd->add_option("--multistart", mde_opts.multistart, "")
      ->capture_default_str();
  mde_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- experiment ----------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "replicated experiments");
  auto* exp_run = exp_cmd->add_subcommand("run", "run a JSON experiment config");
  std::string config_path;
  exp_run->add_option("config", config_path, "experiment config JSON file")
      ->required();
  std::uint64_t override_seed = 0;
  bool has_override_seed = false;
  exp_run->add_option("--master-seed", override_seed, "override config seed")
      ->each([&](const std::string&) { has_override_seed = true; });
  int override_R = 0, override_par = 0;
  exp_run->add_option("--R", override_R, "override replication count");
  exp_run->add_option("--parallelism", override_par, "override parallelism");
  std::string override_out;
  exp_run->add_option("--out", override_out, "override output prefix");

  CLI11_PARSE(app, argc, argv);
  const sw::SeedPath root(master_seed);

  if (*est_cmd) {
    const auto cfg = sw::SmoothingConfig::make(p, sigma, m);
    const auto x = load_sample(est_x, root.child("data"), "x");
    const auto y = load_sample(est_y, root.child("data"), "y");
    const auto est =
        sw::estimate_swd(x, y, cfg, root.child("estimate"), common_noise);
    json j = est.to_json();
    if (with_variance) {
      const auto v2 = sw::plugin_variance(est, sw::VarianceMode::two_sample);
      j["v2_squared"] = v2.v_squared;                      // two-sample
      j["v1_squared"] = v2.var_g / v2.denominator;         // one-sample
    }
    if (!plan_csv.empty()) sw::write_text_file(plan_csv, sw::plan_to_csv(est.plan));
    if (!duals_csv.empty())
      sw::write_text_file(duals_csv, sw::duals_to_csv(est.duals));
    emit(j, out_path);
    return 0;
  }

  if (*boot_cmd) {
    auto cfg = sw::SmoothingConfig::make(p, sigma, m);
    if (bootstrap_m > 0) cfg.m = bootstrap_m;
    const auto x = load_sample(boot_x, root.child("data"), "x");
    sw::BootstrapDistribution dist;
    if (naive_null) scheme = "naive-null";
    if (scheme == "one-sample-null") {
      dist = sw::bootstrap_one_sample_null(x, cfg, B, root.child("boot"));
    } else if (scheme == "one-sample-alt") {
      // nu enters as a frozen dense sample.
      SampleInput nu_in = boot_y;
      if (nu_in.n == 0 && nu_in.csv.empty())
        nu_in.n = std::max(10 * x.n, 10000);
      if (nu_size > 0) nu_in.n = nu_size;
      const auto nu = load_sample(nu_in, root.child("data"), "y");
      dist = sw::bootstrap_one_sample_alt(x, nu, cfg, B, root.child("boot"));
    } else {
      const auto y = load_sample(boot_y, root.child("data"), "y");
      if (scheme == "two-sample-alt")
        dist = sw::bootstrap_two_sample_alt(x, y, cfg, B, root.child("boot"));
      else if (scheme == "pooled-null")
        dist = sw::bootstrap_pooled_null(x, y, cfg, B, root.child("boot"));
      else if (scheme == "naive-null") {
        std::cerr << "warning: the naive per-sample bootstrap does not "
                     "reproduce the two-sample null distribution (it is "
                     "inconsistent); use pooled-null for testing\n";
        dist = sw::bootstrap_naive_null(x, y, cfg, B, root.child("boot"));
      } else {
        throw sw::ConfigError("unknown bootstrap scheme: " + scheme);
      }
    }
    const std::string csv = sw::values_to_csv(dist.values);
    if (out_path.empty())
      std::cout << csv;
    else
      sw::write_text_file(out_path, csv);
    return 0;
  }

  if (*ci_cmd) {
    const auto cfg = sw::SmoothingConfig::make(p, sigma, m);
    const auto x = load_sample(ci_x, root.child("data"), "x");
    const auto y = load_sample(ci_y, root.child("data"), "y");
    const auto ci = sw::confidence_interval(x, y, cfg, alpha, B, root.child("ci"));
    emit(json{{"lo", ci.lo}, {"hi", ci.hi}, {"alpha", alpha}, {"B", B}},
         out_path);
    return 0;
  }

  if (*test_cmd) {
    const auto cfg = sw::SmoothingConfig::make(p, sigma, m);
    const auto x = load_sample(t_x, root.child("data"), "x");
    const auto y = load_sample(t_y, root.child("data"), "y");
    json j;
    if (t_naive) {
      std::cerr << "warning: --naive-null critical values are inconsistent "
                   "under the null; this mode exists to demonstrate the "
                   "failure\n";
      const double sqrt_n = std::sqrt(static_cast<double>(x.n));
      const double stat =
          sqrt_n * sw::detail::smooth_w_between(
                       x, y, cfg, root.child("test").child("statistic").child("noise"),
                       true);
      const auto boot =
          sw::bootstrap_naive_null(x, y, cfg, B, root.child("test").child("naive"));
      const double crit = sw::quantile(boot, 1.0 - t_alpha);
      int count = 0;
      for (double v : boot.values)
        if (v >= stat) ++count;
      j = {{"statistic", stat},
           {"critical_value", crit},
           {"p_value", (1.0 + count) / static_cast<double>(B + 1)},
           {"reject", stat > crit},
           {"alpha", t_alpha},
           {"scheme", "naive_null (inconsistent)"}};
    } else {
      const auto t = sw::equality_test(x, y, cfg, t_alpha, B, root.child("test"));
      j = {{"statistic", t.statistic},
           {"critical_value", t.critical_value},
           {"p_value", t.p_value},
           {"reject", t.reject},
           {"alpha", t.alpha},
           {"scheme", "pooled_null"}};
    }
    emit(j, out_path);
    return 0;
  }

  if (*null_cmd) {
    const auto spec =
        sw::DistributionSpec::from_json(json::parse(sw::read_text_file(null_mu)));
    const auto cfg = sw::SmoothingConfig::make(p, sigma, 1);
    const auto grid = make_grid(grid_nodes, grid_lo, grid_hi, grid_boundary);
    const auto values = sw::simulate_null_limit(
        spec, cfg, grid, n_surrogate, R, root.child("null-sim"), parallelism);
    const std::string csv = sw::values_to_csv(values);
    if (out_path.empty())
      std::cout << csv;
    else
      sw::write_text_file(out_path, csv);
    return 0;
  }

  if (*cmp_cmd) {
    const auto grid = make_grid(grid_nodes, grid_lo, grid_hi, grid_boundary);
    const auto spec0 =
        sw::DistributionSpec::from_json(json::parse(sw::read_text_file(cmp_mu0)));
    const auto spec1 =
        sw::DistributionSpec::from_json(json::parse(sw::read_text_file(cmp_mu1)));
    const auto g0 = sw::project_to_grid(spec0, sigma, grid);
    const auto g1 = sw::project_to_grid(spec1, sigma, grid);
    sw::GridMeasure rho;
    if (cmp_rho.empty()) {
      rho.grid = grid;
      rho.density.resize(g0.density.size());
      for (std::size_t i = 0; i < rho.density.size(); ++i)
        rho.density[i] = 0.5 * (g0.density[i] + g1.density[i]);
    } else {
      rho = sw::project_to_grid(
          sw::DistributionSpec::from_json(json::parse(sw::read_text_file(cmp_rho))),
          sigma, grid);
    }
    const auto rep = sw::verify_comparison(rho, g0, g1, p);
    emit(json{{"lhs", rep.lhs},
              {"rhs", rep.rhs},
              {"rhs_from_f0", rep.rhs_from_f0},
              {"rhs_from_f1", rep.rhs_from_f1},
              {"c0", rep.c0},
              {"c1", rep.c1},
              {"norm", rep.norm},
              {"holds", rep.holds}},
         out_path);
    return 0;
  }

  if (*mde_cmd) {
    const auto cfg = sw::SmoothingConfig::make(p, sigma, m);
    const auto x = load_sample(mde_x, root.child("data"), "x");
    const auto fam = sw::ParametricFamily::make(
        sw::model_family_from_name(family), fam_dim, lower, upper);
    const auto fit =
        sw::fit_mde(x, fam, cfg, n_model, mde_opts, root.child("mde"));
    emit(fit.to_json(), out_path);
    return 0;
  }

  if (*exp_run) {
    auto cfg = sw::ExperimentConfig::from_json(
        json::parse(sw::read_text_file(config_path)));
    if (has_override_seed) cfg.master_seed = override_seed;
    if (override_R > 0) cfg.R = override_R;
    if (override_par > 0) cfg.parallelism = override_par;
    if (!override_out.empty()) cfg.out_prefix = override_out;
    const auto rep = sw::run_experiment(cfg);
    if (cfg.out_prefix.empty()) {
      json j{{"summary", rep.summary}, {"metadata", rep.metadata}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "wrote " << cfg.out_prefix << ".csv and " << cfg.out_prefix
                << ".json\n";
    }
    return rep.partial ? 3 : 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sw::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
