#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tangle/compare.hpp"
#include "tangle/csv.hpp"
#include "tangle/equilibrium.hpp"
#include "tangle/fluid.hpp"
#include "tangle/kernels.hpp"
#include "tangle/oracle.hpp"
#include "tangle/params.hpp"
#include "tangle/sim.hpp"
#include "tangle/svg.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tangle;

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::string svg = "off";
  std::int64_t seed_override = -1;
  int jobs = 1;
};

RunConfig load(const CommonOpts& opts) {
  RunConfig cfg = load_config(opts.config_path);
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  if (opts.seed_override >= 0)
    cfg.params.seed = static_cast<std::uint64_t>(opts.seed_override);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

InitSpec init_from_config(const RunConfig& cfg) {
  if (cfg.init_mode != "warmup")
    throw Error(errc::bad_value,
                "only init_mode = warmup is available from the command line");
  return InitSpec::warmup(cfg.init_warmup);
}

int cmd_simulate(const CommonOpts& opts) {
  const RunConfig cfg = load(opts);
  const RunResult run = run_simulation(cfg.params, init_from_config(cfg), cfg.params.seed);
  write_series_csv(out_path(cfg, "series.csv"), run);
  write_wgrid_csv(out_path(cfg, "wgrid.csv"), run);
  if (opts.svg == "on") {
    SvgSeries line;
    line.label = "L/lambda";
    for (std::int64_t n = 0; n <= cfg.params.horizon_ticks; ++n) {
      line.x.push_back(cfg.params.time_at(n));
      line.y.push_back(static_cast<double>(run.at_tick(n).tips) / cfg.params.lambda);
    }
    write_line_chart(out_path(cfg, "series.svg"), "scaled tip count", "t", "L/lambda", {line});
  }
  const IdentityReport identities = check_step_identities(run);
  std::printf("simulate: %lld ticks, L(T) = %lld, identity violations = %zu\n",
              static_cast<long long>(cfg.params.horizon_ticks),
              static_cast<long long>(run.final_state.tips), identities.violations.size());
  return identities.ok() ? 0 : 1;
}

int cmd_fluid(const CommonOpts& opts, const std::string& source, double f0, double l0,
              double delta, const std::string& series_path, double dt) {
  const RunConfig cfg = load(opts);
  FluidInit init = FluidInit::constants(f0, l0);
  if (source == "constants") {
    init = FluidInit::constants(f0, l0);
  } else if (source == "equilibrium_perturbed") {
    init = FluidInit::equilibrium_perturbed(delta);
  } else if (source == "from_sim") {
    if (series_path.empty())
      throw Error(errc::bad_value, "--series is required with --source from_sim");
    const SeriesData data = read_series_csv(series_path);
    std::vector<double> f, l;
    for (size_t k = 0; k < data.ticks.size(); ++k) {
      f.push_back(static_cast<double>(data.free_tips[k]) / cfg.params.lambda);
      l.push_back(static_cast<double>(data.tips[k]) / cfg.params.lambda);
    }
    init = FluidInit::from_history(cfg.params.epsilon, data.ticks.front(), std::move(f),
                                   std::move(l));
  } else {
    throw Error(errc::bad_value, "unknown fluid source '" + source + "'");
  }
  const FluidSeries series = integrate_fluid(cfg.params, init, dt);
  write_fluid_csv(out_path(cfg, "fluid.csv"), series);
  write_fluid_wgrid_csv(out_path(cfg, "fluid_wgrid.csv"), series);
  const FluidDiagnostics diag = fluid_diagnostics(series);
  std::printf("fluid: l(T) = %.10g, f(T) = %.10g, xi_hat = %.6g, gamma_hat = %.6g, "
              "m_hat = %.6g, w_residual = %.6g\n",
              series.l_at(series.last_tick), series.f_at(series.last_tick), diag.xi_hat,
              diag.gamma_hat, diag.m_hat, diag.w_residual);
  if (opts.svg == "on") {
    SvgSeries line;
    line.label = "l";
    line.color = "#000000";
    for (std::int64_t n = 0; n <= series.last_tick; ++n) {
      line.x.push_back(series.time_at(n));
      line.y.push_back(series.l_at(n));
    }
    write_line_chart(out_path(cfg, "fluid.svg"), "fluid tip density", "t", "l", {line});
  }
  return 0;
}

int cmd_equilibrium(const CommonOpts& opts, const std::string& method_name) {
  const RunConfig cfg = load(opts);
  const RootMethod method =
      method_name == "newton" ? RootMethod::newton : RootMethod::bisection;
  const EquilibriumResult general = equilibrium_general(cfg.params, method);
  std::printf("equilibrium (general): l_star = %.12g, f_star = %.12g, residual = %.3g, "
              "iterations = %d\n",
              general.l_star, general.f_star, general.residual, general.iterations);
  if (cfg.params.num_types() == 2) {
    const EquilibriumResult m2 = equilibrium_m2(cfg.params, method);
    std::printf("equilibrium (M=2 closed form): l_star = %.12g, residual = %.3g\n", m2.l_star,
                m2.residual);
    double w1_gap = 0.0;
    for (size_t k = 0; k < m2.profiles[0].size(); ++k)
      w1_gap = std::max(w1_gap, std::fabs(m2.profiles[0][k] - general.profiles[0][k]));
    std::printf("  w1 profile gap (closed form p1 vs boundary-consistent): %.6g\n", w1_gap);
  }
  write_equilibrium_wgrid_csv(out_path(cfg, "equilibrium_wgrid.csv"), general);
  return 0;
}

int cmd_oracle(const std::string& instance_path) {
  const TinyInstance inst = load_tiny_instance(instance_path);
  write_oracle_csv("-", inst, enumerate_expectations(inst),
                   leading_order_expectations(inst));
  return 0;
}

int cmd_compare(const CommonOpts& opts, std::int64_t replicas, double delta) {
  const RunConfig cfg = load(opts);
  const std::int64_t count = replicas > 0 ? replicas : cfg.replicas;
  const ComparisonReport report = run_comparison(cfg.params, init_from_config(cfg), count,
                                                 delta, cfg.params.seed, opts.jobs);
  write_report_csv(out_path(cfg, "report.csv"), report);
  for (const ReplicaOutcome& r : report.replicas)
    if (r.failed)
      std::fprintf(stderr, "replica %lld failed: %s\n", static_cast<long long>(r.replica),
                   r.error.c_str());
  std::printf("compare: %lld/%lld replicas completed, P(g(T) > %.4g) = %.4g "
              "(Wilson 95%%: [%.4g, %.4g])\n",
              static_cast<long long>(report.completed),
              static_cast<long long>(report.replicas.size()), report.delta, report.tail_freq,
              report.wilson_low, report.wilson_high);
  if (opts.svg == "on") {
    std::vector<SvgSeries> lines;
    for (const ReplicaOutcome& r : report.replicas) {
      if (r.failed) continue;
      SvgSeries s;
      s.color = "#9bb7d4";
      s.x = report.times;
      s.y = r.scaled_tips;
      lines.push_back(std::move(s));
    }
    if (!report.fluid_l.empty()) {
      SvgSeries s;
      s.label = "fluid l";
      s.color = "#000000";
      s.stroke_width = 2.0;
      s.x = report.times;
      s.y = report.fluid_l;
      lines.push_back(std::move(s));
    }
    if (!lines.empty()) lines.front().label = "L/lambda (replicas)";
    write_line_chart(out_path(cfg, "figure.svg"), "scaled tip count vs fluid limit", "t",
                     "L/lambda", lines);
  }
  return 0;
}

int cmd_study(const CommonOpts& opts, const std::vector<double>& lambdas,
              std::int64_t replicas, double exponent) {
  const RunConfig cfg = load(opts);
  const StudyReport report = convergence_study(cfg.params, lambdas, replicas, cfg.params.seed,
                                               opts.jobs, exponent);
  write_study_csv(out_path(cfg, "study.csv"), report);
  for (const StudyCell& cell : report.cells) {
    std::printf("lambda %.6g (target %.6g%s): N = %lld, epsilon = %.6g, median g(T) = %.6g, "
                "IQR = %s, failed = %lld\n",
                cell.lambda_actual, cell.lambda_target, cell.adjusted ? ", adjusted" : "",
                static_cast<long long>(cell.batch_size), cell.epsilon, cell.median_g,
                cell.iqr_defined ? std::to_string(cell.iqr_g).c_str() : "undefined",
                static_cast<long long>(cell.failed));
  }
  std::printf("study: median g(T) strictly decreasing in lambda: %s\n",
              report.median_strictly_decreasing ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-arrival DAG ledger simulator, fluid-limit integrator and "
               "deviation harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string fluid_source = "constants";
  double f0 = 1.0, l0 = 2.0, delta = 0.05, dt = 0.0;
  std::string series_path;
  std::string method = "bisection";
  std::string instance_path;
  std::int64_t replicas = 0;
  double delta_threshold = 0.1;
  std::vector<double> lambdas;
  double exponent = 0.75;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", opts.config_path, "config file (key = value)")->required();
    cmd->add_option("--output-dir", opts.output_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed_override, "seed override");
    cmd->add_option("--svg", opts.svg, "emit SVG charts (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--jobs", opts.jobs, "parallel replicas");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the stochastic model");
  add_common(simulate);

  CLI::App* fluid = app.add_subcommand("fluid", "integrate the fluid-limit system");
  add_common(fluid);
  fluid->add_option("--source", fluid_source,
                    "initialization: constants|from_sim|equilibrium_perturbed");
  fluid->add_option("--f0", f0, "constants: initial f");
  fluid->add_option("--l0", l0, "constants: initial l");
  fluid->add_option("--delta", delta, "equilibrium_perturbed: relative perturbation");
  fluid->add_option("--series", series_path, "from_sim: series.csv from a simulate run");
  fluid->add_option("--dt", dt, "grid step (default: epsilon)");

  CLI::App* equilibrium = app.add_subcommand("equilibrium", "solve the stationary state");
  add_common(equilibrium);
  equilibrium->add_option("--method", method, "root finder: bisection|newton")
      ->check(CLI::IsMember({"bisection", "newton"}));

  CLI::App* oracle = app.add_subcommand("oracle", "exact one-tick expectations");
  oracle->add_option("--instance", instance_path, "tiny-instance description file")
      ->required();

  CLI::App* compare = app.add_subcommand("compare", "replicated sim-vs-fluid deviation g(T)");
  add_common(compare);
  compare->add_option("--replicas", replicas, "replica count (default: config)");
  compare->add_option("--delta", delta_threshold, "tail threshold for P(g(T) > delta)");

  CLI::App* study = app.add_subcommand("study", "g(T) scaling across arrival rates");
  add_common(study);
  study->add_option("--lambdas", lambdas, "target arrival rates")
      ->required()
      ->delimiter(',');
  study->add_option("--replicas", replicas, "replicas per lambda (default: config)");
  study->add_option("--exponent", exponent, "batch growth exponent q in N ~ lambda^q");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (fluid->parsed()) return cmd_fluid(opts, fluid_source, f0, l0, delta, series_path, dt);
    if (equilibrium->parsed()) return cmd_equilibrium(opts, method);
    if (oracle->parsed()) return cmd_oracle(instance_path);
    if (compare->parsed()) return cmd_compare(opts, replicas, delta_threshold);
    if (study->parsed())
      return cmd_study(opts, lambdas, replicas == 0 ? 10 : replicas, exponent);
  } catch (const tangle::Error& e) {
    std::fprintf(stderr, "ERROR %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR Unexpected: %s\n", e.what());
    return 1;
  }
  return 2;
}
