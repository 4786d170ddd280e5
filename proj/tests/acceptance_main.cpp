// Acceptance suite: one binary, eight numbered criteria, one PASS/FAIL line
// each. Run all with no arguments or a single one with --criterion K.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "tangle/compare.hpp"
#include "tangle/csv.hpp"
#include "tangle/equilibrium.hpp"
#include "tangle/fluid.hpp"
#include "tangle/oracle.hpp"
#include "tangle/params.hpp"
#include "tangle/sim.hpp"

using namespace tangle;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

ModelParams make_params(double epsilon, std::int64_t batch, std::vector<double> delays,
                        std::vector<double> probs, double horizon) {
  ModelParams p;
  p.epsilon = epsilon;
  p.batch_size = batch;
  p.delays = std::move(delays);
  p.probs = std::move(probs);
  p.horizon = horizon;
  return validate_params(p);
}

// ---------------------------------------------------------------------------
// 1. Step identities: 20 seeds x 500 ticks, M = 2, lambda = 200; the five
//    exact identities hold with zero violations.
bool criterion_identities(std::string& detail) {
  const ModelParams p = make_params(0.1, 20, {1.0, 2.0}, {0.5, 0.5}, 50.0);
  std::int64_t pairs = 0;
  std::int64_t violations = 0;
  std::int64_t evo_l_max = 0, evo_w_max = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RunResult run = run_simulation(p, InitSpec::warmup(), seed);
    const IdentityReport report = check_step_identities(run);
    pairs += report.pairs_checked;
    violations += static_cast<std::int64_t>(report.violations.size());
    evo_l_max = std::max(evo_l_max, report.evo_l_max_residual);
    evo_w_max = std::max(evo_w_max, report.evo_w_max_residual);
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "20 seeds x 500 ticks, %lld pairs checked, %lld violations; "
                "diagnostic residuals: evo_L max %lld, evo_W max %lld",
                static_cast<long long>(pairs), static_cast<long long>(violations),
                static_cast<long long>(evo_l_max), static_cast<long long>(evo_w_max));
  detail = buf;
  return violations == 0 && pairs > 0;
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence: one-tick Monte Carlo means match exact enumeration
//    within 4 standard errors on five tiny instances.
struct McStat {
  double sum = 0.0, sumsq = 0.0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
  }
  double mean(std::int64_t n) const { return sum / static_cast<double>(n); }
  double se(std::int64_t n) const {
    const double m = mean(n);
    const double var = std::max(0.0, sumsq / static_cast<double>(n) - m * m);
    return std::sqrt(var / static_cast<double>(n));
  }
};

bool criterion_oracle(std::string& detail) {
  struct Spec {
    TinyInstance inst;
    const char* label;
  };
  auto tiny = [](std::int64_t batch, std::vector<double> delays, std::vector<double> probs,
                 std::vector<TipSpec> tips) {
    TinyInstance inst;
    inst.epsilon = 1.0;
    inst.batch_size = batch;
    inst.delays = std::move(delays);
    inst.probs = std::move(probs);
    inst.tips = std::move(tips);
    return inst;
  };
  const std::vector<Spec> instances = {
      {tiny(1, {1.0}, {1.0}, {{0, 0}, {0, 0}}), "L2 free, N1, M1"},
      {tiny(1, {1.0, 2.0}, {0.5, 0.5}, {{0, 0}, {2, 1}}), "free+pending, N1, M2"},
      {tiny(2, {2.0, 4.0}, {0.3, 0.7}, {{0, 0}, {0, 0}, {1, 1}, {2, 3}}), "mixed, N2, M2"},
      {tiny(2, {1.0, 3.0}, {0.6, 0.4}, {{0, 0}, {2, 2}, {2, 0}}), "two pendings, N2, M2"},
      {tiny(2, {1.0}, {1.0}, {{0, 0}, {0, 0}, {0, 0}, {0, 0}}), "L4 free, N2, M1"},
  };
  const std::int64_t trials = 100000;
  std::int64_t stats_checked = 0;
  double worst_pull = 0.0;

  // the worked value first
  {
    const OracleExpectations e = enumerate_expectations(instances[0].inst);
    if (std::fabs(e.free_selected[0] - 1.5) > 1e-12) {
      detail = "enumeration does not reproduce E[F1] = 1.5";
      return false;
    }
  }

  for (size_t which = 0; which < instances.size(); ++which) {
    const TinyInstance& inst = instances[which].inst;
    const ModelParams params = inst.to_params();
    const int m = params.num_types();
    const OracleExpectations exact = enumerate_expectations(inst);

    std::vector<McStat> f_stats(m);
    std::vector<std::vector<std::vector<McStat>>> j_stats(m);
    for (int i = 0; i < m; ++i) {
      j_stats[i].resize(m);
      for (int j = 0; j < i; ++j) j_stats[i][j].resize(params.delay_ticks[i]);
    }
    for (std::int64_t trial = 0; trial < trials; ++trial) {
      TangleSim sim(params, InitSpec::from_tips(inst.tips),
                    derive_replica_seed(1000 + which, trial));
      const StepRecord rec = sim.step();
      for (int i = 0; i < m; ++i) f_stats[i].add(rec.free_selected_by_type[i]);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
          for (std::int64_t u = 0; u < params.delay_ticks[i]; ++u)
            j_stats[i][j][u].add(rec.jumps[i][j][u]);
    }
    auto check = [&](double mc_mean, double mc_se, double expect) {
      ++stats_checked;
      if (mc_se == 0.0) return std::fabs(mc_mean - expect) <= 1e-9;
      worst_pull = std::max(worst_pull, std::fabs(mc_mean - expect) / mc_se);
      return std::fabs(mc_mean - expect) <= 4.0 * mc_se;
    };
    for (int i = 0; i < m; ++i)
      if (!check(f_stats[i].mean(trials), f_stats[i].se(trials), exact.free_selected[i])) {
        detail = std::string("F mismatch on instance ") + instances[which].label;
        return false;
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        for (std::int64_t u = 0; u < params.delay_ticks[i]; ++u)
          if (!check(j_stats[i][j][u].mean(trials), j_stats[i][j][u].se(trials),
                     exact.jumps[i][j][u])) {
            detail = std::string("J mismatch on instance ") + instances[which].label;
            return false;
          }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "5 instances x %lld trials, %lld statistics within 4 SE (worst pull %.2f; "
                "includes E[F1] = 1.5)",
                static_cast<long long>(trials), static_cast<long long>(stats_checked),
                worst_pull);
  detail = buf;
  return true;
}

// ---------------------------------------------------------------------------
// 3. Equilibrium exactness.
bool criterion_equilibrium(std::string& detail) {
  const EquilibriumResult m1 = equilibrium_general({1.0}, {1.0});
  const bool m1_ok = std::fabs(m1.l_star - 2.0) < 1e-9 && std::fabs(m1.f_star - 1.0) < 1e-9;

  const EquilibriumResult m2 = equilibrium_m2({1.0, 2.0}, {0.5, 0.5});
  const bool residual_ok = m2.residual < 1e-12;

  double worst_gap = 0.0;
  for (const auto& probs : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.8, 0.2},
                            std::vector<double>{0.25, 0.75}}) {
    const EquilibriumResult a = equilibrium_m2({1.0, 2.0}, probs);
    const EquilibriumResult b = equilibrium_general({1.0, 2.0}, probs);
    worst_gap = std::max(worst_gap, std::fabs(a.l_star - b.l_star));
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "M=1: l=%.12g f=%.12g; M=2 residual %.2e; solver agreement gap %.2e",
                m1.l_star, m1.f_star, m2.residual, worst_gap);
  detail = buf;
  return m1_ok && residual_ok && worst_gap < 1e-8;
}

// ---------------------------------------------------------------------------
// 4. Fluid stationarity at the equilibria.
bool criterion_stationarity(std::string& detail) {
  auto drift = [](const FluidSeries& s) {
    double dev = 0.0;
    for (std::int64_t n = 0; n <= s.last_tick; ++n) {
      dev = std::max(dev, std::fabs(s.f_at(n) - s.f_at(0)));
      dev = std::max(dev, std::fabs(s.l_at(n) - s.l_at(0)));
    }
    return dev;
  };
  const ModelParams m1 = make_params(0.02, 1, {1.0}, {1.0}, 10.0);
  const double drift1 = drift(integrate_fluid(m1, FluidInit::constants(1.0, 2.0)));

  const EquilibriumResult eq = equilibrium_general({1.0, 2.0}, {0.5, 0.5});
  const ModelParams m2 = make_params(0.02, 1, {1.0, 2.0}, {0.5, 0.5}, 20.0);
  const double drift2 = drift(integrate_fluid(m2, FluidInit::constants(eq.f_star, eq.l_star)));

  char buf[160];
  std::snprintf(buf, sizeof(buf), "M=1 drift %.2e over 10 h1 (tol 1e-6); M=2 drift %.2e over "
                                  "10 h2 (tol 1e-4)",
                drift1, drift2);
  detail = buf;
  return drift1 < 1e-6 && drift2 < 1e-4;
}

// ---------------------------------------------------------------------------
// 5. Fluid self-convergence under grid refinement.
bool criterion_self_convergence(std::string& detail) {
  const ModelParams p = make_params(0.1, 1, {1.0, 2.0}, {0.5, 0.5}, 10.0);
  auto terminal = [&](double dt) {
    const FluidSeries s = integrate_fluid(p, FluidInit::constants(1.0, 2.4), dt);
    return std::pair<double, double>{s.f_at(s.last_tick), s.l_at(s.last_tick)};
  };
  const auto coarse = terminal(0.05);
  const auto medium = terminal(0.025);
  const auto fine = terminal(0.0125);
  const double e1 =
      std::fabs(coarse.first - medium.first) + std::fabs(coarse.second - medium.second);
  const double e2 =
      std::fabs(medium.first - fine.first) + std::fabs(medium.second - fine.second);
  const double ratio = e1 / e2;

  auto residual = [&](double dt) {
    const FluidSeries s = integrate_fluid(p, FluidInit::constants(1.0, 2.4), dt);
    return fluid_diagnostics(s).w_residual;
  };
  const double res_coarse = residual(0.05);
  const double res_fine = residual(0.025);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "terminal-error ratio %.3f (need 1.6..2.4); w_residual %.3e -> %.3e on dt/2",
                ratio, res_coarse, res_fine);
  detail = buf;
  return ratio > 1.6 && ratio < 2.4 && res_fine < res_coarse;
}

// ---------------------------------------------------------------------------
// 6. Figure reproduction: lambda = 400, N = 20, T = 50; at least 9 of 10
//    replicas keep sup_t |L/lambda - l| / l below 0.10.
bool criterion_figure(std::string& detail) {
  const ModelParams p = make_params(0.05, 20, {1.0, 2.0}, {0.5, 0.5}, 50.0);
  const ComparisonReport report = run_comparison(p, InitSpec::warmup(), 10, 0.1, 20260810, 2);
  int within = 0;
  double worst = 0.0;
  for (const ReplicaOutcome& r : report.replicas) {
    if (r.failed) continue;
    worst = std::max(worst, r.dev.rel_l_sup);
    if (r.dev.rel_l_sup < 0.10) ++within;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d/10 replicas with sup|L/lambda - l|/l < 0.10 (worst %.4f)",
                within, worst);
  detail = buf;
  return within >= 9;
}

// ---------------------------------------------------------------------------
// 7. Convergence in lambda: median g(T) strictly decreasing over
//    lambda in {100, 200, 400} with 10 replicas each.
bool criterion_lambda_scaling(std::string& detail) {
  const ModelParams base = make_params(0.05, 20, {1.0, 2.0}, {0.5, 0.5}, 50.0);
  const StudyReport report = convergence_study(base, {100.0, 200.0, 400.0}, 10, 97, 2);
  std::string medians;
  for (const StudyCell& cell : report.cells) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%.6g: %.4f", medians.empty() ? "" : ", ",
                  cell.lambda_actual, cell.median_g);
    medians += buf;
  }
  detail = "median g(T) by lambda: " + medians;
  std::int64_t failed = 0;
  for (const StudyCell& cell : report.cells) failed += cell.failed;
  return report.median_strictly_decreasing && failed == 0;
}

// ---------------------------------------------------------------------------
// 8. Theorem-hypothesis diagnostics: finite xi/gamma and positive m on every
//    accepted run; degenerate runs are rejected with BlowUp.
bool criterion_diagnostics(std::string& detail) {
  const ModelParams m1 = make_params(0.02, 1, {1.0}, {1.0}, 10.0);
  const ModelParams m2 = make_params(0.05, 1, {1.0, 2.0}, {0.5, 0.5}, 30.0);
  const std::vector<FluidSeries> accepted = {
      integrate_fluid(m1, FluidInit::constants(1.0, 2.0)),
      integrate_fluid(m2, FluidInit::constants(0.9, 2.2)),
      integrate_fluid(m2, FluidInit::equilibrium_perturbed(0.1)),
  };
  double xi_max = 0.0, gamma_max = 0.0, m_min = 1e300;
  for (const FluidSeries& s : accepted) {
    const FluidDiagnostics d = fluid_diagnostics(s);
    if (!std::isfinite(d.xi_hat) || !std::isfinite(d.gamma_hat) || !(d.m_hat > 0.0) ||
        !std::isfinite(d.w_residual)) {
      detail = "diagnostics not finite on an accepted run";
      return false;
    }
    xi_max = std::max(xi_max, d.xi_hat);
    gamma_max = std::max(gamma_max, d.gamma_hat);
    m_min = std::min(m_min, d.m_hat);
  }
  bool rejected = false;
  try {
    integrate_fluid(m2, FluidInit::constants(0.2, 0.2));
  } catch (const Error& e) {
    rejected = (e.code() == errc::blow_up);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "3 accepted runs: xi_hat <= %.4g, gamma_hat <= %.4g, m_hat >= %.4g; "
                "degenerate run rejected with BlowUp: %s",
                xi_max, gamma_max, m_min, rejected ? "yes" : "no");
  detail = buf;
  return rejected;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "step identities over 20 seeds", 60.0, criterion_identities},
      {2, "oracle equivalence on tiny instances", 120.0, criterion_oracle},
      {3, "equilibrium exactness", 30.0, criterion_equilibrium},
      {4, "fluid stationarity", 30.0, criterion_stationarity},
      {5, "fluid self-convergence", 30.0, criterion_self_convergence},
      {6, "figure reproduction (lambda=400, N=20)", 300.0, criterion_figure},
      {7, "convergence in lambda", 900.0, criterion_lambda_scaling},
      {8, "theorem-hypothesis diagnostics", 60.0, criterion_diagnostics},
  };

  int selected = 0;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      selected = std::atoi(argv[a + 1]);
      ++a;
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion K]\n");
      return 2;
    }
  }

  bool all_pass = true;
  for (const Criterion& c : criteria) {
    if (selected != 0 && c.id != selected) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      pass = false;
      detail += " [exceeded runtime budget]";
    }
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), detail.c_str(), seconds);
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
