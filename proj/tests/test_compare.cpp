#include <cmath>

#include "doctest.h"
#include "tangle/compare.hpp"

using namespace tangle;

namespace {

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

// fabricate a run whose counts are exact scalings of a stationary fluid
// trajectory: L = lambda l, F = lambda f, W grid = N w
RunResult fabricate_scaled_run(const ModelParams& p, const FluidSeries& fluid) {
  RunResult run;
  run.params = p;
  run.first_tick = -2 * p.max_delay_ticks();
  const int m = p.num_types();
  auto fabricate = [&](std::int64_t tick) {
    StepRecord rec;
    rec.tick = tick;
    rec.free_tips = std::llround(p.lambda * fluid.f_at(std::max<std::int64_t>(tick, 0)));
    rec.tips = std::llround(p.lambda * fluid.l_at(std::max<std::int64_t>(tick, 0)));
    rec.pending_tips = rec.tips - rec.free_tips;
    rec.arrivals_by_type.assign(m, 0);
    rec.free_selected_by_type.assign(m, 0);
    rec.w_grid.resize(m);
    const auto& slice = fluid.w_at(std::max<std::int64_t>(tick, 0));
    for (int i = 0; i < m; ++i) {
      rec.w_grid[i].resize(slice[i].size());
      for (size_t u = 0; u < slice[i].size(); ++u)
        rec.w_grid[i][u] = std::llround(static_cast<double>(p.batch_size) * slice[i][u]);
    }
    rec.has_flows = false;
    return rec;
  };
  for (std::int64_t tick = run.first_tick; tick < p.horizon_ticks; ++tick)
    run.records.push_back(fabricate(tick));
  run.final_state = fabricate(p.horizon_ticks);
  return run;
}

}  // namespace

TEST_CASE("the deviation of a fluid against its own scaling is zero") {
  // M = 1 stationary state: lambda f and N w are exact integers, so the
  // fabricated counts rescale to the fluid values bitwise
  const ModelParams p = make_params(0.1, 10, {1.0}, {1.0}, 5.0);
  const FluidSeries fluid = integrate_fluid(p, FluidInit::constants(1.0, 2.0));
  const RunResult run = fabricate_scaled_run(p, fluid);
  const DeviationTrajectory dev = deviation_trajectory(run, fluid);
  CHECK(dev.g_final == 0.0);
  for (double g : dev.g) CHECK(g == 0.0);
  CHECK(dev.rel_l_sup == 0.0);
}

TEST_CASE("g is a nondecreasing running supremum with summing components") {
  const ModelParams p = make_params(0.1, 10, {1.0, 2.0}, {0.5, 0.5}, 10.0);
  const RunResult sim = run_simulation(p, InitSpec::warmup(), 5);
  const FluidSeries fluid = integrate_fluid(p, fluid_init_from_run(sim));
  const DeviationTrajectory dev = deviation_trajectory(sim, fluid);
  REQUIRE_FALSE(dev.g.empty());
  CHECK(dev.g_final > 0.0);
  for (size_t k = 1; k < dev.g.size(); ++k) CHECK(dev.g[k] >= dev.g[k - 1]);
  CHECK(dev.comp_f + dev.comp_l + dev.comp_w == dev.g_final);
}

TEST_CASE("grid mismatches are rejected") {
  const ModelParams p = make_params(0.1, 10, {1.0, 2.0}, {0.5, 0.5}, 10.0);
  const RunResult sim = run_simulation(p, InitSpec::warmup(), 5);
  const FluidSeries half_grid = integrate_fluid(p, fluid_init_from_run(sim), 0.05);
  CHECK_THROWS_WITH_AS(deviation_trajectory(sim, half_grid),
                       doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("comparison report is deterministic and scheduling-independent") {
  const ModelParams p = make_params(0.1, 10, {1.0, 2.0}, {0.5, 0.5}, 5.0);
  const ComparisonReport serial = run_comparison(p, InitSpec::warmup(), 6, 0.1, 42, 1);
  const ComparisonReport threaded = run_comparison(p, InitSpec::warmup(), 6, 0.1, 42, 4);
  REQUIRE(serial.replicas.size() == threaded.replicas.size());
  for (size_t k = 0; k < serial.replicas.size(); ++k) {
    CHECK(serial.replicas[k].seed == threaded.replicas[k].seed);
    CHECK(serial.replicas[k].dev.g_final == threaded.replicas[k].dev.g_final);
    CHECK(serial.replicas[k].dev.g == threaded.replicas[k].dev.g);
  }
  CHECK(serial.exceed_count == threaded.exceed_count);
}

TEST_CASE("tail frequency and its interval behave at the extremes") {
  const ModelParams p = make_params(0.1, 10, {1.0, 2.0}, {0.5, 0.5}, 5.0);
  // delta far above any g(T): empirical tail frequency is zero
  const ComparisonReport report = run_comparison(p, InitSpec::warmup(), 5, 1e9, 42, 2);
  CHECK(report.completed == 5);
  CHECK(report.exceed_count == 0);
  CHECK(report.tail_freq == 0.0);
  CHECK(report.wilson_low == 0.0);
  CHECK(report.wilson_high > 0.0);
  CHECK(report.wilson_high < 1.0);
}

TEST_CASE("scaling schedule keeps the grid exact") {
  const ModelParams base = make_params(0.05, 20, {1.0, 2.0}, {0.5, 0.5}, 50.0);
  for (double target : {100.0, 200.0, 400.0}) {
    const ModelParams scaled = scale_params_for_lambda(base, target);
    CHECK(scaled.lambda == doctest::Approx(target).epsilon(0.05));
    CHECK(std::fabs(scaled.epsilon * static_cast<double>(scaled.horizon_ticks) -
                    scaled.horizon) < 1e-9);
    CHECK(scaled.batch_size ==
          std::llround(scaled.lambda * scaled.epsilon));  // N = lambda epsilon
  }
  // batch grows like lambda^(3/4) along the default schedule
  const ModelParams lo = scale_params_for_lambda(base, 100.0);
  const ModelParams hi = scale_params_for_lambda(base, 1600.0);
  const double growth = static_cast<double>(hi.batch_size) / lo.batch_size;
  CHECK(growth == doctest::Approx(std::pow(16.0, 0.75)).epsilon(0.2));
}

TEST_CASE("study with a single replica flags the undefined IQR") {
  const ModelParams base = make_params(0.1, 10, {1.0, 2.0}, {0.5, 0.5}, 5.0);
  const StudyReport report = convergence_study(base, {50.0, 100.0}, 1, 7, 1);
  REQUIRE(report.cells.size() == 2);
  for (const StudyCell& cell : report.cells) {
    CHECK(cell.g_values.size() == 1);
    CHECK_FALSE(cell.iqr_defined);
  }
}

TEST_CASE("quantiles and the Wilson interval") {
  const std::vector<double> sorted = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(sorted, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted(sorted, 0.0) == 1.0);
  CHECK(quantile_sorted(sorted, 1.0) == 4.0);
  double low = 0.0, high = 0.0;
  wilson_interval(5, 10, &low, &high);
  CHECK(low == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(high == doctest::Approx(0.7634).epsilon(1e-3));
}
