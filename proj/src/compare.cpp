#include "tangle/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tangle/kernels.hpp"

namespace tangle {

namespace {

void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<std::int64_t>(jobs, count));
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

FluidInit fluid_init_from_run(const RunResult& run) {
  const double lambda = run.params.lambda;
  const std::int64_t first = run.first_tick;
  if (first > -2 * run.params.max_delay_ticks())
    throw Error(errc::insufficient_history, "run history does not span 2 h_M");
  std::vector<double> f, l;
  f.reserve(run.records.size());
  l.reserve(run.records.size());
  for (const StepRecord& rec : run.records) {
    f.push_back(static_cast<double>(rec.free_tips) / lambda);
    l.push_back(static_cast<double>(rec.tips) / lambda);
  }
  return FluidInit::from_history(run.params.epsilon, first, std::move(f), std::move(l));
}

DeviationTrajectory deviation_trajectory(const RunResult& sim, const FluidSeries& fluid) {
  const ModelParams& p = sim.params;
  if (fluid.dt != p.epsilon)
    throw Error(errc::grid_mismatch, "fluid grid step differs from the simulation tick");
  if (fluid.delay_cells != p.delay_ticks)
    throw Error(errc::grid_mismatch, "fluid delay grid differs from the simulation");
  if (fluid.last_tick < p.horizon_ticks)
    throw Error(errc::grid_mismatch, "fluid series shorter than the simulation horizon");

  const double inv_lambda = 1.0 / p.lambda;
  const double inv_batch = 1.0 / static_cast<double>(p.batch_size);
  const int m = p.num_types();

  DeviationTrajectory out;
  out.g.reserve(p.horizon_ticks);
  std::vector<double> scratch;
  double running = 0.0;
  for (std::int64_t n = 1; n <= p.horizon_ticks; ++n) {
    const StepRecord& rec = sim.at_tick(n);
    const double a = std::fabs(static_cast<double>(rec.free_tips) * inv_lambda - fluid.f_at(n));
    const double b = std::fabs(static_cast<double>(rec.tips) * inv_lambda - fluid.l_at(n));
    double c = 0.0;
    const auto& slice = fluid.w_at(n);
    for (int i = 0; i < m; ++i) {
      scratch.resize(rec.w_grid[i].size());
      for (size_t k = 0; k < scratch.size(); ++k)
        scratch[k] = static_cast<double>(rec.w_grid[i][k]);
      c += kernels::max_abs_scaled_diff(scratch.data(), slice[i].data(), scratch.size(),
                                        inv_batch);
    }
    const double total = a + b + c;
    if (total > running) {
      running = total;
      out.comp_f = a;
      out.comp_l = b;
      out.comp_w = c;
    }
    out.g.push_back(running);
    out.rel_l_sup = std::max(out.rel_l_sup, b / fluid.l_at(n));
  }
  out.g_final = running;
  return out;
}

void wilson_interval(std::int64_t successes, std::int64_t trials, double* low, double* high) {
  if (trials <= 0) {
    *low = 0.0;
    *high = 1.0;
    return;
  }
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  *low = std::max(0.0, center - half);
  *high = std::min(1.0, center + half);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<size_t>(pos);
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(k);
  return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

ComparisonReport run_comparison(const ModelParams& raw_params, const InitSpec& init,
                                std::int64_t replicas, double delta, std::uint64_t master_seed,
                                int jobs) {
  const ModelParams params = validate_params(raw_params);
  ComparisonReport report;
  report.delta = delta;
  report.replicas.resize(replicas);

  parallel_for(replicas, jobs, [&](std::int64_t k) {
    ReplicaOutcome& out = report.replicas[static_cast<size_t>(k)];
    out.replica = k;
    out.seed = derive_replica_seed(master_seed, static_cast<std::uint64_t>(k));
    try {
      const RunResult sim = run_simulation(params, init, out.seed);
      const FluidSeries fluid = integrate_fluid(params, fluid_init_from_run(sim));
      out.dev = deviation_trajectory(sim, fluid);
      out.scaled_tips.reserve(params.horizon_ticks + 1);
      for (std::int64_t n = 0; n <= params.horizon_ticks; ++n)
        out.scaled_tips.push_back(static_cast<double>(sim.at_tick(n).tips) / params.lambda);
      if (k == 0) {
        report.fluid_l.reserve(params.horizon_ticks + 1);
        for (std::int64_t n = 0; n <= params.horizon_ticks; ++n)
          report.fluid_l.push_back(fluid.l_at(n));
      }
    } catch (const Error& e) {
      out.failed = true;
      out.error = e.what();
    }
  });

  report.times.reserve(params.horizon_ticks + 1);
  for (std::int64_t n = 0; n <= params.horizon_ticks; ++n)
    report.times.push_back(params.time_at(n));
  for (const ReplicaOutcome& out : report.replicas) {
    if (out.failed) continue;
    report.completed += 1;
    if (out.dev.g_final > delta) report.exceed_count += 1;
  }
  if (report.completed > 0)
    report.tail_freq =
        static_cast<double>(report.exceed_count) / static_cast<double>(report.completed);
  wilson_interval(report.exceed_count, report.completed, &report.wilson_low,
                  &report.wilson_high);
  return report;
}

ModelParams scale_params_for_lambda(const ModelParams& base, double lambda_target,
                                    double growth_exponent) {
  if (lambda_target <= 0.0) throw Error(errc::non_positive, "lambda must be > 0");
  const double h1 = base.delays.front();
  const auto m0 = std::max<std::int64_t>(
      1, std::llround(h1 * std::pow(lambda_target, 1.0 - growth_exponent)));
  // first grid divisor >= m0 that keeps every delay and the horizon on-grid
  for (std::int64_t m = m0; m < m0 + 1000; ++m) {
    ModelParams scaled = base;
    scaled.epsilon = h1 / static_cast<double>(m);
    scaled.batch_size = std::max<std::int64_t>(1, std::llround(lambda_target * scaled.epsilon));
    try {
      return validate_params(scaled);
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(errc::non_convergence, "no epsilon grid compatible with the delays and horizon");
}

StudyReport convergence_study(const ModelParams& base, const std::vector<double>& lambdas,
                              std::int64_t replicas, std::uint64_t master_seed, int jobs,
                              double growth_exponent) {
  StudyReport report;
  for (size_t cell_index = 0; cell_index < lambdas.size(); ++cell_index) {
    const double target = lambdas[cell_index];
    StudyCell cell;
    cell.lambda_target = target;
    const ModelParams scaled = scale_params_for_lambda(base, target, growth_exponent);
    cell.lambda_actual = scaled.lambda;
    cell.batch_size = scaled.batch_size;
    cell.epsilon = scaled.epsilon;
    cell.adjusted = std::fabs(scaled.lambda - target) > 1e-9 * target;

    const std::uint64_t cell_seed =
        derive_replica_seed(master_seed, 0x10000000ull + cell_index);
    const ComparisonReport comparison =
        run_comparison(scaled, InitSpec::warmup(), replicas, 0.0, cell_seed, jobs);
    for (const ReplicaOutcome& out : comparison.replicas) {
      if (out.failed) {
        cell.failed += 1;
        continue;
      }
      cell.g_values.push_back(out.dev.g_final);
    }
    std::vector<double> sorted = cell.g_values;
    std::sort(sorted.begin(), sorted.end());
    cell.median_g = quantile_sorted(sorted, 0.5);
    cell.iqr_defined = sorted.size() >= 2;
    cell.iqr_g = cell.iqr_defined
                     ? quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)
                     : 0.0;
    report.cells.push_back(std::move(cell));
  }
  report.median_strictly_decreasing = report.cells.size() >= 2;
  for (size_t k = 0; k + 1 < report.cells.size(); ++k)
    if (!(report.cells[k + 1].median_g < report.cells[k].median_g))
      report.median_strictly_decreasing = false;
  return report;
}

}  // namespace tangle
