#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tangle/fluid.hpp"
#include "tangle/params.hpp"
#include "tangle/sim.hpp"

namespace tangle {

/// Running sup-norm deviation between a realized run and its paired fluid
/// trajectories, per tick. The three components are recorded at the tick
/// attaining the final supremum, so they sum exactly to g_final.
struct DeviationTrajectory {
  std::vector<double> g;  // g(t_n) for n = 1..n_T (running supremum)
  double g_final = 0.0;
  double comp_f = 0.0;  // |F/lambda - f| at the arg-sup
  double comp_l = 0.0;  // |L/lambda - l| at the arg-sup
  double comp_w = 0.0;  // sum_i sup_u |W_i/N - w_i| at the arg-sup
  double rel_l_sup = 0.0;  // sup_t |L/lambda - l| / l
};

DeviationTrajectory deviation_trajectory(const RunResult& sim, const FluidSeries& fluid);

/// Builds the fluid initial data from a replica's own realized history
/// (f = F/lambda, l = L/lambda on [-2 h_M, 0]).
FluidInit fluid_init_from_run(const RunResult& run);

struct ReplicaOutcome {
  std::int64_t replica = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  DeviationTrajectory dev;
  std::vector<double> scaled_tips;  // L(t_n)/lambda for n = 0..n_T (for plots)
};

struct ComparisonReport {
  double delta = 0.0;
  std::vector<ReplicaOutcome> replicas;
  std::int64_t completed = 0;
  std::int64_t exceed_count = 0;  // #{g(T) > delta}
  double tail_freq = 0.0;
  double wilson_low = 0.0, wilson_high = 0.0;
  std::vector<double> fluid_l;  // replica 0 fluid trajectory, ticks 0..n_T
  std::vector<double> times;    // t_n for the plot series
};

/// Monte Carlo replication: replica k runs with derive_replica_seed(seed, k),
/// the fluid comparator is initialized from that replica's realized history.
/// Replicas run concurrently when jobs > 1; results are index-ordered, so the
/// report is independent of scheduling.
ComparisonReport run_comparison(const ModelParams& params, const InitSpec& init,
                                std::int64_t replicas, double delta, std::uint64_t master_seed,
                                int jobs = 1);

/// One lambda level of the scaling study.
struct StudyCell {
  double lambda_target = 0.0;
  double lambda_actual = 0.0;
  std::int64_t batch_size = 0;
  double epsilon = 0.0;
  bool adjusted = false;           // actual lambda differs from the target
  std::vector<double> g_values;    // per completed replica
  std::int64_t failed = 0;
  double median_g = 0.0;
  double iqr_g = 0.0;
  bool iqr_defined = false;
};

struct StudyReport {
  std::vector<StudyCell> cells;
  bool median_strictly_decreasing = false;
};

/// Rescales the base parameters to a target arrival rate on the joint-limit
/// schedule epsilon = h_1 / round(h_1 * lambda^(1-q)), N = round(lambda *
/// epsilon) with q = growth_exponent (default 3/4, so N ~ lambda^(3/4) and
/// epsilon^3 N -> infinity). The grid stays compatible with every delay and
/// the horizon; the actual lambda is reported alongside the target.
ModelParams scale_params_for_lambda(const ModelParams& base, double lambda_target,
                                    double growth_exponent = 0.75);

StudyReport convergence_study(const ModelParams& base, const std::vector<double>& lambdas,
                              std::int64_t replicas, std::uint64_t master_seed, int jobs = 1,
                              double growth_exponent = 0.75);

/// Wilson score interval for a binomial proportion (95%).
void wilson_interval(std::int64_t successes, std::int64_t trials, double* low, double* high);

/// Interpolated quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace tangle
