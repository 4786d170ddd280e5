#pragma once

#include <cstdint>
#include <vector>

#include "tangle/params.hpp"

namespace tangle {

/// Deterministic trajectories of the scaled model on a fixed grid of step dt
/// (dt must divide every delay). f and l are retained from -2 h_M, the
/// per-type pending profiles from -h_M; one w slice holds, for each type i,
/// the cells u = 0, dt, ..., h_i - dt. The u = h_i boundary value exists only
/// as the inflow written into the top cell each step.
struct FluidSeries {
  double dt = 0.0;
  std::vector<double> delays;
  std::vector<double> probs;
  std::vector<std::int64_t> delay_cells;  // h_i / dt
  std::int64_t first_tick = 0;            // -2 c_M
  std::int64_t w_first_tick = 0;          // -c_M
  std::int64_t last_tick = 0;             // n_T
  std::vector<double> f;  // index = tick - first_tick
  std::vector<double> l;
  std::vector<std::vector<std::vector<double>>> w;  // [tick - w_first_tick][type][cell]

  double f_at(std::int64_t tick) const { return f[static_cast<size_t>(tick - first_tick)]; }
  double l_at(std::int64_t tick) const { return l[static_cast<size_t>(tick - first_tick)]; }
  const std::vector<std::vector<double>>& w_at(std::int64_t tick) const {
    return w[static_cast<size_t>(tick - w_first_tick)];
  }
  /// Scaled pending mass w(t) = dt * sum of all cells (comparable to l - f).
  double w_total_at(std::int64_t tick) const;
  double time_at(std::int64_t tick) const { return static_cast<double>(tick) * dt; }
};

struct FluidDiagnostics {
  double xi_hat = 0.0;      // sup w_i / l
  double gamma_hat = 0.0;   // sup |d/du w_i(t-u,u)/l(t-u)| (centered differences)
  double m_hat = 0.0;       // inf l
  double w_residual = 0.0;  // sup |w(t) - (l(t) - f(t))| via the integral identity
};

/// Initial data for the integrator. All sources fill f and l on [-2 h_M, 0];
/// the pending profiles are generated by running the discrete recursions
/// forward from zero over the first h_M of history, which flushes out the
/// unknown start-up cells before t = -h_M.
struct FluidInit {
  enum class Source { constants, from_history, equilibrium_perturbed };
  Source source = Source::constants;
  double f0 = 0.0, l0 = 0.0;  // constants
  double delta = 0.0;         // equilibrium_perturbed: l0 = (1 + delta) l_star
  // from_history: scaled counts on their own grid, linearly interpolated if
  // coarser than dt. hist_f/hist_l are F/lambda and L/lambda per source tick.
  double hist_step = 0.0;
  std::int64_t hist_first_tick = 0;
  std::vector<double> hist_f, hist_l;

  static FluidInit constants(double f0, double l0) {
    FluidInit i;
    i.source = Source::constants;
    i.f0 = f0;
    i.l0 = l0;
    return i;
  }
  static FluidInit equilibrium_perturbed(double delta) {
    FluidInit i;
    i.source = Source::equilibrium_perturbed;
    i.delta = delta;
    return i;
  }
  static FluidInit from_history(double step, std::int64_t first_tick, std::vector<double> f,
                                std::vector<double> l) {
    FluidInit i;
    i.source = Source::from_history;
    i.hist_step = step;
    i.hist_first_tick = first_tick;
    i.hist_f = std::move(f);
    i.hist_l = std::move(l);
    return i;
  }
};

/// Integrates the delayed system over [0, horizon] (defaults: dt = epsilon,
/// horizon = params.horizon) with the pre-limit recursions: explicit Euler
/// for f and l with delayed reads, characteristics for the profiles.
/// Throws BlowUp (with the time) if l degenerates or a value turns non-finite.
FluidSeries integrate_fluid(const ModelParams& params, const FluidInit& init, double dt = 0.0,
                            double horizon = 0.0);

FluidDiagnostics fluid_diagnostics(const FluidSeries& series);

}  // namespace tangle
