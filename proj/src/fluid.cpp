#include "tangle/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tangle/equilibrium.hpp"
#include "tangle/kernels.hpp"

namespace tangle {

namespace {

constexpr double kBlowUpFloor = 1e-9;

struct Grid {
  double dt = 0.0;
  std::vector<double> delays, probs;
  std::vector<std::int64_t> cells;  // h_i / dt
  std::int64_t c_max = 0;
  std::vector<double> rate_sum;  // sum_{j <= k} p_j (prefix sums, 1-based segments)
};

Grid make_grid(const ModelParams& params, double dt) {
  Grid g;
  g.dt = dt;
  g.delays = params.delays;
  g.probs = params.probs;
  for (double h : g.delays) {
    const auto c = static_cast<std::int64_t>(std::llround(h / dt));
    if (c < 1 || std::fabs(static_cast<double>(c) * dt - h) > 1e-9 * std::max(1.0, h))
      throw Error(errc::grid_mismatch, "dt must divide every delay");
    g.cells.push_back(c);
  }
  g.c_max = g.cells.back();
  g.rate_sum.resize(g.probs.size() + 1, 0.0);
  for (size_t k = 0; k < g.probs.size(); ++k) g.rate_sum[k + 1] = g.rate_sum[k] + g.probs[k];
  return g;
}

std::vector<std::vector<double>> zero_slice(const Grid& g) {
  std::vector<std::vector<double>> slice(g.cells.size());
  for (size_t i = 0; i < g.cells.size(); ++i) slice[i].assign(g.cells[i], 0.0);
  return slice;
}

/// One transport step: advect every cell one slot toward u = 0 with the
/// segment decay factor, then write the boundary inflow into the top cell.
std::vector<std::vector<double>> w_step(const Grid& g,
                                        const std::vector<std::vector<double>>& w_now,
                                        double f_now, double l_now) {
  const int m = static_cast<int>(g.cells.size());
  std::vector<std::vector<double>> next(m);
  for (int i = 0; i < m; ++i) {
    const std::int64_t c_i = g.cells[i];
    next[i].resize(c_i);
    // source cells u = 1 .. c_i - 1 move to u - 1; below h_1 they are frozen
    std::copy(w_now[i].begin() + 1, w_now[i].end(), next[i].begin());
    for (int k = 1; k < m; ++k) {
      const std::int64_t lo = g.cells[k - 1];              // first u with h_k <= u
      const std::int64_t hi = std::min(g.cells[k], c_i);   // exclusive
      if (lo >= hi) break;
      const double factor = 1.0 - 2.0 * g.dt * g.rate_sum[k] / l_now;
      kernels::scale_in_place(next[i].data() + (lo - 1), static_cast<size_t>(hi - lo), factor);
    }
    double inflow = 2.0 * g.probs[i] * f_now / l_now;
    for (int j = i + 1; j < m; ++j)
      for (std::int64_t u = c_i; u < g.cells[j]; ++u)
        inflow += 2.0 * g.probs[i] * g.dt * w_now[j][u] / l_now;
    next[i][c_i - 1] = inflow;
  }
  return next;
}

double interp_history(const std::vector<double>& values, std::int64_t first_tick, double step,
                      double t) {
  const double pos = t / step - static_cast<double>(first_tick);
  const auto last = static_cast<double>(values.size() - 1);
  if (pos <= 0.0) return values.front();
  if (pos >= last) return values.back();
  const auto k = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

}  // namespace

double FluidSeries::w_total_at(std::int64_t tick) const {
  const auto& slice = w_at(tick);
  double total = 0.0;
  for (const auto& row : slice) total += std::accumulate(row.begin(), row.end(), 0.0);
  return total * dt;
}

FluidSeries integrate_fluid(const ModelParams& raw_params, const FluidInit& init, double dt,
                            double horizon) {
  const ModelParams params = validate_params(raw_params);
  if (dt <= 0.0) dt = params.epsilon;
  if (horizon <= 0.0) horizon = params.horizon;
  const Grid grid = make_grid(params, dt);
  const auto n_t = static_cast<std::int64_t>(std::llround(horizon / dt));
  if (n_t < 1 || std::fabs(static_cast<double>(n_t) * dt - horizon) > 1e-9 * horizon)
    throw Error(errc::grid_mismatch, "dt must divide the horizon");

  FluidSeries s;
  s.dt = dt;
  s.delays = grid.delays;
  s.probs = grid.probs;
  s.delay_cells = grid.cells;
  s.first_tick = -2 * grid.c_max;
  s.w_first_tick = -grid.c_max;
  s.last_tick = n_t;
  s.f.reserve(2 * grid.c_max + n_t + 1);
  s.l.reserve(2 * grid.c_max + n_t + 1);

  // fill f, l on [-2 h_M, 0]
  switch (init.source) {
    case FluidInit::Source::constants:
    case FluidInit::Source::equilibrium_perturbed: {
      double f0 = init.f0;
      double l0 = init.l0;
      if (init.source == FluidInit::Source::equilibrium_perturbed) {
        const EquilibriumResult eq = equilibrium_general(grid.delays, grid.probs, dt);
        f0 = eq.f_star;
        l0 = eq.l_star * (1.0 + init.delta);
      }
      if (!(f0 > 0.0) || !(f0 <= l0))
        throw Error(errc::degenerate_history, "constants need 0 < f0 <= l0");
      s.f.assign(static_cast<size_t>(2 * grid.c_max + 1), f0);
      s.l.assign(static_cast<size_t>(2 * grid.c_max + 1), l0);
      break;
    }
    case FluidInit::Source::from_history: {
      if (init.hist_step <= 0.0 || init.hist_f.size() != init.hist_l.size() ||
          init.hist_f.size() < 2)
        throw Error(errc::bad_value, "history source needs matching f/l samples");
      const double t_first = static_cast<double>(init.hist_first_tick) * init.hist_step;
      if (t_first > -2.0 * grid.delays.back() + 1e-12)
        throw Error(errc::insufficient_history, "history must reach back 2 h_M");
      for (std::int64_t tick = -2 * grid.c_max; tick <= 0; ++tick) {
        const double t = static_cast<double>(tick) * dt;
        s.f.push_back(interp_history(init.hist_f, init.hist_first_tick, init.hist_step, t));
        s.l.push_back(interp_history(init.hist_l, init.hist_first_tick, init.hist_step, t));
      }
      break;
    }
  }
  for (size_t k = 0; k < s.l.size(); ++k) {
    if (!(s.l[k] > 0.0) || s.f[k] < 0.0 || s.f[k] > s.l[k])
      throw Error(errc::degenerate_history, "history needs l > 0 and 0 <= f <= l");
  }

  // generate the pending profiles over the first h_M of history; the zero
  // start-up slice advects out entirely before t = -h_M
  std::vector<std::vector<double>> slice = zero_slice(grid);
  for (std::int64_t tick = -2 * grid.c_max; tick < 0; ++tick) {
    slice = w_step(grid, slice, s.f_at(tick), s.l_at(tick));
    if (tick + 1 >= s.w_first_tick) s.w.push_back(slice);
  }

  // main loop
  for (std::int64_t n = 0; n < n_t; ++n) {
    const double f_n = s.f_at(n);
    const double l_n = s.l_at(n);

    const double f_next = f_n + dt * (1.0 - 2.0 * f_n / l_n);

    double delayed = 0.0;  // sum_i p_i f(t - h_i) / l(t - h_i)
    const int m = static_cast<int>(grid.cells.size());
    for (int i = 0; i < m; ++i)
      delayed += grid.probs[i] * s.f_at(n - grid.cells[i]) / s.l_at(n - grid.cells[i]);
    // the two jump corrections are accumulated in identical order so they
    // cancel exactly at a stationary state
    double correction_out = 0.0;
    double correction_in = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto& w_past = s.w_at(n - grid.cells[i]);
      const double l_past = s.l_at(n - grid.cells[i]);
      for (int j = 0; j < i; ++j) {
        for (std::int64_t u = grid.cells[j] + 1; u < grid.cells[i]; ++u) {
          correction_out += grid.probs[j] * w_past[i][u] / l_past;
          correction_in += grid.probs[j] * s.w_at(n - u)[i][u] / s.l_at(n - u);
        }
      }
    }
    const double l_next =
        l_n + dt * (1.0 - 2.0 * delayed - 2.0 * dt * correction_out + 2.0 * dt * correction_in);

    if (!std::isfinite(f_next) || !std::isfinite(l_next) || l_next <= kBlowUpFloor)
      throw Error(errc::blow_up,
                  "l degenerated at t = " + std::to_string(static_cast<double>(n + 1) * dt));
    if (f_next > l_next)
      throw Error(errc::blow_up,
                  "f > l at t = " + std::to_string(static_cast<double>(n + 1) * dt));

    s.w.push_back(w_step(grid, s.w.back(), f_n, l_n));
    s.f.push_back(f_next);
    s.l.push_back(l_next);
  }
  return s;
}

FluidDiagnostics fluid_diagnostics(const FluidSeries& s) {
  FluidDiagnostics d;
  const int m = static_cast<int>(s.delay_cells.size());
  const std::int64_t c_max = s.delay_cells.back();

  // m_hat over [-h_M, T]
  const size_t l_off = static_cast<size_t>(-c_max - s.first_tick);
  d.m_hat = kernels::min_value(s.l.data() + l_off, s.l.size() - l_off);

  // xi_hat over [-h_M, T]
  double xi = 0.0;
  for (std::int64_t tick = -c_max; tick <= s.last_tick; ++tick) {
    const auto& slice = s.w_at(tick);
    const double l_t = s.l_at(tick);
    for (int i = 0; i < m; ++i) {
      const double top = kernels::max_value(slice[i].data(), slice[i].size());
      xi = std::max(xi, top / l_t);
    }
  }
  d.xi_hat = xi;

  // gamma_hat: centered differences of u -> w_i(t - u, u) / l(t - u)
  double gamma = 0.0;
  for (std::int64_t tick = 0; tick <= s.last_tick; ++tick) {
    for (int i = 0; i < m; ++i) {
      const std::int64_t c_i = s.delay_cells[i];
      for (std::int64_t u = 1; u + 1 < c_i; ++u) {
        const double hi = s.w_at(tick - u - 1)[i][u + 1] / s.l_at(tick - u - 1);
        const double lo = s.w_at(tick - u + 1)[i][u - 1] / s.l_at(tick - u + 1);
        gamma = std::max(gamma, std::fabs(hi - lo) / (2.0 * s.dt));
      }
    }
  }
  d.gamma_hat = gamma;

  // w identity versus l - f
  double residual = 0.0;
  for (std::int64_t tick = 0; tick <= s.last_tick; ++tick) {
    double ident = 0.0;
    for (int i = 0; i < m; ++i)
      for (std::int64_t past = 1; past <= s.delay_cells[i]; ++past)
        ident += 2.0 * s.dt * s.probs[i] * s.f_at(tick - past) / s.l_at(tick - past);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        for (std::int64_t past = s.delay_cells[j] + 1; past < s.delay_cells[i]; ++past)
          for (std::int64_t u = past; u < s.delay_cells[i]; ++u)
            ident -= 2.0 * s.dt * s.dt * s.probs[j] * s.w_at(tick - past)[i][u] /
                     s.l_at(tick - past);
    residual = std::max(residual, std::fabs(ident - (s.l_at(tick) - s.f_at(tick))));
  }
  d.w_residual = residual;
  return d;
}

}  // namespace tangle
