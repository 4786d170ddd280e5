#include "tangle/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace tangle {

namespace {

constexpr double kResidualTol = 1e-13;
constexpr int kMaxIterations = 300;

void check_inputs(const std::vector<double>& delays, const std::vector<double>& probs) {
  if (delays.empty() || delays.size() != probs.size())
    throw Error(errc::bad_value, "delays/probs must be non-empty and equal length");
  for (size_t i = 0; i + 1 < delays.size(); ++i)
    if (!(delays[i] < delays[i + 1]))
      throw Error(errc::non_increasing_delays, "delays must be strictly increasing");
  if (delays.front() <= 0.0) throw Error(errc::non_positive, "delays must be > 0");
  for (double p : probs)
    if (p < 0.0) throw Error(errc::bad_probabilities, "probabilities must be >= 0");
}

double default_grid_step(const std::vector<double>& delays) { return delays.front() / 50.0; }

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Root of f on [a, b]. Bisection by default; Newton (secant-slope, bracket
/// safeguarded) as an opt-in accelerator.
RootResult find_root(const std::function<double(double)>& f, double a, double b,
                     RootMethod method) {
  RootResult r;
  double fa = f(a);
  double fb = f(b);
  if (std::fabs(fa) < kResidualTol) return {a, fa, 0};
  if (std::fabs(fb) < kResidualTol) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0))
    throw Error(errc::no_bracket, "no sign change on the equilibrium bracket");

  double x = 0.5 * (a + b);
  for (int it = 1; it <= kMaxIterations; ++it) {
    if (method == RootMethod::newton) {
      // secant step from the bracket ends, clamped to the bracket
      const double denom = fb - fa;
      double cand = (denom != 0.0) ? (a - fa * (b - a) / denom) : 0.5 * (a + b);
      if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
      x = cand;
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = f(x);
    r = {x, fx, it};
    if (std::fabs(fx) < kResidualTol) return r;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b)))
      return {0.5 * (a + b), f(0.5 * (a + b)), it};
  }
  throw Error(errc::non_convergence, "root finder exceeded iteration budget");
}

std::vector<std::vector<double>> sample_profiles(const StationaryProfile& prof,
                                                 const std::vector<double>& delays,
                                                 double grid_step) {
  std::vector<std::vector<double>> out(delays.size());
  for (size_t i = 0; i < delays.size(); ++i) {
    const auto cells = static_cast<std::int64_t>(std::llround(delays[i] / grid_step));
    out[i].resize(cells + 1);
    for (std::int64_t k = 0; k <= cells; ++k)
      out[i][k] = prof.value(static_cast<int>(i), static_cast<double>(k) * grid_step);
  }
  return out;
}

}  // namespace

StationaryProfile::StationaryProfile(const std::vector<double>& delays,
                                     const std::vector<double>& probs, double l)
    : delays_(delays), probs_(probs), l_(l), boundary_(delays.size()) {
  const int m = static_cast<int>(delays_.size());
  // Inflow chain from the slowest type down: B_i = p_i (1 + 2/l sum_{j>i} int w_j).
  for (int i = m - 1; i >= 0; --i) {
    double inflow = 0.0;
    for (int j = i + 1; j < m; ++j) inflow += integral(j, delays_[i], delays_[j]);
    boundary_[i] = probs_[i] * (1.0 + 2.0 / l_ * inflow);
  }
}

double StationaryProfile::rate(int segment) const {
  // decay rate on (h_segment, h_{segment+1}); segment 0 is (0, h_1) where
  // no POW can complete and the profile is frozen.
  double s = 0.0;
  for (int j = 0; j < segment; ++j) s += probs_[j];
  return 2.0 * s / l_;
}

double StationaryProfile::value(int type_index, double u) const {
  const double h_i = delays_[type_index];
  u = std::clamp(u, 0.0, h_i);
  // accumulate int_u^{h_i} rate(v) dv across segments
  double expo = 0.0;
  for (int k = 0; k <= type_index; ++k) {
    const double lo = (k == 0) ? 0.0 : delays_[k - 1];
    const double hi = std::min(delays_[k], h_i);
    const double a = std::max(lo, u);
    if (a < hi) expo += rate(k) * (hi - a);
  }
  return boundary_[type_index] * std::exp(-expo);
}

double StationaryProfile::integral(int type_index, double a, double b) const {
  // int_a^b w_i(u) du, exact per segment.
  double total = 0.0;
  for (int k = 0; k <= type_index; ++k) {
    const double lo = std::max((k == 0) ? 0.0 : delays_[k - 1], a);
    const double hi = std::min(delays_[k], b);
    if (lo >= hi) continue;
    const double rho = rate(k);
    const double wa = value(type_index, lo);
    const double width = hi - lo;
    if (rho == 0.0) {
      total += wa * width;
    } else {
      total += wa * std::expm1(rho * width) / rho;
    }
  }
  return total;
}

double StationaryProfile::moment_integral(int type_index, double base, double a, double b) const {
  // int_a^b (u - base) w_i(u) du, exact per segment.
  double total = 0.0;
  for (int k = 0; k <= type_index; ++k) {
    const double lo = std::max((k == 0) ? 0.0 : delays_[k - 1], a);
    const double hi = std::min(delays_[k], b);
    if (lo >= hi) continue;
    const double rho = rate(k);
    const double wa = value(type_index, lo);
    const double width = hi - lo;
    const double c0 = lo - base;
    if (rho == 0.0) {
      total += wa * (c0 * width + 0.5 * width * width);
    } else {
      const double e = std::expm1(rho * width);
      const double i0 = e / rho;
      const double i1 = width * (e + 1.0) / rho - e / (rho * rho);
      total += wa * (c0 * i0 + i1);
    }
  }
  return total;
}

double StationaryProfile::pending_mass() const {
  // w = sum_i 2 p_i (f/l) h_i - (2/l) sum_{i>j} p_j int_{h_j}^{h_i} (u - h_j) w_i(u) du
  // with f/l = 1/2; the double integral collapses by Fubini to the moment form.
  const int m = static_cast<int>(delays_.size());
  double w = 0.0;
  for (int i = 0; i < m; ++i) w += probs_[i] * delays_[i];
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < i; ++j)
      w -= 2.0 / l_ * probs_[j] * moment_integral(i, delays_[j], delays_[j], delays_[i]);
  return w;
}

EquilibriumResult equilibrium_m2(const std::vector<double>& delays,
                                 const std::vector<double>& probs, double grid_step,
                                 RootMethod method) {
  check_inputs(delays, probs);
  if (delays.size() != 2) throw Error(errc::bad_value, "equilibrium_m2 requires M = 2");
  const double h1 = delays[0], h2 = delays[1];
  const double p1 = probs[0], p2 = probs[1];
  if (!(p1 > 0.0)) throw Error(errc::bad_probabilities, "equilibrium_m2 requires p1 > 0");
  if (grid_step <= 0.0) grid_step = default_grid_step(delays);

  const double r = p2 / p1;
  auto defect = [&](double l) {
    return (1.0 - r) * l - 2.0 * h1 + r * l * std::exp(-(2.0 * p1 / l) * (h2 - h1));
  };
  const RootResult root = find_root(defect, 2.0 * h1, 2.0 * h2, method);

  EquilibriumResult res;
  res.l_star = root.x;
  res.f_star = res.l_star / 2.0;
  res.w_star = res.l_star - res.f_star;
  res.residual = std::fabs(root.fx);
  res.iterations = root.iterations;
  res.grid_step = grid_step;

  // Closed-form profiles: w1 flat at p1, w2 exponential toward the boundary
  // with the frozen continuation below h1.
  const auto cells1 = static_cast<std::int64_t>(std::llround(h1 / grid_step));
  const auto cells2 = static_cast<std::int64_t>(std::llround(h2 / grid_step));
  res.profiles.resize(2);
  res.profiles[0].assign(cells1 + 1, p1);
  res.profiles[1].resize(cells2 + 1);
  for (std::int64_t k = 0; k <= cells2; ++k) {
    const double u = std::max(static_cast<double>(k) * grid_step, h1);
    res.profiles[1][k] = p2 * std::exp(-(2.0 * p1 / res.l_star) * (h2 - u));
  }
  return res;
}

EquilibriumResult equilibrium_general(const std::vector<double>& delays,
                                      const std::vector<double>& probs, double grid_step,
                                      RootMethod method) {
  check_inputs(delays, probs);
  if (grid_step <= 0.0) grid_step = default_grid_step(delays);

  auto defect = [&](double l) {
    return StationaryProfile(delays, probs, l).pending_mass() - l / 2.0;
  };
  const RootResult root = find_root(defect, 2.0 * delays.front(), 2.0 * delays.back(), method);

  EquilibriumResult res;
  res.l_star = root.x;
  res.f_star = res.l_star / 2.0;
  res.w_star = res.l_star - res.f_star;
  res.residual = std::fabs(root.fx);
  res.iterations = root.iterations;
  res.grid_step = grid_step;
  res.profiles = sample_profiles(StationaryProfile(delays, probs, res.l_star), delays, grid_step);
  return res;
}

EquilibriumResult equilibrium_m2(const ModelParams& params, RootMethod method) {
  return equilibrium_m2(params.delays, params.probs, params.epsilon, method);
}

EquilibriumResult equilibrium_general(const ModelParams& params, RootMethod method) {
  return equilibrium_general(params.delays, params.probs, params.epsilon, method);
}

}  // namespace tangle
