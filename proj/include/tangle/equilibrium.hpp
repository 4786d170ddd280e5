#pragma once

#include <cstdint>
#include <vector>

#include "tangle/params.hpp"

namespace tangle {

enum class RootMethod { bisection, newton };

struct EquilibriumResult {
  double l_star = 0.0;
  double f_star = 0.0;   // l_star / 2 by construction
  double w_star = 0.0;   // l_star - f_star
  double grid_step = 0.0;
  // profiles[i][k] = w_{i+1}(k * grid_step), k = 0 .. h_{i+1}/grid_step.
  std::vector<std::vector<double>> profiles;
  double residual = 0.0;  // defect of the defining equation at l_star
  int iterations = 0;
};

/// Stationary pending-tip profile for a candidate tip level l: piecewise
/// exponential in u with rate 2 * sum_{h_j <= u} p_j / l, constant below h_1,
/// boundary value fixed by the inflow chain from higher types down.
class StationaryProfile {
public:
  StationaryProfile(const std::vector<double>& delays, const std::vector<double>& probs, double l);

  double value(int type_index, double u) const;   // w_{type_index+1}(u)
  double boundary(int type_index) const { return boundary_[type_index]; }

  /// Total stationary pending mass per the w identity with f = l/2.
  double pending_mass() const;

private:
  double rate(int segment) const;                 // decay rate on (h_k, h_{k+1})
  double integral(int type_index, double a, double b) const;
  double moment_integral(int type_index, double base, double a, double b) const;

  std::vector<double> delays_;
  std::vector<double> probs_;
  double l_;
  std::vector<double> boundary_;
};

/// M=2 closed-form equilibrium: solves
///   (1 - p2/p1) l = 2 h1 - (p2/p1) l exp(-(2 p1 / l)(h2 - h1))
/// by bisection on [2 h1, 2 h2] and reports the transcendental defect as
/// residual. Profiles: w1 = p1 flat; w2 from the exponential formula with the
/// frozen continuation below h1.
EquilibriumResult equilibrium_m2(const std::vector<double>& delays,
                                 const std::vector<double>& probs, double grid_step = 0.0,
                                 RootMethod method = RootMethod::bisection);

/// General-M equilibrium: outer root-find on l over [2 h1, 2 hM]; for each l
/// the stationary profile is built exactly and the root condition is
/// pending_mass(l) = l/2. Residual is the identity defect at the solution.
EquilibriumResult equilibrium_general(const std::vector<double>& delays,
                                      const std::vector<double>& probs, double grid_step = 0.0,
                                      RootMethod method = RootMethod::bisection);

EquilibriumResult equilibrium_m2(const ModelParams& params,
                                 RootMethod method = RootMethod::bisection);
EquilibriumResult equilibrium_general(const ModelParams& params,
                                      RootMethod method = RootMethod::bisection);

}  // namespace tangle
