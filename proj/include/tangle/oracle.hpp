#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tangle/params.hpp"
#include "tangle/sim.hpp"

namespace tangle {

/// A desk-scale single-tick instance: small enough that every type
/// assignment and every parent-choice tuple can be enumerated.
struct TinyInstance {
  double epsilon = 1.0;
  std::int64_t batch_size = 0;   // N
  std::vector<double> delays;    // h_1 < ... < h_M
  std::vector<double> probs;     // p_1..p_M
  std::vector<TipSpec> tips;     // free and pending tips at the tick

  ModelParams to_params() const;  // horizon = one tick
};

struct OracleExpectations {
  std::vector<double> arrivals;  // E[N_i]
  std::vector<double> free_selected;  // E[F_i]
  // jumps[i][j][u] = E[J_{i+1,j+1}(u ticks)], allocated like StepRecord::jumps
  std::vector<std::vector<std::vector<double>>> jumps;
};

/// Exact expectations by summing over all M^N type assignments (weighted by
/// the type probabilities) and all L^{2N} equally likely parent tuples, with
/// the same min-type attribution rules as the simulator. Kahan-compensated
/// accumulation. Throws TooLarge outside L <= 6, N <= 3, M <= 3.
OracleExpectations enumerate_expectations(const TinyInstance& inst);

/// The leading-order formulas for the same quantities:
///   E[N_i] = N p_i,  E[F_i] = 2 N p_i F / L,  E[J_{i,j}(u)] = 2 N p_j W_i(u) / L.
OracleExpectations leading_order_expectations(const TinyInstance& inst);

/// Parses a tiny-instance description file (key = value; tips as a comma
/// list of `f` or `p:TYPE:RLT_TICKS` entries).
TinyInstance load_tiny_instance(const std::string& path);
TinyInstance parse_tiny_instance_text(const std::string& text, const std::string& origin);

}  // namespace tangle
