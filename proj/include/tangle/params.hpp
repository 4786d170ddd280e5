#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tangle {

/// Error codes carried by every exception thrown from the library.
enum class errc {
  non_divisible_delay,
  bad_probabilities,
  non_increasing_delays,
  non_positive,
  missing_key,
  unknown_key,
  bad_value,
  insufficient_history,
  empty_tangle,
  empty_tip_set,
  identity_violation,
  too_large,
  degenerate_history,
  blow_up,
  no_bracket,
  non_convergence,
  grid_mismatch,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

private:
  errc code_;
};

/// Validated model parameters. Time is handled as integer tick counts
/// internally; real-valued times are always derived as tick * epsilon.
struct ModelParams {
  double epsilon = 0.0;           // inter-arrival time (time units)
  std::int64_t batch_size = 0;    // N arrivals per tick
  std::vector<double> delays;     // h_1 < ... < h_M (time units)
  std::vector<double> probs;      // p_1..p_M, renormalized to sum exactly 1
  double horizon = 0.0;           // T (time units)
  std::uint64_t seed = 0;

  // Derived on validation.
  double lambda = 0.0;                 // batch_size / epsilon
  std::int64_t horizon_ticks = 0;      // n_T = T / epsilon
  std::vector<std::int64_t> delay_ticks;  // n_i = h_i / epsilon

  int num_types() const { return static_cast<int>(delays.size()); }
  std::int64_t max_delay_ticks() const { return delay_ticks.back(); }
  double time_at(std::int64_t tick) const { return static_cast<double>(tick) * epsilon; }
};

/// Validates a flat key/value map (as parsed from a config file) into
/// ModelParams. Required keys: epsilon, batch_size, delays, probs, horizon.
/// Optional: seed (default 0).
/// Throws Error with codes non_divisible_delay, bad_probabilities,
/// non_increasing_delays, non_positive, missing_key, bad_value.
ModelParams validate_params(const std::map<std::string, std::string>& raw);

/// Re-validates an already validated record (idempotence helper).
ModelParams validate_params(const ModelParams& params);

/// Full run configuration: model parameters plus harness settings.
struct RunConfig {
  ModelParams params;
  std::int64_t replicas = 1;
  std::string init_mode = "warmup";   // "warmup" or "explicit"
  std::int64_t init_warmup = 0;       // warmup ticks; 0 means default 4 * n_M
  std::string output_dir = ".";

  std::int64_t warmup_ticks() const {
    return init_warmup > 0 ? init_warmup : 4 * params.max_delay_ticks();
  }
};

/// Parses a flat "key = value" config file (arrays comma-separated,
/// '#' starts a comment). Unknown keys are errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// Deterministic per-replica seed derivation: a splitmix64-style bijective
/// mix of the master seed and the replica index. Injective in the index for
/// a fixed master seed, so replicas are reproducible independently of
/// execution order.
std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index);

}  // namespace tangle
