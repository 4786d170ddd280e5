#include "tangle/params.hpp"

#include "tangle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace tangle {

const char* errc_name(errc code) {
  switch (code) {
    case errc::non_divisible_delay: return "NonDivisibleDelay";
    case errc::bad_probabilities: return "BadProbabilities";
    case errc::non_increasing_delays: return "NonIncreasingDelays";
    case errc::non_positive: return "NonPositive";
    case errc::missing_key: return "MissingKey";
    case errc::unknown_key: return "UnknownKey";
    case errc::bad_value: return "BadValue";
    case errc::insufficient_history: return "InsufficientHistory";
    case errc::empty_tangle: return "EmptyTangle";
    case errc::empty_tip_set: return "EmptyTipSet";
    case errc::identity_violation: return "IdentityViolation";
    case errc::too_large: return "TooLarge";
    case errc::degenerate_history: return "DegenerateHistory";
    case errc::blow_up: return "BlowUp";
    case errc::no_bracket: return "NoBracket";
    case errc::non_convergence: return "NonConvergence";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(errc::bad_value, "key '" + key + "' is not a number: '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    long long v = std::stoll(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(errc::bad_value, "key '" + key + "' is not an integer: '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(errc::bad_value, "key '" + key + "' is not an unsigned integer: '" + value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw Error(errc::bad_value, "empty element in key '" + key + "'");
    const auto last = item.find_last_not_of(" \t");
    out.push_back(parse_double(key, item.substr(first, last - first + 1)));
  }
  if (out.empty()) throw Error(errc::bad_value, "key '" + key + "' is an empty list");
  return out;
}

// tick count of `value` on the epsilon grid, or -1 if not a multiple.
std::int64_t ticks_on_grid(double value, double epsilon) {
  const double ratio = value / epsilon;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  const double tol = 1e-9 * std::max(1.0, std::fabs(value));
  if (n < 1 || std::fabs(static_cast<double>(n) * epsilon - value) > tol) return -1;
  return n;
}

const std::string& require(const std::map<std::string, std::string>& raw, const std::string& key) {
  auto it = raw.find(key);
  if (it == raw.end()) throw Error(errc::missing_key, "required key '" + key + "' not found");
  return it->second;
}

}  // namespace

ModelParams validate_params(const std::map<std::string, std::string>& raw) {
  ModelParams p;
  p.epsilon = parse_double("epsilon", require(raw, "epsilon"));
  p.batch_size = parse_int("batch_size", require(raw, "batch_size"));
  p.delays = parse_double_list("delays", require(raw, "delays"));
  p.probs = parse_double_list("probs", require(raw, "probs"));
  p.horizon = parse_double("horizon", require(raw, "horizon"));
  if (auto it = raw.find("seed"); it != raw.end()) p.seed = parse_u64("seed", it->second);
  return validate_params(p);
}

ModelParams validate_params(const ModelParams& params) {
  ModelParams p = params;
  if (p.epsilon <= 0.0) throw Error(errc::non_positive, "epsilon must be > 0");
  if (p.batch_size <= 0) throw Error(errc::non_positive, "batch_size must be > 0");
  if (p.horizon <= 0.0) throw Error(errc::non_positive, "horizon must be > 0");
  if (p.probs.size() != p.delays.size())
    throw Error(errc::bad_value, "delays and probs must have the same length");

  for (size_t i = 0; i + 1 < p.delays.size(); ++i)
    if (!(p.delays[i] < p.delays[i + 1]))
      throw Error(errc::non_increasing_delays, "delays must be strictly increasing");
  if (p.delays.front() <= 0.0) throw Error(errc::non_positive, "delays must be > 0");

  double sum = 0.0;
  for (double q : p.probs) {
    if (!(q > 0.0) || q > 1.0)
      throw Error(errc::bad_probabilities, "each probability must lie in (0, 1]");
    sum += q;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw Error(errc::bad_probabilities, "probabilities sum to " + std::to_string(sum));
  for (double& q : p.probs) q /= sum;  // exact renormalization after the tolerance check

  p.delay_ticks.clear();
  for (double h : p.delays) {
    const std::int64_t n = ticks_on_grid(h, p.epsilon);
    if (n < 0)
      throw Error(errc::non_divisible_delay,
                  "delay " + std::to_string(h) + " is not an integer multiple of epsilon");
    p.delay_ticks.push_back(n);
  }
  const std::int64_t n_t = ticks_on_grid(p.horizon, p.epsilon);
  if (n_t < 0)
    throw Error(errc::non_divisible_delay, "horizon is not an integer multiple of epsilon");
  p.horizon_ticks = n_t;
  p.lambda = static_cast<double>(p.batch_size) / p.epsilon;
  return p;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  static const std::set<std::string> model_keys = {"epsilon", "batch_size", "delays",
                                                   "probs",   "horizon",    "seed"};
  static const std::set<std::string> run_keys = {"replicas", "init_mode", "init_warmup",
                                                 "output_dir"};
  std::map<std::string, std::string> model_raw;
  std::map<std::string, std::string> run_raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(errc::bad_value,
                  origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (model_keys.count(key)) {
      model_raw[key] = value;
    } else if (run_keys.count(key)) {
      run_raw[key] = value;
    } else {
      throw Error(errc::unknown_key,
                  origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  RunConfig cfg;
  cfg.params = validate_params(model_raw);
  if (auto it = run_raw.find("replicas"); it != run_raw.end()) {
    cfg.replicas = parse_int("replicas", it->second);
    if (cfg.replicas <= 0) throw Error(errc::non_positive, "replicas must be > 0");
  }
  if (auto it = run_raw.find("init_mode"); it != run_raw.end()) {
    if (it->second != "warmup" && it->second != "explicit")
      throw Error(errc::bad_value, "init_mode must be 'warmup' or 'explicit'");
    cfg.init_mode = it->second;
  }
  if (auto it = run_raw.find("init_warmup"); it != run_raw.end()) {
    cfg.init_warmup = parse_int("init_warmup", it->second);
    if (cfg.init_warmup < 0) throw Error(errc::non_positive, "init_warmup must be >= 0");
  }
  if (auto it = run_raw.find("output_dir"); it != run_raw.end()) cfg.output_dir = it->second;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index) {
  // splitmix64 finalizer over master ^ (odd-constant * (index + 1)); every
  // stage is a bijection of u64, so distinct indices give distinct seeds.
  std::uint64_t x = master_seed ^ (0x9E3779B97F4A7C15ull * (replica_index + 1));
  return Rng::splitmix64(x);
}

}  // namespace tangle
