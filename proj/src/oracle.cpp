#include "tangle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tangle {

namespace {

class KahanSum {
public:
  void add(double value) {
    const double y = value - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double get() const { return s_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

ModelParams TinyInstance::to_params() const {
  ModelParams p;
  p.epsilon = epsilon;
  p.batch_size = batch_size;
  p.delays = delays;
  p.probs = probs;
  p.horizon = epsilon;  // one tick
  return validate_params(p);
}

OracleExpectations enumerate_expectations(const TinyInstance& inst) {
  const ModelParams params = inst.to_params();
  const int m = params.num_types();
  const auto num_tips = static_cast<int>(inst.tips.size());
  const auto batch = static_cast<int>(inst.batch_size);
  if (num_tips > 6 || batch > 3 || m > 3 || num_tips < 1 || batch < 1)
    throw Error(errc::too_large, "enumeration bounds are L <= 6, N <= 3, M <= 3");
  for (const TipSpec& tip : inst.tips) {
    if (tip.type < 0 || tip.type > m) throw Error(errc::bad_value, "tip type out of range");
    if (tip.type > 0 &&
        (tip.rlt_ticks < 0 || tip.rlt_ticks > params.delay_ticks[tip.type - 1] - 1))
      throw Error(errc::bad_value, "pending RLT out of range");
  }

  OracleExpectations out;
  out.arrivals.assign(m, 0.0);
  out.free_selected.assign(m, 0.0);
  out.jumps.resize(m);
  for (int i = 0; i < m; ++i) {
    out.jumps[i].resize(m);
    for (int j = 0; j < i; ++j) out.jumps[i][j].assign(params.delay_ticks[i], 0.0);
  }

  std::vector<KahanSum> f_acc(m);
  std::vector<KahanSum> n_acc(m);
  std::vector<std::vector<std::vector<KahanSum>>> j_acc(m);
  for (int i = 0; i < m; ++i) {
    j_acc[i].resize(m);
    for (int j = 0; j < i; ++j) j_acc[i][j].resize(params.delay_ticks[i]);
  }

  const int draws = 2 * batch;
  std::vector<int> types(batch, 0);
  std::vector<int> choice(draws, 0);
  std::vector<int> min_sel(num_tips);
  const double tuple_weight = std::pow(static_cast<double>(num_tips), -draws);

  while (true) {
    // weight of this type assignment
    double type_weight = 1.0;
    for (int a = 0; a < batch; ++a) type_weight *= params.probs[types[a]];
    for (int i = 0; i < m; ++i) n_acc[i].add(type_weight * std::count(types.begin(), types.end(), i));

    std::vector<double> f_sum(m, 0.0);
    std::vector<std::vector<std::vector<double>>> j_sum(m);
    for (int i = 0; i < m; ++i) {
      j_sum[i].resize(m);
      for (int j = 0; j < i; ++j) j_sum[i][j].assign(params.delay_ticks[i], 0.0);
    }

    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      std::fill(min_sel.begin(), min_sel.end(), m);
      for (int d = 0; d < draws; ++d) {
        const int t = types[d / 2];
        int& cur = min_sel[choice[d]];
        if (t < cur) cur = t;
      }
      for (int k = 0; k < num_tips; ++k) {
        if (min_sel[k] == m) continue;  // not selected
        const TipSpec& tip = inst.tips[k];
        const int sel = min_sel[k];
        if (tip.type == 0) {
          f_sum[sel] += 1.0;
        } else if (params.delay_ticks[sel] <= tip.rlt_ticks) {
          j_sum[tip.type - 1][sel][tip.rlt_ticks] += 1.0;
        }
      }
      // next parent tuple
      int d = 0;
      while (d < draws && ++choice[d] == num_tips) choice[d++] = 0;
      if (d == draws) break;
    }

    const double w = type_weight * tuple_weight;
    for (int i = 0; i < m; ++i) f_acc[i].add(w * f_sum[i]);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        for (std::int64_t u = 0; u < params.delay_ticks[i]; ++u)
          if (j_sum[i][j][u] != 0.0) j_acc[i][j][u].add(w * j_sum[i][j][u]);

    // next type assignment
    int a = 0;
    while (a < batch && ++types[a] == m) types[a++] = 0;
    if (a == batch) break;
  }

  for (int i = 0; i < m; ++i) {
    out.arrivals[i] = n_acc[i].get();
    out.free_selected[i] = f_acc[i].get();
    for (int j = 0; j < i; ++j)
      for (std::int64_t u = 0; u < params.delay_ticks[i]; ++u)
        out.jumps[i][j][u] = j_acc[i][j][u].get();
  }
  return out;
}

OracleExpectations leading_order_expectations(const TinyInstance& inst) {
  const ModelParams params = inst.to_params();
  const int m = params.num_types();
  const auto num_tips = static_cast<double>(inst.tips.size());
  if (inst.tips.empty()) throw Error(errc::bad_value, "instance needs at least one tip");
  const auto batch = static_cast<double>(inst.batch_size);

  double free_count = 0.0;
  std::vector<std::vector<double>> w_grid(m);
  for (int i = 0; i < m; ++i) w_grid[i].assign(params.delay_ticks[i], 0.0);
  for (const TipSpec& tip : inst.tips) {
    if (tip.type == 0)
      free_count += 1.0;
    else
      w_grid[tip.type - 1][tip.rlt_ticks] += 1.0;
  }

  OracleExpectations out;
  out.arrivals.assign(m, 0.0);
  out.free_selected.assign(m, 0.0);
  out.jumps.resize(m);
  for (int i = 0; i < m; ++i) {
    out.arrivals[i] = batch * params.probs[i];
    out.free_selected[i] = 2.0 * batch * params.probs[i] * free_count / num_tips;
    out.jumps[i].resize(m);
    for (int j = 0; j < i; ++j) {
      out.jumps[i][j].assign(params.delay_ticks[i], 0.0);
      for (std::int64_t u = 0; u < params.delay_ticks[i]; ++u)
        out.jumps[i][j][u] = 2.0 * batch * params.probs[j] * w_grid[i][u] / num_tips;
    }
  }
  return out;
}

TinyInstance parse_tiny_instance_text(const std::string& text, const std::string& origin) {
  TinyInstance inst;
  bool have_tips = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  std::map<std::string, std::string> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(errc::bad_value, origin + ":" + std::to_string(lineno) + ": expected key = value");
    raw[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const auto& [key, value] : raw) {
    if (key == "epsilon") {
      inst.epsilon = std::stod(value);
    } else if (key == "batch_size") {
      inst.batch_size = std::stoll(value);
    } else if (key == "delays" || key == "probs") {
      std::vector<double>& dst = (key == "delays") ? inst.delays : inst.probs;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) dst.push_back(std::stod(trim(item)));
    } else if (key == "tips") {
      have_tips = true;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string spec = trim(item);
        if (spec == "f" || spec == "free") {
          inst.tips.push_back({0, 0});
        } else if (spec.rfind("p:", 0) == 0) {
          const auto second = spec.find(':', 2);
          if (second == std::string::npos)
            throw Error(errc::bad_value, origin + ": pending tip needs p:TYPE:RLT");
          inst.tips.push_back({std::stoi(spec.substr(2, second - 2)),
                               std::stoll(spec.substr(second + 1))});
        } else {
          throw Error(errc::bad_value, origin + ": bad tip spec '" + spec + "'");
        }
      }
    } else {
      throw Error(errc::unknown_key, origin + ": unknown key '" + key + "'");
    }
  }
  if (inst.batch_size <= 0 || inst.delays.empty() || inst.probs.empty() || !have_tips)
    throw Error(errc::missing_key, origin + ": need batch_size, delays, probs, tips");
  return inst;
}

TinyInstance load_tiny_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open instance file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tiny_instance_text(buf.str(), path);
}

}  // namespace tangle
