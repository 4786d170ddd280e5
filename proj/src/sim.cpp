#include "tangle/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tangle {

namespace {

std::vector<std::vector<std::vector<std::int64_t>>> make_jump_grid(const ModelParams& p) {
  const int m = p.num_types();
  std::vector<std::vector<std::vector<std::int64_t>>> jumps(m);
  for (int i = 0; i < m; ++i) {
    jumps[i].resize(m);
    for (int j = 0; j < i; ++j) jumps[i][j].assign(p.delay_ticks[i], 0);
  }
  return jumps;
}

}  // namespace

std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& weights) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const size_t k = weights.size();
  std::vector<std::int64_t> out(k, 0);
  if (total <= 0 || wsum <= 0.0) return out;
  std::vector<double> frac(k);
  std::int64_t assigned = 0;
  for (size_t i = 0; i < k; ++i) {
    const double share = static_cast<double>(total) * weights[i] / wsum;
    out[i] = static_cast<std::int64_t>(std::floor(share));
    frac[i] = share - std::floor(share);
    assigned += out[i];
  }
  std::vector<size_t> order(k);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return frac[a] > frac[b]; });
  for (std::int64_t r = 0; r < total - assigned; ++r) out[order[r % k]] += 1;
  return out;
}

TangleSim::TangleSim(const ModelParams& params, const InitSpec& init, std::uint64_t seed)
    : params_(validate_params(params)), rng_(seed) {
  ring_.resize(params_.max_delay_ticks() + 1);
  switch (init.mode) {
    case InitSpec::Mode::warmup: {
      const std::int64_t ticks =
          init.warmup_ticks > 0 ? init.warmup_ticks : 4 * params_.max_delay_ticks();
      if (ticks < 2 * params_.max_delay_ticks())
        throw Error(errc::insufficient_history,
                    "warmup must cover at least 2 h_M (" +
                        std::to_string(2 * params_.max_delay_ticks()) + " ticks)");
      init_genesis(params_.batch_size);
      run_warmup(ticks);
      break;
    }
    case InitSpec::Mode::explicit_history:
      init_explicit(init.history);
      break;
    case InitSpec::Mode::tips:
      init_tips(init.tips);
      break;
  }
  if (tips_.empty()) throw Error(errc::empty_tangle, "initialization produced no tips");
}

void TangleSim::init_genesis(std::int64_t count) {
  for (std::int64_t i = 0; i < count; ++i) tips_.push_back({next_id_++, 0, 0});
  vertices_created_ = count;
}

void TangleSim::run_warmup(std::int64_t ticks) {
  clock_ = -ticks;
  history_.reserve(2 * params_.max_delay_ticks());
  for (std::int64_t k = 0; k < ticks; ++k) {
    StepRecord rec = step();
    if (rec.tick >= -2 * params_.max_delay_ticks()) history_.push_back(std::move(rec));
  }
}

void TangleSim::init_explicit(const ExplicitHistory& h) {
  const int m = params_.num_types();
  const std::int64_t n_m = params_.max_delay_ticks();
  const size_t span = static_cast<size_t>(2 * n_m + 1);
  if (h.free_tips.size() < span || h.tips.size() < span)
    throw Error(errc::insufficient_history,
                "explicit history must cover 2 h_M + 1 ticks (" + std::to_string(span) + ")");
  if (h.free_tips.size() != h.tips.size())
    throw Error(errc::bad_value, "free-tip and tip histories differ in length");

  // trailing window: index span-1 is tick 0
  const size_t off = h.tips.size() - span;
  auto x_at = [&](std::int64_t j) { return h.free_tips[off + j + 2 * n_m]; };
  auto y_at = [&](std::int64_t j) { return h.tips[off + j + 2 * n_m]; };
  for (std::int64_t j = -2 * n_m; j <= 0; ++j) {
    if (y_at(j) < 0 || x_at(j) < 0 || x_at(j) > y_at(j))
      throw Error(errc::degenerate_history, "need 0 <= F <= L at tick " + std::to_string(j));
  }
  if (y_at(0) < 1) throw Error(errc::degenerate_history, "L(0) must be >= 1");

  const std::int64_t w_total = y_at(0) - x_at(0);
  std::vector<std::vector<std::int64_t>> w0 = h.w0;
  if (w0.empty()) {
    // spread the pending mass over (type, rlt) cells, weight p_i per cell
    std::vector<double> weights;
    for (int i = 0; i < m; ++i)
      weights.insert(weights.end(), params_.delay_ticks[i], params_.probs[i]);
    const auto flat = apportion(w_total, weights);
    size_t pos = 0;
    w0.resize(m);
    for (int i = 0; i < m; ++i) {
      w0[i].assign(flat.begin() + pos, flat.begin() + pos + params_.delay_ticks[i]);
      pos += params_.delay_ticks[i];
    }
  } else {
    if (static_cast<int>(w0.size()) != m)
      throw Error(errc::bad_value, "w0 must have one row per type");
    std::int64_t sum = 0;
    for (int i = 0; i < m; ++i) {
      if (static_cast<std::int64_t>(w0[i].size()) != params_.delay_ticks[i])
        throw Error(errc::bad_value, "w0 row " + std::to_string(i + 1) + " must have n_i cells");
      for (std::int64_t c : w0[i]) {
        if (c < 0) throw Error(errc::degenerate_history, "negative pending count");
        sum += c;
      }
    }
    if (sum != w_total)
      throw Error(errc::degenerate_history, "pending grid sums to " + std::to_string(sum) +
                                                ", expected L(0) - F(0) = " +
                                                std::to_string(w_total));
  }

  std::vector<std::vector<std::int64_t>> arrivals = h.arrivals;
  if (arrivals.empty()) {
    const auto per_tick = apportion(params_.batch_size, params_.probs);
    arrivals.resize(m);
    for (int i = 0; i < m; ++i) arrivals[i].assign(params_.delay_ticks[i], per_tick[i]);
  } else {
    if (static_cast<int>(arrivals.size()) != m)
      throw Error(errc::bad_value, "arrivals must have one row per type");
    for (int i = 0; i < m; ++i) {
      if (static_cast<std::int64_t>(arrivals[i].size()) != params_.delay_ticks[i])
        throw Error(errc::bad_value, "arrivals row " + std::to_string(i + 1) +
                                         " must cover ticks -n_i..-1");
      for (std::int64_t c : arrivals[i])
        if (c < 0) throw Error(errc::bad_value, "negative arrival count");
    }
  }

  // materialize the time-0 state: free tips, pending tips with a single
  // determining POW each, and the in-flight completion calendar
  for (std::int64_t k = 0; k < x_at(0); ++k) tips_.push_back({next_id_++, 0, 0});
  for (int i = 0; i < m; ++i)
    for (std::int64_t u = 0; u < params_.delay_ticks[i]; ++u)
      for (std::int64_t c = 0; c < w0[i][u]; ++c) tips_.push_back({next_id_++, i + 1, u});
  std::int64_t in_flight = 0;
  for (int i = 0; i < m; ++i) {
    for (std::int64_t k = 0; k < params_.delay_ticks[i]; ++k) {
      for (std::int64_t c = 0; c < arrivals[i][k]; ++c) {
        ring_[ring_slot(k)].push_back(next_id_++);
        ++in_flight;
      }
    }
  }
  vertices_created_ = y_at(0) + in_flight;
  clock_ = 0;

  // declared count history; flows are not part of the declared data
  const auto default_arrivals = apportion(params_.batch_size, params_.probs);
  for (std::int64_t j = -2 * n_m; j < 0; ++j) {
    StepRecord rec;
    rec.tick = j;
    rec.tips = y_at(j);
    rec.free_tips = x_at(j);
    rec.pending_tips = y_at(j) - x_at(j);
    rec.arrivals_by_type.assign(m, 0);
    for (int i = 0; i < m; ++i) {
      const std::int64_t k = j + params_.delay_ticks[i];
      rec.arrivals_by_type[i] =
          (k >= 0 && k < params_.delay_ticks[i]) ? arrivals[i][k] : default_arrivals[i];
    }
    rec.free_selected_by_type.assign(m, 0);
    rec.has_flows = false;
    history_.push_back(std::move(rec));
  }
}

void TangleSim::init_tips(const std::vector<TipSpec>& tips) {
  for (const TipSpec& spec : tips) {
    if (spec.type == 0) {
      tips_.push_back({next_id_++, 0, 0});
    } else {
      if (spec.type < 1 || spec.type > params_.num_types())
        throw Error(errc::bad_value, "tip type out of range");
      const std::int64_t n_i = params_.delay_ticks[spec.type - 1];
      if (spec.rlt_ticks < 0 || spec.rlt_ticks > n_i - 1)
        throw Error(errc::bad_value, "pending RLT must lie in [0, n_i - 1]");
      tips_.push_back({next_id_++, spec.type, spec.rlt_ticks});
    }
  }
  vertices_created_ = static_cast<std::int64_t>(tips.size());
  clock_ = 0;
}

std::size_t TangleSim::ring_slot(std::int64_t tick) const {
  const auto s = static_cast<std::int64_t>(ring_.size());
  return static_cast<std::size_t>(((tick % s) + s) % s);
}

int TangleSim::sample_type() {
  const double v = rng_.next_unit();
  const int m = params_.num_types();
  double cum = 0.0;
  for (int i = 0; i < m - 1; ++i) {
    cum += params_.probs[i];
    if (v < cum) return i;
  }
  return m - 1;
}

StepRecord TangleSim::snapshot() const {
  const int m = params_.num_types();
  StepRecord rec;
  rec.tick = clock_;
  rec.tips = static_cast<std::int64_t>(tips_.size());
  rec.arrivals_by_type.assign(m, 0);
  rec.free_selected_by_type.assign(m, 0);
  rec.w_grid.resize(m);
  for (int i = 0; i < m; ++i) rec.w_grid[i].assign(params_.delay_ticks[i], 0);
  std::int64_t free_count = 0;
  for (const Tip& tip : tips_) {
    if (tip.type == 0) {
      ++free_count;
      continue;
    }
    const std::int64_t u = tip.dep_tick - clock_;
    rec.w_grid[tip.type - 1][u] += 1;
  }
  rec.free_tips = free_count;
  rec.pending_tips = rec.tips - free_count;
  rec.has_flows = false;
  return rec;
}

StepRecord TangleSim::step() {
  const std::int64_t n = clock_;
  const auto num_tips = static_cast<std::int64_t>(tips_.size());
  if (num_tips == 0)
    throw Error(errc::empty_tip_set, "no tips at tick " + std::to_string(n));
  const int m = params_.num_types();
  const std::int64_t batch = params_.batch_size;

  StepRecord rec = snapshot();
  rec.has_flows = true;
  rec.jumps = make_jump_grid(params_);

  if (sel_stamp_.size() < tips_.size()) {
    sel_stamp_.resize(tips_.size(), std::numeric_limits<std::int64_t>::min());
    sel_min_.resize(tips_.size(), 0);
  }

  // (1) POW types, one multinoulli draw per arrival in arrival order
  arrival_types_.clear();
  for (std::int64_t a = 0; a < batch; ++a) {
    const int t = sample_type();
    arrival_types_.push_back(t);
    rec.arrivals_by_type[t] += 1;
  }

  // (2) two parent draws per arrival from the t_n tip snapshot
  touched_.clear();
  for (std::int64_t a = 0; a < batch; ++a) {
    const int t = arrival_types_[a];
    Vertex v;
    v.id = next_id_++;
    v.arrival_tick = n;
    v.pow_type = t + 1;
    v.completion_tick = n + params_.delay_ticks[t];
    for (int s = 0; s < 2; ++s) {
      const auto slot =
          static_cast<std::size_t>(rng_.next_below(static_cast<std::uint64_t>(num_tips)));
      v.parents[s] = tips_[slot].id;
      if (sel_stamp_[slot] != n) {
        sel_stamp_[slot] = n;
        sel_min_[slot] = t;
        touched_.push_back(slot);
      } else if (t < sel_min_[slot]) {
        sel_min_[slot] = t;
      }
    }
    ring_[ring_slot(v.completion_tick)].push_back(v.id);
    vertices_.push_back(v);
  }
  vertices_created_ += batch;

  // (3) measure selections per tip and apply their t_{n+1} effects.
  // A free tip selected by types S joins F_{min S}; a pending tip of type i
  // with RLT u jumps to the minimal selecting type j with n_j <= u. A new
  // directed POW completing later than the current earliest never changes
  // departure time or type, so the minimal selecting type is all we need.
  for (const std::size_t slot : touched_) {
    Tip& tip = tips_[slot];
    const int sel = sel_min_[slot];
    const std::int64_t n_sel = params_.delay_ticks[sel];
    if (tip.type == 0) {
      rec.free_selected_by_type[sel] += 1;
      tip.type = sel + 1;
      tip.dep_tick = n + n_sel;
    } else {
      const std::int64_t u = tip.dep_tick - n;
      if (n_sel <= u) {
        rec.jumps[tip.type - 1][sel][u] += 1;
        tip.type = sel + 1;
        tip.dep_tick = n + n_sel;
      }
    }
  }

  // (4) tips whose earliest directed POW completed at t_n leave the tip set
  for (std::size_t slot = 0; slot < tips_.size();) {
    if (tips_[slot].type != 0 && tips_[slot].dep_tick == n) {
      tips_[slot] = tips_.back();
      tips_.pop_back();
    } else {
      ++slot;
    }
  }

  // (5) vertices completing at t_n are free tips from t_{n+1}
  auto& due = ring_[ring_slot(n)];
  for (const std::int64_t id : due) tips_.push_back({id, 0, 0});
  due.clear();

  if (sel_stamp_.size() < tips_.size()) {
    sel_stamp_.resize(tips_.size(), std::numeric_limits<std::int64_t>::min());
    sel_min_.resize(tips_.size(), 0);
  }

  clock_ = n + 1;
  return rec;
}

const StepRecord& RunResult::at_tick(std::int64_t tick) const {
  if (tick == final_state.tick) return final_state;
  const std::int64_t idx = tick - first_tick;
  if (idx < 0 || idx >= static_cast<std::int64_t>(records.size()))
    throw Error(errc::bad_value, "tick " + std::to_string(tick) + " not recorded");
  return records[static_cast<size_t>(idx)];
}

bool RunResult::has_tick(std::int64_t tick) const {
  const std::int64_t idx = tick - first_tick;
  return idx >= 0 && idx < static_cast<std::int64_t>(records.size());
}

RunResult run_simulation(const ModelParams& raw_params, const InitSpec& init,
                         std::uint64_t seed) {
  const ModelParams params = validate_params(raw_params);
  TangleSim sim(params, init, seed);
  RunResult out;
  out.params = params;
  out.records = sim.history();
  for (std::int64_t n = 0; n < params.horizon_ticks; ++n) out.records.push_back(sim.step());
  out.final_state = sim.snapshot();
  out.first_tick = out.records.empty() ? 0 : out.records.front().tick;
  return out;
}

namespace {

const StepRecord* flows_at(const RunResult& run, std::int64_t tick) {
  if (!run.has_tick(tick)) return nullptr;
  const StepRecord& rec = run.at_tick(tick);
  return rec.has_flows ? &rec : nullptr;
}

}  // namespace

IdentityReport check_step_identities(const RunResult& run) {
  const ModelParams& p = run.params;
  const int m = p.num_types();
  const auto& n_ticks = p.delay_ticks;
  IdentityReport report;

  auto note = [&](std::int64_t tick, const char* eq, std::int64_t lhs, std::int64_t rhs) {
    if (lhs != rhs) report.violations.push_back({tick, eq, lhs, rhs});
  };

  const std::int64_t last_tick = run.final_state.tick;
  for (std::int64_t tick = run.first_tick; tick <= last_tick; ++tick) {
    const StepRecord& rec = run.at_tick(tick);
    note(tick, "L=F+W", rec.tips, rec.free_tips + rec.pending_tips);
    if (!rec.has_flows) continue;
    std::int64_t total_arrivals = 0;
    for (const std::int64_t c : rec.arrivals_by_type) total_arrivals += c;
    note(tick, "sum_N", total_arrivals, p.batch_size);
  }

  for (std::int64_t tick = run.first_tick; tick < last_tick; ++tick) {
    const StepRecord* cur = flows_at(run, tick);
    if (cur == nullptr) continue;
    const StepRecord& next = run.at_tick(tick + 1);
    report.pairs_checked += 1;

    // evo_F needs the arrival history h_i back
    bool have_lookback = true;
    for (int i = 0; i < m; ++i)
      if (flows_at(run, tick - n_ticks[i]) == nullptr) have_lookback = false;
    if (have_lookback) {
      std::int64_t rhs = 0;
      for (int i = 0; i < m; ++i) {
        rhs += flows_at(run, tick - n_ticks[i])->arrivals_by_type[i];
        rhs -= cur->free_selected_by_type[i];
      }
      note(tick, "evo_F", next.free_tips - cur->free_tips, rhs);
    }

    if (!next.w_grid.empty()) {
      // evo_Wi1: top cell inflow
      for (int i = 0; i < m; ++i) {
        std::int64_t rhs = cur->free_selected_by_type[i];
        for (int j = i + 1; j < m; ++j)
          for (std::int64_t u = n_ticks[i]; u < n_ticks[j]; ++u) rhs += cur->jumps[j][i][u];
        note(tick, "evo_Wi1", next.w_grid[i][n_ticks[i] - 1], rhs);
      }
      // evo_Wi2: advection minus jumps everywhere below the top cell
      for (int i = 0; i < m; ++i) {
        for (std::int64_t u = 1; u < n_ticks[i]; ++u) {
          std::int64_t jumped = 0;
          for (int j = 0; j < i; ++j)
            if (n_ticks[j] <= u) jumped += cur->jumps[i][j][u];
          note(tick, "evo_Wi2", next.w_grid[i][u - 1], cur->w_grid[i][u] - jumped);
        }
      }
    }

    // evo_L diagnostic (telescoped departures)
    bool have_l = true;
    for (int i = 0; i < m; ++i)
      if (flows_at(run, tick - n_ticks[i]) == nullptr) have_l = false;
    for (int i = 0; i < m && have_l; ++i)
      for (int j = 0; j < i && have_l; ++j) {
        if (flows_at(run, tick - n_ticks[j]) == nullptr) have_l = false;
        for (std::int64_t u = n_ticks[j] + 1; u < n_ticks[i] && have_l; ++u)
          if (flows_at(run, tick - u) == nullptr) have_l = false;
      }
    if (have_l) {
      std::int64_t rhs = 0;
      for (int i = 0; i < m; ++i) {
        const StepRecord* past = flows_at(run, tick - n_ticks[i]);
        rhs += past->arrivals_by_type[i] - past->free_selected_by_type[i];
      }
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
          for (std::int64_t u = n_ticks[j] + 1; u < n_ticks[i]; ++u) {
            rhs -= flows_at(run, tick - n_ticks[j])->jumps[i][j][u];
            rhs += flows_at(run, tick - u)->jumps[i][j][u];
          }
      const std::int64_t residual = std::llabs((next.tips - cur->tips) - rhs);
      report.evo_l_checked += 1;
      if (residual > report.evo_l_max_residual) {
        report.evo_l_max_residual = residual;
        report.evo_l_worst_tick = tick;
      }
    }

    // evo_W diagnostic (pending mass via selection history)
    bool have_w = true;
    for (std::int64_t s = 1; s <= n_ticks[m - 1] && have_w; ++s)
      if (flows_at(run, tick - s) == nullptr) have_w = false;
    if (have_w) {
      std::int64_t rhs = 0;
      for (int i = 0; i < m; ++i)
        for (std::int64_t s = 1; s <= n_ticks[i]; ++s)
          rhs += flows_at(run, tick - s)->free_selected_by_type[i];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
          for (std::int64_t s = n_ticks[j] + 1; s < n_ticks[i]; ++s)
            for (std::int64_t u = s; u < n_ticks[i]; ++u)
              rhs -= flows_at(run, tick - s)->jumps[i][j][u];
      const std::int64_t residual = std::llabs(cur->pending_tips - rhs);
      report.evo_w_checked += 1;
      if (residual > report.evo_w_max_residual) {
        report.evo_w_max_residual = residual;
        report.evo_w_worst_tick = tick;
      }
    }
  }
  return report;
}

}  // namespace tangle
