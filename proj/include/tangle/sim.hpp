#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tangle/params.hpp"
#include "tangle/rng.hpp"

namespace tangle {

/// One accepted or in-flight vertex of the DAG.
struct Vertex {
  std::int64_t id = -1;
  std::int64_t arrival_tick = 0;
  int pow_type = 0;                  // 1-based type index
  std::int64_t completion_tick = 0;  // arrival_tick + n_type
  std::int64_t parents[2] = {-1, -1};
};

/// Everything measured at one tick. Count fields (tips/free/pending and the
/// pending grid) describe the state at t_n before the tick's arrivals act;
/// flow fields (arrivals, selections, jumps) describe what happened during
/// the tick. A terminal snapshot carries counts only (has_flows = false).
struct StepRecord {
  std::int64_t tick = 0;
  std::int64_t tips = 0;          // L(t_n)
  std::int64_t free_tips = 0;     // F(t_n)
  std::int64_t pending_tips = 0;  // W(t_n)
  std::vector<std::int64_t> arrivals_by_type;       // N_i(t_n)
  std::vector<std::int64_t> free_selected_by_type;  // F_i(t_n), min-type attribution
  // jumps[i][j][u] = J_{i+1,j+1}(t_n, u ticks); allocated for j < i with
  // length n_{i+1} in u, nonzero only for u in [n_{j+1}, n_{i+1} - 1].
  std::vector<std::vector<std::vector<std::int64_t>>> jumps;
  // w_grid[i][u] = W_{i+1}(t_n, u ticks), u in [0, n_{i+1} - 1]. A tip at
  // u = 0 has its determining POW completing at t_n and leaves at t_{n+1}.
  std::vector<std::vector<std::int64_t>> w_grid;
  bool has_flows = false;
};

/// Tip description for controlled experiments: type 0 = free tip,
/// type i >= 1 = pending tip of type i whose residual life is rlt_ticks.
struct TipSpec {
  int type = 0;
  std::int64_t rlt_ticks = 0;
};

/// Explicit initial condition: count histories over [-2 h_M, 0] plus the
/// pending grid at time 0 and the in-flight arrival counts. Optional pieces
/// are apportioned deterministically from the batch size and the type
/// probabilities when omitted.
struct ExplicitHistory {
  std::vector<std::int64_t> free_tips;  // F(t_j), j = -2 n_M .. 0
  std::vector<std::int64_t> tips;       // L(t_j), j = -2 n_M .. 0
  // w0[i][u] = W_{i+1}(t_0, u ticks); empty => apportioned from L(0) - F(0)
  std::vector<std::vector<std::int64_t>> w0;
  // arrivals[i][k] = N_{i+1}(t_{-n_i + k}), k = 0 .. n_i - 1; empty => p-apportioned
  std::vector<std::vector<std::int64_t>> arrivals;
};

struct InitSpec {
  enum class Mode { warmup, explicit_history, tips };
  Mode mode = Mode::warmup;
  std::int64_t warmup_ticks = 0;  // 0 => default 4 * n_M
  ExplicitHistory history;        // for explicit_history
  std::vector<TipSpec> tips;      // for tips

  static InitSpec warmup(std::int64_t ticks = 0) {
    InitSpec s;
    s.mode = Mode::warmup;
    s.warmup_ticks = ticks;
    return s;
  }
  static InitSpec explicit_history(ExplicitHistory h) {
    InitSpec s;
    s.mode = Mode::explicit_history;
    s.history = std::move(h);
    return s;
  }
  static InitSpec from_tips(std::vector<TipSpec> tips) {
    InitSpec s;
    s.mode = Mode::tips;
    s.tips = std::move(tips);
    return s;
  }
};

/// Agent-level tangle simulation. One instance is strictly single-threaded
/// and deterministic in its seed; independent instances share nothing.
class TangleSim {
public:
  TangleSim(const ModelParams& params, const InitSpec& init, std::uint64_t seed);

  /// Executes one tick at the current clock and returns its record.
  /// Draw order is fixed: N type draws in arrival order, then two parent
  /// draws per arrival (arrival index, then parent slot).
  StepRecord step();

  /// Counts-only record of the current state (no flows).
  StepRecord snapshot() const;

  std::int64_t clock() const { return clock_; }
  std::int64_t tip_count() const { return static_cast<std::int64_t>(tips_.size()); }
  std::int64_t vertices_created() const { return vertices_created_; }
  const ModelParams& params() const { return params_; }

  /// Warmup / explicit-history records for ticks [-2 n_M, -1].
  const std::vector<StepRecord>& history() const { return history_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

private:
  struct Tip {
    std::int64_t id = -1;
    int type = 0;                // 0 = free, 1..M pending
    std::int64_t dep_tick = 0;   // earliest directed completion (pending only)
  };

  void init_genesis(std::int64_t count);
  void run_warmup(std::int64_t ticks);
  void init_explicit(const ExplicitHistory& h);
  void init_tips(const std::vector<TipSpec>& tips);
  int sample_type();
  std::size_t ring_slot(std::int64_t tick) const;

  ModelParams params_;
  Rng rng_;
  std::int64_t clock_ = 0;

  std::vector<Tip> tips_;
  std::vector<std::int64_t> sel_stamp_;  // per tip slot: last tick it was selected
  std::vector<int> sel_min_;             // per tip slot: min selecting type this tick
  std::vector<std::size_t> touched_;
  std::vector<int> arrival_types_;

  // completion calendar: ids of vertices finishing at tick t live in
  // ring_[ring_slot(t)] until consumed.
  std::vector<std::vector<std::int64_t>> ring_;

  std::vector<Vertex> vertices_;
  std::int64_t vertices_created_ = 0;
  std::int64_t next_id_ = 0;
  std::vector<StepRecord> history_;
};

/// Full run: init, then horizon_ticks steps, then a terminal snapshot so the
/// state at t = T is observable. records = history ++ in-run records.
struct RunResult {
  ModelParams params;
  std::int64_t first_tick = 0;  // tick of records.front(), normally -2 n_M
  std::vector<StepRecord> records;
  StepRecord final_state;  // tick n_T, counts only

  const StepRecord& at_tick(std::int64_t tick) const;
  bool has_tick(std::int64_t tick) const;
};

RunResult run_simulation(const ModelParams& params, const InitSpec& init, std::uint64_t seed);

/// Deterministic largest-remainder apportionment of `total` across weights.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& weights);

struct IdentityIssue {
  std::int64_t tick = 0;
  std::string equation;  // "evo_F", "evo_Wi1", "evo_Wi2", "L=F+W", "sum_N"
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
};

/// Result of replaying the update-rule identities over a run. The five exact
/// identities land in `violations`; the two telescoping identities for L and
/// W are evaluated as diagnostics with their largest absolute residuals.
struct IdentityReport {
  std::vector<IdentityIssue> violations;
  std::int64_t pairs_checked = 0;
  std::int64_t evo_l_checked = 0;
  std::int64_t evo_l_max_residual = 0;
  std::int64_t evo_l_worst_tick = 0;
  std::int64_t evo_w_checked = 0;
  std::int64_t evo_w_max_residual = 0;
  std::int64_t evo_w_worst_tick = 0;
  bool ok() const { return violations.empty(); }
};

IdentityReport check_step_identities(const RunResult& run);

}  // namespace tangle
