#include "tangle/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tangle {

namespace {

class CsvOut {
public:
  explicit CsvOut(const std::string& path) : path_(path) {
    if (path == "-") return;
    file_.open(path);
    if (!file_) throw Error(errc::io_error, "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

private:
  std::string path_;
  std::ofstream file_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_time(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_series_csv(const std::string& path, const RunResult& run) {
  CsvOut out(path);
  auto& os = out.stream();
  const int m = run.params.num_types();
  os << "tick,t,L,F,W";
  for (int i = 1; i <= m; ++i) os << ",N_" << i;
  for (int i = 1; i <= m; ++i) os << ",F_" << i;
  os << "\n";
  for (const StepRecord& rec : run.records) {
    os << rec.tick << ',' << fmt_time(run.params.time_at(rec.tick)) << ',' << rec.tips << ','
       << rec.free_tips << ',' << rec.pending_tips;
    for (int i = 0; i < m; ++i) os << ',' << rec.arrivals_by_type[i];
    for (int i = 0; i < m; ++i) os << ',' << rec.free_selected_by_type[i];
    os << "\n";
  }
}

void write_wgrid_csv(const std::string& path, const RunResult& run) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "tick,type,u_ticks,count\n";
  auto emit = [&](const StepRecord& rec) {
    for (size_t i = 0; i < rec.w_grid.size(); ++i)
      for (size_t u = 0; u < rec.w_grid[i].size(); ++u)
        os << rec.tick << ',' << (i + 1) << ',' << u << ',' << rec.w_grid[i][u] << "\n";
  };
  for (const StepRecord& rec : run.records) emit(rec);
  emit(run.final_state);
}

void write_fluid_csv(const std::string& path, const FluidSeries& s) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "t,f,l,w_total\n";
  for (std::int64_t tick = 0; tick <= s.last_tick; ++tick) {
    os << fmt_time(s.time_at(tick)) << ',' << fmt(s.f_at(tick)) << ',' << fmt(s.l_at(tick))
       << ',' << fmt(s.w_total_at(tick)) << "\n";
  }
}

void write_fluid_wgrid_csv(const std::string& path, const FluidSeries& s) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "t,type,u,w\n";
  for (std::int64_t tick = 0; tick <= s.last_tick; ++tick) {
    const auto& slice = s.w_at(tick);
    for (size_t i = 0; i < slice.size(); ++i)
      for (size_t u = 0; u < slice[i].size(); ++u)
        os << fmt_time(s.time_at(tick)) << ',' << (i + 1) << ','
           << fmt_time(static_cast<double>(u) * s.dt) << ',' << fmt(slice[i][u]) << "\n";
  }
}

void write_report_csv(const std::string& path, const ComparisonReport& report) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "replica,seed,gT,comp_F,comp_L,comp_W\n";
  for (const ReplicaOutcome& r : report.replicas) {
    if (r.failed) continue;
    os << r.replica << ',' << r.seed << ',' << fmt(r.dev.g_final) << ',' << fmt(r.dev.comp_f)
       << ',' << fmt(r.dev.comp_l) << ',' << fmt(r.dev.comp_w) << "\n";
  }
}

void write_study_csv(const std::string& path, const StudyReport& report) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "lambda,N,epsilon,median_gT,iqr_gT\n";
  for (const StudyCell& cell : report.cells) {
    os << fmt_time(cell.lambda_actual) << ',' << cell.batch_size << ','
       << fmt_time(cell.epsilon) << ',' << fmt(cell.median_g) << ','
       << (cell.iqr_defined ? fmt(cell.iqr_g) : std::string("nan")) << "\n";
  }
}

void write_equilibrium_wgrid_csv(const std::string& path, const EquilibriumResult& result) {
  CsvOut out(path);
  auto& os = out.stream();
  os << "type,u,w\n";
  for (size_t i = 0; i < result.profiles.size(); ++i)
    for (size_t k = 0; k < result.profiles[i].size(); ++k)
      os << (i + 1) << ',' << fmt_time(static_cast<double>(k) * result.grid_step) << ','
         << fmt(result.profiles[i][k]) << "\n";
}

void write_oracle_csv(const std::string& path, const TinyInstance& inst,
                      const OracleExpectations& exact, const OracleExpectations& leading) {
  CsvOut out(path);
  auto& os = out.stream();
  const int m = static_cast<int>(inst.delays.size());
  os << "quantity,type_i,type_j,u_ticks,exact,leading_order\n";
  for (int i = 0; i < m; ++i)
    os << "N," << (i + 1) << ",,," << fmt(exact.arrivals[i]) << ','
       << fmt(leading.arrivals[i]) << "\n";
  for (int i = 0; i < m; ++i)
    os << "F," << (i + 1) << ",,," << fmt(exact.free_selected[i]) << ','
       << fmt(leading.free_selected[i]) << "\n";
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      for (size_t u = 0; u < exact.jumps[i][j].size(); ++u) {
        if (exact.jumps[i][j][u] == 0.0 && leading.jumps[i][j][u] == 0.0) continue;
        os << "J," << (i + 1) << ',' << (j + 1) << ',' << u << ','
           << fmt(exact.jumps[i][j][u]) << ',' << fmt(leading.jumps[i][j][u]) << "\n";
      }
}

SeriesData read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open series file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(errc::io_error, "empty series file");
  // locate the tick, L, F columns by header name
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  int tick_col = -1, l_col = -1, f_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "tick") tick_col = static_cast<int>(c);
    if (header[c] == "L") l_col = static_cast<int>(c);
    if (header[c] == "F") f_col = static_cast<int>(c);
  }
  if (tick_col < 0 || l_col < 0 || f_col < 0)
    throw Error(errc::bad_value, "series file lacks tick/L/F columns");
  SeriesData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    data.ticks.push_back(std::stoll(cells[tick_col]));
    data.tips.push_back(std::stoll(cells[l_col]));
    data.free_tips.push_back(std::stoll(cells[f_col]));
  }
  return data;
}

}  // namespace tangle
