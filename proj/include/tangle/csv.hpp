#pragma once

#include <string>
#include <vector>

#include "tangle/compare.hpp"
#include "tangle/equilibrium.hpp"
#include "tangle/fluid.hpp"
#include "tangle/oracle.hpp"
#include "tangle/sim.hpp"

namespace tangle {

// CSV schemas are part of the tool contract: exact column order as named,
// one header row, '\n' line endings, doubles emitted with round-trip
// precision where a consumer may read them back.

void write_series_csv(const std::string& path, const RunResult& run);
void write_wgrid_csv(const std::string& path, const RunResult& run);
void write_fluid_csv(const std::string& path, const FluidSeries& series);
void write_fluid_wgrid_csv(const std::string& path, const FluidSeries& series);
void write_report_csv(const std::string& path, const ComparisonReport& report);
void write_study_csv(const std::string& path, const StudyReport& report);
void write_equilibrium_wgrid_csv(const std::string& path, const EquilibriumResult& result);

/// Oracle table (exact vs leading order), written to an arbitrary stream
/// path ("-" = stdout).
void write_oracle_csv(const std::string& path, const TinyInstance& inst,
                      const OracleExpectations& exact, const OracleExpectations& leading);

/// Count series read back from series.csv (tick, L, F columns).
struct SeriesData {
  std::vector<std::int64_t> ticks;
  std::vector<std::int64_t> tips;
  std::vector<std::int64_t> free_tips;
};
SeriesData read_series_csv(const std::string& path);

}  // namespace tangle
