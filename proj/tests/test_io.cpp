#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tangle/csv.hpp"
#include "tangle/svg.hpp"

using namespace tangle;

namespace {

namespace fs = std::filesystem;

ModelParams small_params() {
  ModelParams p;
  p.epsilon = 0.1;
  p.batch_size = 10;
  p.delays = {1.0, 2.0};
  p.probs = {0.5, 0.5};
  p.horizon = 2.0;
  return validate_params(p);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / "tangle_io_test";
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("series csv round-trips the count columns") {
  const TempDir tmp;
  const ModelParams p = small_params();
  const RunResult run = run_simulation(p, InitSpec::warmup(), 3);
  const std::string path = tmp / "series.csv";
  write_series_csv(path, run);

  const std::string text = slurp(path);
  CHECK(text.rfind("tick,t,L,F,W,N_1,N_2,F_1,F_2\n", 0) == 0);

  const SeriesData data = read_series_csv(path);
  REQUIRE(data.ticks.size() == run.records.size());
  for (size_t k = 0; k < data.ticks.size(); ++k) {
    CHECK(data.ticks[k] == run.records[k].tick);
    CHECK(data.tips[k] == run.records[k].tips);
    CHECK(data.free_tips[k] == run.records[k].free_tips);
  }
}

TEST_CASE("wgrid and fluid csv headers match their schemas") {
  const TempDir tmp;
  const ModelParams p = small_params();
  const RunResult run = run_simulation(p, InitSpec::warmup(), 3);
  write_wgrid_csv(tmp / "wgrid.csv", run);
  CHECK(slurp(tmp / "wgrid.csv").rfind("tick,type,u_ticks,count\n", 0) == 0);

  const FluidSeries fluid = integrate_fluid(p, FluidInit::constants(1.0, 2.4));
  write_fluid_csv(tmp / "fluid.csv", fluid);
  write_fluid_wgrid_csv(tmp / "fluid_wgrid.csv", fluid);
  CHECK(slurp(tmp / "fluid.csv").rfind("t,f,l,w_total\n", 0) == 0);
  CHECK(slurp(tmp / "fluid_wgrid.csv").rfind("t,type,u,w\n", 0) == 0);
}

TEST_CASE("report csv is byte-identical across repeated runs") {
  const TempDir tmp;
  const ModelParams p = small_params();
  const ComparisonReport a = run_comparison(p, InitSpec::warmup(), 4, 0.1, 11, 1);
  const ComparisonReport b = run_comparison(p, InitSpec::warmup(), 4, 0.1, 11, 3);
  write_report_csv(tmp / "a.csv", a);
  write_report_csv(tmp / "b.csv", b);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(slurp(tmp / "a.csv").rfind("replica,seed,gT,comp_F,comp_L,comp_W\n", 0) == 0);
}

TEST_CASE("svg charts are deterministic and well-formed") {
  const TempDir tmp;
  SvgSeries s;
  s.label = "series";
  s.x = {0.0, 1.0, 2.0, 3.0};
  s.y = {1.0, 3.0, 2.0, 4.0};
  write_line_chart(tmp / "a.svg", "title", "t", "y", {s});
  write_line_chart(tmp / "b.svg", "title", "t", "y", {s});
  const std::string a = slurp(tmp / "a.svg");
  CHECK(a == slurp(tmp / "b.svg"));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
}
