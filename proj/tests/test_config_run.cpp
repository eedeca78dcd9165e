#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagflow/checks.hpp"
#include "lagflow/config.hpp"
#include "lagflow/run.hpp"

using namespace lagflow;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("lagflow_test_" + name);
  fs::remove_all(d);
  return d;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Config, ParsesFullExample) {
  const auto cfg = parse_config(R"(# scalar run
mode = scalar
dim = 2
grid_m = 32          # per axis
t_end = 0.01
method = rk4
scheme = central2
cfl_sigma = 0.2
splitting_c = 2
max_dt = 1e-4
blowup_threshold = 50
init = sine k=1 k2=2 amp=1e-3
seed = 7
output_dir = out/a
diag_every = 3
snapshot_every = 5
)");
  EXPECT_EQ(cfg.mode, RunMode::scalar);
  EXPECT_EQ(cfg.dim, 2);
  EXPECT_EQ(cfg.grid_m, 32);
  EXPECT_EQ(cfg.t_end, 0.01);
  EXPECT_EQ(cfg.method, StepMethod::rk4_explicit);
  EXPECT_EQ(cfg.scheme, Scheme::central2);
  EXPECT_EQ(cfg.effective_max_dt(), 1e-4);
  EXPECT_EQ(cfg.init.name, "sine");
  EXPECT_EQ(cfg.init.get("k2", 0), 2.0);
  EXPECT_EQ(cfg.init.get("amp", 0), 1e-3);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.output_dir, "out/a");
  EXPECT_EQ(cfg.scalar_stepper().blowup_threshold, 50.0);
}

TEST(Config, Defaults) {
  const auto s = parse_config("mode = scalar\nt_end = 1\n");
  EXPECT_EQ(s.init.name, "zero");
  EXPECT_EQ(s.seed, 0u);
  EXPECT_EQ(s.effective_max_dt(), 1e-3);
  const auto c = parse_config("mode = curve\nt_end = 1\n");
  EXPECT_EQ(c.init.name, "circle");
  EXPECT_EQ(c.effective_max_dt(), 1e-5);
}

TEST(Config, UnknownKeyNamesLine) {
  const auto msg = parse_error("moed = scalar\nt_end = 1\n");
  EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("moed"), std::string::npos) << msg;
  EXPECT_NE(parse_error("mode = scalar\n\n# c\nt_end = 1\nfoo = 2\n").find("line 5"), std::string::npos);
}

TEST(Config, Rejections) {
  EXPECT_NE(parse_error("t_end = 1\n").find("missing required key 'mode'"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\n").find("t_end"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = -1\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\nt_end = 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = abc\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ngrid_m = 3.5\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = blob\nt_end = 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\nmethod = euler\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ninit = blob\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ninit = sine q=1\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ninit = circle\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\nseed = -3\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ndim = 4\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end = 1\ngarbage\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("mode = scalar\nt_end =\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("mode = check\n").find("suite"), std::string::npos);
  EXPECT_EQ(parse_error("mode = check\nsuite = theta\n"), "");
}

TEST(Output, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(kNaN), "");
  EXPECT_EQ(std::stod(format_number(std::acos(-1.0))), std::acos(-1.0));
}

TEST(Run, ScalarFiles) {
  const auto dir = fresh_dir("scalar");
  auto cfg = parse_config("mode = scalar\ndim = 2\ngrid_m = 16\nt_end = 0.005\ninit = random amp=0.002 modes=3\n"
                          "seed = 4\ndiag_every = 2\nsnapshot_every = 2\n");
  const auto out = run(cfg, dir.string());
  EXPECT_EQ(out.exit_code, kExitOk);
  const auto csv = lines_of(dir / "diagnostics.csv");
  ASSERT_GE(csv.size(), 3u);
  EXPECT_EQ(csv[0], kDiagnosticsHeader);
  EXPECT_EQ(csv.size() - 1, out.records.size());
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto cells = split(csv[i]);
    ASSERT_EQ(cells.size(), 11u) << csv[i];
    EXPECT_EQ(cells[10], "");  // isoperimetric is curve only
    EXPECT_NE(cells[9], "");
    EXPECT_NE(cells[8], "");
  }
  const auto js = read_json(dir / "summary.json");
  EXPECT_EQ(js["schema_version"], 1);
  EXPECT_EQ(js["blowup"], false);
  EXPECT_EQ(js["exit_code"], 0);
  EXPECT_EQ(js["config"]["seed"], 4);
  EXPECT_EQ(js["final"]["volume"].get<double>(), out.records.back().volume);
  const auto snaps = js["files"]["snapshots"];
  // 5 steps, records every 2: snapshots at steps 0, 2, 4 and the final step 5
  ASSERT_EQ(snaps.size(), 4u);
  for (const auto& s : snaps) EXPECT_TRUE(fs::exists(dir / s.get<std::string>()));
  const auto snap = lines_of(dir / "snapshot_0.csv");
  EXPECT_EQ(snap[0], "x0,x1,phi");
  EXPECT_EQ(snap.size(), 1u + 16u * 16u);
}

TEST(Run, CircleStationary) {
  const auto dir = fresh_dir("circle");
  const auto out = run(parse_config("mode = curve\ncurve_m = 64\nt_end = 0.5\nmax_dt = 1e-3\ndiag_every = 50\n"), dir.string());
  EXPECT_EQ(out.exit_code, kExitOk);
  const auto& a = out.records.front();
  for (const auto& r : out.records) {
    EXPECT_NEAR(r.volume, a.volume, 1e-10);
    EXPECT_NEAR(r.signed_area, a.signed_area, 1e-10);
    EXPECT_NEAR(r.isoperimetric, a.isoperimetric, 1e-10);
    EXPECT_LE(r.dissipation, 1e-16);
  }
  const auto csv = lines_of(dir / "diagnostics.csv");
  const auto cells = split(csv[1]);
  ASSERT_EQ(cells.size(), 11u);
  EXPECT_EQ(cells[9], "");  // slope margin is scalar only
  EXPECT_NE(cells[10], "");
  EXPECT_EQ(lines_of(dir / "snapshot_0.csv")[0], "x,y");
  // final step coincides with a cadence point: no duplicate final snapshot
  const auto snaps_dir = fresh_dir("circle_snaps");
  const auto again = run(parse_config("mode = curve\ncurve_m = 32\nt_end = 0.005\nmax_dt = 5e-4\ndiag_every = 1\n"
                                      "snapshot_every = 5\n"),
                         snaps_dir.string());
  EXPECT_EQ(again.steps, 10u);
  EXPECT_EQ(read_json(snaps_dir / "summary.json")["files"]["snapshots"].size(), 3u);
}

TEST(Run, FigureEightBlowsUp) {
  const auto dir = fresh_dir("eight");
  const auto out = run(parse_config("mode = curve\ninit = figure_eight\ncurve_m = 64\nt_end = 1\nmax_dt = 1e-4\n"
                                    "blowup_threshold = 200\ndiag_every = 100\n"),
                       dir.string());
  EXPECT_EQ(out.exit_code, kExitBlowup);
  const auto js = read_json(dir / "summary.json");
  EXPECT_EQ(js["blowup"], true);
  EXPECT_GT(js["blowup_time"].get<double>(), 0.0);
  EXPECT_GT(js["blowup_sup"].get<double>(), 200.0);
  EXPECT_EQ(js["status"], "blowup");
}

TEST(Run, SlopeViolationIsValidationError) {
  const auto dir = fresh_dir("slope");
  const auto out = run(parse_config("mode = scalar\ngrid_m = 16\nt_end = 0.01\ninit = sine amp=0.5\n"), dir.string());
  EXPECT_EQ(out.exit_code, kExitError);
  EXPECT_EQ(out.status, "stopped");
  EXPECT_NE(out.message.find("slope"), std::string::npos) << out.message;
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Run, OutputEnvironmentOverride) {
  const auto dir = fresh_dir("env");
  ::setenv("LAGFLOW_OUTPUT", dir.c_str(), 1);
  const auto cfg = parse_config("mode = scalar\ngrid_m = 8\nt_end = 0.001\noutput_dir = should_not_exist\n");
  const auto out = run(cfg);
  ::unsetenv("LAGFLOW_OUTPUT");
  EXPECT_EQ(out.output_dir, dir);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_FALSE(fs::exists("should_not_exist"));
}

TEST(Run, DeterministicForSeed) {
  const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  const std::string text = "mode = scalar\ngrid_m = 16\nt_end = 0.002\ninit = random amp=0.005\nseed = 11\n";
  run(parse_config(text), a.string());
  run(parse_config(text), b.string());
  EXPECT_EQ(lines_of(a / "diagnostics.csv"), lines_of(b / "diagnostics.csv"));
  EXPECT_EQ(lines_of(a / "snapshot_1.csv"), lines_of(b / "snapshot_1.csv"));
}

TEST(Checks, UnknownSuite) { EXPECT_THROW(check_suite("nope"), Error); }

TEST(Checks, FastSuitePasses) {
  for (const std::string s : {"symbol", "meanzero", "graph_radius"}) {
    const auto res = check_suite(s);
    ASSERT_EQ(res.size(), 1u);
    EXPECT_TRUE(res[0].pass) << format_result(res[0]);
  }
}
