// lagflow command line: run a configuration, run a property suite, list presets.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagflow/checks.hpp"
#include "lagflow/config.hpp"
#include "lagflow/run.hpp"

namespace {

int run_checks(const std::string& suite, const std::string& json_path) {
  std::vector<lagflow::CheckResult> results;
  try {
    results = lagflow::check_suite(suite, [](const lagflow::CheckResult& r) {
      std::cout << lagflow::format_result(r) << '\n';
      for (const auto& line : r.info) std::cout << "      " << line << '\n';
      std::cout.flush();
    });
  } catch (const lagflow::Error& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return lagflow::kExitError;
  }
  std::size_t passed = 0;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    report.push_back(lagflow::to_json(r));
  }
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << nlohmann::json{{"suite", suite}, {"results", report}}.dump(2) << '\n';
  }
  return passed == results.size() ? lagflow::kExitOk : lagflow::kExitError;
}

int run_config(const std::string& path) {
  lagflow::RunConfig cfg;
  try {
    cfg = lagflow::load_config(path);
  } catch (const lagflow::ConfigError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return lagflow::kExitError;
  }
  if (cfg.mode == lagflow::RunMode::check) return run_checks(cfg.suite, "");
  try {
    const auto out = lagflow::run(cfg);
    const auto& last = out.records.empty() ? lagflow::DiagnosticsRecord{} : out.records.back();
    std::cout << "status " << out.status << ", " << out.steps << " steps, t = " << lagflow::format_number(last.time)
              << ", output in " << out.output_dir.string() << '\n';
    if (out.blowup)
      std::cout << "blow-up at t = " << lagflow::format_number(out.blowup_time)
                << ", sup|A| = " << lagflow::format_number(out.blowup_sup) << '\n';
    if (!out.message.empty()) std::cerr << "lagflow: " << out.message << '\n';
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return lagflow::kExitError;
  }
}

void list_presets() {
  for (const auto& p : lagflow::preset_table()) {
    std::printf("%-17s %-7s", p.name.c_str(), lagflow::to_string(p.mode).c_str());
    std::string params;
    for (const auto& k : p.params) params += (params.empty() ? "" : " ") + k;
    std::printf("%-20s %s\n", params.empty() ? "-" : params.c_str(), p.help.c_str());
  }
  std::printf("\nsuites:");
  for (const auto& s : lagflow::suite_names()) std::printf(" %s", s.c_str());
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-gradient flow of Lagrangian graphs and plane curves"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Evolve the configuration and write diagnostics.csv, summary.json, snapshots");
  run_cmd->add_option("config", config_path, "Configuration file (key = value)")->required();

  std::string suite, json_path;
  auto* check_cmd = app.add_subcommand("check", "Run a property suite and print one line per criterion");
  check_cmd->add_option("suite", suite, "Suite name, or 'all'")->required();
  check_cmd->add_option("--json", json_path, "Also write the report as JSON");

  app.add_subcommand("presets", "List initial-data presets and suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lagflow::kExitError;
  }
  if (run_cmd->parsed()) return run_config(config_path);
  if (check_cmd->parsed()) return run_checks(suite, json_path);
  list_presets();
  return 0;
}
