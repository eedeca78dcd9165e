#pragma once

// Run orchestration: initial data from a config, evolution, and the output files
// diagnostics.csv, summary.json and snapshot_<k>.csv.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagflow/config.hpp"
#include "lagflow/curve_flow.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/presets.hpp"
#include "lagflow/scalar_flow.hpp"

namespace lagflow {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBlowup = 2;

inline const char* kDiagnosticsHeader =
    "time,volume,dissipation,meanzero_residual,intA2,intDA2,intD2A2,supA,theta_residual,slope_margin,isoperimetric";

/// 17 significant digits; non-finite values become an empty field.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const DiagnosticsRecord& r) {
  return {{"time", json_number(r.time)},
          {"volume", json_number(r.volume)},
          {"dissipation", json_number(r.dissipation)},
          {"meanzero_residual", json_number(r.meanzero_residual)},
          {"intA2", json_number(r.a_norms[0])},
          {"intDA2", json_number(r.a_norms[1])},
          {"intD2A2", json_number(r.a_norms[2])},
          {"supA", json_number(r.sup_A)},
          {"theta_residual", json_number(r.theta_residual)},
          {"slope_margin", json_number(r.slope_margin)},
          {"isoperimetric", json_number(r.isoperimetric)},
          {"signed_area", json_number(r.signed_area)}};
}

/// Scalar rows leave the curve-only column blank, curve rows the scalar-only one.
inline void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records,
                                  RunMode mode) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kDiagnosticsHeader << '\n';
  const bool curve = mode == RunMode::curve;
  for (const auto& r : records) {
    out << format_number(r.time) << ',' << format_number(r.volume) << ',' << format_number(r.dissipation) << ','
        << format_number(r.meanzero_residual) << ',' << format_number(r.a_norms[0]) << ',' << format_number(r.a_norms[1])
        << ',' << format_number(r.a_norms[2]) << ',' << format_number(r.sup_A) << ',' << format_number(r.theta_residual)
        << ',' << (curve ? std::string() : format_number(r.slope_margin)) << ','
        << (curve ? format_number(r.isoperimetric) : std::string()) << '\n';
  }
}

inline void write_snapshot(const std::filesystem::path& path, const PotentialGrid& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (int a = 0; a < g.dim; ++a) out << 'x' << a << ',';
  out << "phi\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto x = g.position(v);
    for (int a = 0; a < g.dim; ++a) out << format_number(x[static_cast<std::size_t>(a)]) << ',';
    out << format_number(g.values[v]) << '\n';
  }
}

inline void write_snapshot(const std::filesystem::path& path, const ClosedCurve& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "x,y\n";
  for (const auto& p : c.points) out << format_number(p.x) << ',' << format_number(p.y) << '\n';
}

inline PotentialGrid make_scalar_initial(const RunConfig& cfg) {
  const auto& in = cfg.init;
  if (in.name == "zero") return PotentialGrid(cfg.dim, cfg.grid_m);
  if (in.name == "sine")
    return presets::sine(cfg.dim, cfg.grid_m,
                         {static_cast<int>(in.get("k", 1)), static_cast<int>(in.get("k2", 0)), static_cast<int>(in.get("k3", 0))},
                         in.get("amp", 1e-6));
  if (in.name == "quadratic") return presets::quadratic(cfg.dim, cfg.grid_m, in.get("c", 0.05));
  if (in.name == "random")
    return presets::band_limited(cfg.dim, cfg.grid_m, in.get("amp", 1e-3), static_cast<int>(in.get("modes", 4)), cfg.seed);
  throw Error("'" + in.name + "' is not a scalar preset");
}

inline ClosedCurve make_curve_initial(const RunConfig& cfg) {
  const auto& in = cfg.init;
  const auto m = static_cast<std::size_t>(cfg.curve_m);
  if (in.name == "circle") return curves::circle(m, in.get("radius", 1.0));
  if (in.name == "perturbed_circle")
    return curves::perturbed_circle(m, in.get("radius", 1.0), in.get("amp", 0.05), static_cast<int>(in.get("wave", 3)));
  if (in.name == "ellipse") return curves::ellipse(m, in.get("a", 2.0), in.get("b", 1.0));
  if (in.name == "figure_eight") return curves::figure_eight(m, in.get("scale", 1.0));
  throw Error("'" + in.name + "' is not a curve preset");
}

inline CurveStepperConfig curve_stepper(const RunConfig& cfg) {
  CurveStepperConfig s;
  s.method = cfg.method;
  s.cfl_sigma = cfg.cfl_sigma;
  s.imex_sigma = cfg.imex_sigma;
  s.splitting_c = cfg.splitting_c;
  s.max_dt = cfg.effective_max_dt();
  s.resample_every = cfg.resample_every;
  s.blowup_threshold = cfg.blowup_threshold.value_or(0.0);
  return s;
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json init_params = nlohmann::json::object();
  for (const auto& [k, v] : cfg.init.params) init_params[k] = v;
  nlohmann::json j = {{"mode", to_string(cfg.mode)},
                      {"t_end", cfg.t_end},
                      {"method", to_string(cfg.method)},
                      {"cfl_sigma", cfg.cfl_sigma},
                      {"splitting_c", cfg.splitting_c},
                      {"max_dt", cfg.effective_max_dt()},
                      {"init", {{"name", cfg.init.name}, {"params", init_params}}},
                      {"seed", cfg.seed},
                      {"output_dir", cfg.output_dir},
                      {"diag_every", cfg.diag_every},
                      {"snapshot_every", cfg.snapshot_every}};
  if (cfg.mode == RunMode::scalar) {
    j["dim"] = cfg.dim;
    j["grid_m"] = cfg.grid_m;
    j["scheme"] = to_string(cfg.scheme);
    j["blowup_threshold"] = cfg.blowup_threshold.value_or(1e3);
  } else {
    j["curve_m"] = cfg.curve_m;
    j["imex_sigma"] = cfg.imex_sigma;
    j["resample_every"] = cfg.resample_every;
    j["blowup_threshold"] = json_number(cfg.blowup_threshold.value_or(kNaN));
  }
  nlohmann::json raw = nlohmann::json::object();
  for (const auto& [k, v] : cfg.raw) raw[k] = v;
  j["as_written"] = raw;
  return j;
}

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;  // completed | blowup | stopped
  std::string message;
  std::filesystem::path output_dir;
  bool blowup = false;
  double blowup_time = kNaN;
  double blowup_sup = kNaN;
  std::size_t steps = 0;
  std::vector<DiagnosticsRecord> records;
};

/// Output directory: explicit override, then LAGFLOW_OUTPUT, then the config key.
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& override_dir) {
  if (override_dir) return *override_dir;
  if (const char* env = std::getenv("LAGFLOW_OUTPUT"); env && *env) return env;
  return cfg.output_dir;
}

/// Runs a scalar or curve configuration and writes its output files.
inline RunOutcome run(const RunConfig& cfg, const std::optional<std::string>& override_dir = std::nullopt) {
  if (cfg.mode == RunMode::check) throw Error("run: mode = check is handled by the check suite runner");
  RunOutcome out;
  out.output_dir = resolve_output_dir(cfg, override_dir);
  std::filesystem::create_directories(out.output_dir);
  std::vector<std::string> snapshots;
  std::size_t next_snapshot = cfg.snapshot_every > 0 ? static_cast<std::size_t>(cfg.snapshot_every) : 0;
  std::size_t snapshot_step = 0;
  auto snapshot_file = [&](const auto& shape, std::size_t step) {
    const std::string name = "snapshot_" + std::to_string(snapshots.size()) + ".csv";
    write_snapshot(out.output_dir / name, shape);
    snapshots.push_back(name);
    snapshot_step = step;
  };
  auto due = [&](std::size_t step) {
    if (next_snapshot == 0 || step < next_snapshot) return false;
    while (next_snapshot <= step) next_snapshot += static_cast<std::size_t>(cfg.snapshot_every);
    return true;
  };
  const auto diag_every = static_cast<std::size_t>(cfg.diag_every);
  double threshold = kNaN;
  try {
    if (cfg.mode == RunMode::scalar) {
      const auto stepper = cfg.scalar_stepper();
      threshold = stepper.blowup_threshold;
      FlowState s0(make_scalar_initial(cfg));
      s0.grid.validate();
      snapshot_file(s0.grid, 0);
      const auto ambient = AmbientModel::flat_model(cfg.dim);
      const auto res = evolve(s0, cfg.t_end, stepper, ambient, [&](const FlowState& s, const DiagnosticsRecord& r) {
        out.records.push_back(r);
        out.steps = s.step_count;
        if (due(s.step_count)) snapshot_file(s.grid, s.step_count);
      }, diag_every);
      out.steps = res.final_state.step_count;
      if (snapshot_step != out.steps) snapshot_file(res.final_state.grid, out.steps);
      out.blowup = res.blowup;
      out.blowup_time = res.blowup_time;
      out.blowup_sup = res.blowup_sup;
    } else {
      const auto stepper = curve_stepper(cfg);
      const auto c0 = make_curve_initial(cfg);
      snapshot_file(c0, 0);
      const auto res = evolve_curve(c0, cfg.t_end, stepper, [&](const CurveState& s, const DiagnosticsRecord& r) {
        out.records.push_back(r);
        out.steps = s.step_count;
        if (due(s.step_count)) snapshot_file(s.curve, s.step_count);
      }, diag_every);
      threshold = res.threshold;
      out.steps = res.final_state.step_count;
      if (snapshot_step != out.steps) snapshot_file(res.final_state.curve, out.steps);
      out.blowup = res.blowup;
      out.blowup_time = res.blowup_time;
      out.blowup_sup = res.blowup_sup;
    }
    out.status = out.blowup ? "blowup" : "completed";
    out.exit_code = out.blowup ? kExitBlowup : kExitOk;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // Slope violation, degenerate curve, singular metric: the flow stops.
    out.status = "stopped";
    out.message = e.what();
    out.exit_code = kExitError;
  }

  write_diagnostics_csv(out.output_dir / "diagnostics.csv", out.records, cfg.mode);
  nlohmann::json summary = {
      {"schema_version", kSchemaVersion},
      {"mode", to_string(cfg.mode)},
      {"status", out.status},
      {"exit_code", out.exit_code},
      {"message", out.message},
      {"steps", out.steps},
      {"blowup", out.blowup},
      {"blowup_time", json_number(out.blowup ? out.blowup_time : kNaN)},
      {"blowup_sup", json_number(out.blowup ? out.blowup_sup : kNaN)},
      {"blowup_threshold", json_number(threshold)},
      {"initial", out.records.empty() ? nlohmann::json(nullptr) : to_json(out.records.front())},
      {"final", out.records.empty() ? nlohmann::json(nullptr) : to_json(out.records.back())},
      {"config", config_echo(cfg)},
      {"files", {{"diagnostics", "diagnostics.csv"}, {"snapshots", snapshots}}},
  };
  std::ofstream js(out.output_dir / "summary.json");
  if (!js) throw Error("cannot write summary.json in " + out.output_dir.string());
  js << summary.dump(2) << '\n';
  return out;
}

}  // namespace lagflow
