#pragma once

// Run configuration: `key = value` lines, `#` comments, unknown keys rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lagflow/differentiation.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/scalar_flow.hpp"

namespace lagflow {

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class RunMode { scalar, curve, check };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::scalar: return "scalar";
    case RunMode::curve: return "curve";
    case RunMode::check: return "check";
  }
  return "?";
}

/// Initial-data preset: a name plus `key=value` parameters.
struct InitSpec {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

struct PresetInfo {
  std::string name;
  RunMode mode;
  std::vector<std::string> params;
  std::string help;
};

inline const std::vector<PresetInfo>& preset_table() {
  static const std::vector<PresetInfo> table = {
      {"zero", RunMode::scalar, {}, "phi = 0 (the zero section)"},
      {"sine", RunMode::scalar, {"k", "k2", "k3", "amp"}, "amp * sin(k x0 + k2 x1 + k3 x2); defaults k=1 amp=1e-6"},
      {"quadratic", RunMode::scalar, {"c"}, "phi = c |x|^2 / 2 (constant Hessian c I); default c=0.05"},
      {"random", RunMode::scalar, {"amp", "modes"}, "seeded band-limited field, max |phi| = amp; defaults amp=1e-3 modes=4"},
      {"circle", RunMode::curve, {"radius"}, "circle; default radius=1"},
      {"perturbed_circle", RunMode::curve, {"radius", "amp", "wave"}, "r = radius + amp cos(wave t); defaults 1, 0.05, 3"},
      {"ellipse", RunMode::curve, {"a", "b"}, "ellipse with semi-axes a, b; defaults 2, 1"},
      {"figure_eight", RunMode::curve, {"scale"}, "lemniscate of Bernoulli, half-width scale; default 1"},
  };
  return table;
}

struct RunConfig {
  RunMode mode = RunMode::scalar;
  int dim = 1;
  int grid_m = 64;
  int curve_m = 256;
  double t_end = 0.0;
  StepMethod method = StepMethod::imex_spectral;
  Scheme scheme = Scheme::spectral;
  double cfl_sigma = 0.1;
  double splitting_c = 1.0;
  std::optional<double> max_dt;  // mode default when unset
  double imex_sigma = 1e-3;
  std::optional<double> blowup_threshold;
  int resample_every = 5;
  InitSpec init{"zero", {}};
  std::uint64_t seed = 0;
  std::string output_dir = "lagflow_out";
  int diag_every = 10;
  int snapshot_every = 0;  // 0: first and final only; otherwise at the first record on or after each multiple
  std::string suite;
  std::map<std::string, std::string> raw;  // key -> value as written

  double effective_max_dt() const { return max_dt.value_or(mode == RunMode::curve ? 1e-5 : 1e-3); }

  StepperConfig scalar_stepper() const {
    StepperConfig s;
    s.method = method;
    s.scheme = scheme;
    s.cfl_sigma = cfl_sigma;
    s.splitting_c = splitting_c;
    s.max_dt = effective_max_dt();
    s.blowup_threshold = blowup_threshold.value_or(1e3);
    return s;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(line, "key '" + key + "' expects a real number, got '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& v, int line, const std::string& key) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(line, "key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline InitSpec parse_init(const std::string& v, int line) {
  std::istringstream in(v);
  InitSpec spec;
  in >> spec.name;
  const PresetInfo* info = nullptr;
  for (const auto& p : preset_table())
    if (p.name == spec.name) info = &p;
  if (!info) throw ConfigError(line, "unknown init preset '" + spec.name + "'");
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "init parameter '" + tok + "' is not key=value");
    const std::string k = tok.substr(0, eq);
    if (std::find(info->params.begin(), info->params.end(), k) == info->params.end())
      throw ConfigError(line, "preset '" + spec.name + "' has no parameter '" + k + "'");
    spec.params[k] = parse_real(tok.substr(eq + 1), line, "init " + k);
  }
  return spec;
}

}  // namespace detail

inline const PresetInfo& preset_info(const std::string& name) {
  for (const auto& p : preset_table())
    if (p.name == name) return p;
  throw Error("unknown preset '" + name + "'");
}

/// Parses and validates a configuration text. Errors name the offending line.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const auto hash = raw_line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? raw_line : raw_line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + body + "'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string val = detail::trim(body.substr(eq + 1));
    if (seen.count(key)) throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    if (val.empty()) throw ConfigError(line, "key '" + key + "' has an empty value");
    auto real = [&] { return detail::parse_real(val, line, key); };
    auto integer = [&] { return detail::parse_int(val, line, key); };
    try {
      if (key == "mode") {
        if (val == "scalar") cfg.mode = RunMode::scalar;
        else if (val == "curve") cfg.mode = RunMode::curve;
        else if (val == "check") cfg.mode = RunMode::check;
        else throw ConfigError(line, "mode must be scalar, curve or check, got '" + val + "'");
      } else if (key == "dim") cfg.dim = static_cast<int>(integer());
      else if (key == "grid_m") cfg.grid_m = static_cast<int>(integer());
      else if (key == "curve_m") cfg.curve_m = static_cast<int>(integer());
      else if (key == "t_end") cfg.t_end = real();
      else if (key == "method") cfg.method = step_method_from_string(val);
      else if (key == "scheme") cfg.scheme = scheme_from_string(val);
      else if (key == "cfl_sigma") cfg.cfl_sigma = real();
      else if (key == "splitting_c") cfg.splitting_c = real();
      else if (key == "max_dt") cfg.max_dt = real();
      else if (key == "imex_sigma") cfg.imex_sigma = real();
      else if (key == "blowup_threshold") cfg.blowup_threshold = real();
      else if (key == "resample_every") cfg.resample_every = static_cast<int>(integer());
      else if (key == "init") cfg.init = detail::parse_init(val, line);
      else if (key == "seed") {
        const auto s = integer();
        if (s < 0) throw ConfigError(line, "seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
      } else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "diag_every") cfg.diag_every = static_cast<int>(integer());
      else if (key == "snapshot_every") cfg.snapshot_every = static_cast<int>(integer());
      else if (key == "suite") cfg.suite = val;
      else throw ConfigError(line, "unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, e.what());
    }
    seen[key] = line;
    cfg.raw[key] = val;
  }

  auto line_of = [&](const std::string& k) { return seen.count(k) ? seen[k] : 0; };
  if (!seen.count("mode")) throw ConfigError(0, "missing required key 'mode'");
  if (cfg.mode == RunMode::check) {
    if (cfg.suite.empty()) throw ConfigError(line_of("mode"), "mode = check needs a 'suite' key");
    return cfg;
  }
  if (!(cfg.t_end > 0.0)) throw ConfigError(line_of("t_end"), "t_end must be given and positive");
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError(line_of("dim"), "dim must be 1, 2 or 3");
  if (cfg.grid_m < 8) throw ConfigError(line_of("grid_m"), "grid_m must be at least 8");
  if (cfg.curve_m < 16) throw ConfigError(line_of("curve_m"), "curve_m must be at least 16");
  if (!(cfg.cfl_sigma > 0.0 && cfg.cfl_sigma <= 1.0)) throw ConfigError(line_of("cfl_sigma"), "cfl_sigma must lie in (0, 1]");
  if (!(cfg.splitting_c >= 1.0)) throw ConfigError(line_of("splitting_c"), "splitting_c must be >= 1");
  if (cfg.max_dt && !(*cfg.max_dt > 0.0)) throw ConfigError(line_of("max_dt"), "max_dt must be positive");
  if (!(cfg.imex_sigma > 0.0)) throw ConfigError(line_of("imex_sigma"), "imex_sigma must be positive");
  if (cfg.blowup_threshold && !(*cfg.blowup_threshold > 0.0))
    throw ConfigError(line_of("blowup_threshold"), "blowup_threshold must be positive");
  if (cfg.resample_every < 0) throw ConfigError(line_of("resample_every"), "resample_every must be >= 0");
  if (cfg.diag_every < 1) throw ConfigError(line_of("diag_every"), "diag_every must be >= 1");
  if (cfg.snapshot_every < 0) throw ConfigError(line_of("snapshot_every"), "snapshot_every must be >= 0");
  if (!seen.count("init")) cfg.init = InitSpec{cfg.mode == RunMode::curve ? "circle" : "zero", {}};
  if (preset_info(cfg.init.name).mode != cfg.mode)
    throw ConfigError(line_of("init"), "preset '" + cfg.init.name + "' is not a " + to_string(cfg.mode) + " preset");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace lagflow
