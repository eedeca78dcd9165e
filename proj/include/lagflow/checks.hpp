#pragma once

// Named property suites. Each criterion reports its measured quantities against fixed
// thresholds plus its wall time against a budget.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagflow/config.hpp"
#include "lagflow/curve_flow.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/presets.hpp"
#include "lagflow/run.hpp"
#include "lagflow/scalar_flow.hpp"

namespace lagflow {

struct Measure {
  std::string label;
  double value = kNaN;
  std::string op;  // "<=", ">=" or "=="
  double threshold = 0.0;
  bool pass = false;
};

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<Measure> measures;
  std::vector<std::string> info;  // reported, not gated
  double seconds = 0.0;
  double time_limit = 0.0;
  bool pass = false;
  std::string note;
};

namespace detail {

inline CheckResult started(int id, std::string name) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

inline Measure at_most(std::string label, double value, double limit) {
  return {std::move(label), value, "<=", limit, value <= limit};
}

inline Measure equals(std::string label, double value, double target) {
  return {std::move(label), value, "==", target, value == target};
}

inline Measure at_least(std::string label, double value, double limit) {
  return {std::move(label), value, ">=", limit, value >= limit};
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double sine_coefficient(const PotentialGrid& g, int k) {
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double s = std::sin(k * g.position(v)[0]);
    num += g.values[v] * s;
    den += s * s;
  }
  return num / den;
}

}  // namespace detail

/// Holds the m = 512 perturbed-circle run shared by the conservation, convergence and
/// Gronwall criteria, so a full suite computes it once.
class CheckContext {
 public:
  struct SharedRun {
    CurveEvolveResult result;  // every step recorded
    double seconds = 0.0;
  };

  static ClosedCurve perturbed_initial() { return curves::perturbed_circle(512, 1.0, 0.05, 3); }

  static CurveStepperConfig perturbed_stepper() {
    CurveStepperConfig cfg;
    cfg.max_dt = 1e-5;
    return cfg;
  }

  const SharedRun& perturbed_run() {
    if (!shared_) {
      const auto t0 = std::chrono::steady_clock::now();
      SharedRun s;
      s.result = evolve_curve(perturbed_initial(), 0.5, perturbed_stepper(), {}, 1);
      s.seconds = detail::seconds_since(t0);
      shared_ = std::move(s);
    }
    return *shared_;
  }

  std::filesystem::path scratch_dir(const std::string& leaf) const {
    if (const char* env = std::getenv("LAGFLOW_OUTPUT"); env && *env) return std::filesystem::path(env) / leaf;
    return std::filesystem::temp_directory_path() / ("lagflow_check_" + leaf);
  }

 private:
  std::optional<SharedRun> shared_;
};

namespace checks {

inline CheckResult stationarity(CheckContext&) {
  auto r = detail::started(1, "stationarity");
  // Circle: velocity the integrator applies over one step, and the raw -kappa_ss.
  const auto c = curves::circle(256, 1.0);
  CurveStepperConfig cfg;
  const double dt = 1e-5;
  const auto next = step_curve(CurveState{c, 0, 0.0}, cfg, dt);
  double step_v = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) step_v = std::max(step_v, norm(next.curve.points[j] - c.points[j]) / dt);
  r.measures.push_back(detail::at_most("circle m=256 max|step velocity|", step_v, 1e-10));
  r.info.push_back("circle m=256 max|kappa_ss| evaluated directly = " +
                   detail::fmt(max_abs(curve_velocity(curve_geometry(c)))) + " (roundoff of a 4th derivative)");
  for (int n : {1, 2}) {
    const auto v = rhs(presets::quadratic(n, 64, 0.05), AmbientModel::flat_model(n), Scheme::spectral);
    r.measures.push_back(detail::at_most("quadratic n=" + std::to_string(n) + " m=64 max|div JH|", max_abs(v), 1e-10));
  }
  return r;
}

inline CheckResult decay(CheckContext&) {
  auto r = detail::started(2, "decay");
  StepperConfig cfg;
  cfg.max_dt = 1e-4;
  const auto flat = AmbientModel::flat_model(1);
  for (int k : {1, 2}) {
    const double amp = 1e-6;
    const auto res = evolve(FlowState(presets::sine(1, 32, {k, 0, 0}, amp)), 0.1, cfg, flat, {}, 100000);
    const double expect = std::exp(-0.1 * k * k * k * k);
    const double rel = std::abs(detail::sine_coefficient(res.final_state.grid, k) / amp - expect) / expect;
    r.measures.push_back(detail::at_most("k=" + std::to_string(k) + " relative amplitude error", rel, k == 1 ? 1e-3 : 1e-2));
  }
  return r;
}

inline CheckResult symbol(CheckContext&) {
  auto r = detail::started(3, "symbol");
  const std::vector<std::pair<int, std::array<int, 3>>> cases = {{1, {1, 0, 0}}, {1, {2, 0, 0}}, {2, {1, 1, 0}}};
  for (const auto& [n, k] : cases) {
    const FlowState s(PotentialGrid(n, 128));
    const double k2 = double(k[0] * k[0] + k[1] * k[1]);
    const double got = symbol_probe(s, k, 1e-6, AmbientModel::flat_model(n));
    const double rel = std::abs(got + k2 * k2) / (k2 * k2);
    r.measures.push_back(detail::at_most("n=" + std::to_string(n) + " k=(" + std::to_string(k[0]) + "," +
                                             std::to_string(k[1]) + ") relative error vs -|k|^4",
                                         rel, 0.02));
  }
  return r;
}

inline CheckResult theta(CheckContext&) {
  auto r = detail::started(4, "theta");
  auto residual = [](int n, int m) {
    const auto flat = AmbientModel::flat_model(n);
    return theta_pointwise_residual(graph_geometry(presets::band_limited(n, m, 0.01, 3, 1), flat, Scheme::central2), flat);
  };
  const double a = residual(1, 64), b = residual(1, 128), c = residual(1, 256);
  r.measures.push_back(detail::at_least("n=1 order m=64->128", std::log2(a / b), 1.9));
  r.measures.push_back(detail::at_least("n=1 order m=128->256", std::log2(b / c), 1.9));
  const double d = residual(2, 32), e = residual(2, 64);
  r.measures.push_back(detail::at_least("n=2 order m=32->64", std::log2(d / e), 1.9));
  r.info.push_back("residuals n=1: " + detail::fmt(a) + ", " + detail::fmt(b) + ", " + detail::fmt(c) +
                   "; n=2: " + detail::fmt(d) + ", " + detail::fmt(e));
  return r;
}

inline CheckResult dissipation(CheckContext&) {
  auto r = detail::started(5, "dissipation");
  std::vector<double> curve_res, scalar_res;
  for (int lvl = 0; lvl < 3; ++lvl) {
    CurveStepperConfig cfg;
    cfg.max_dt = 1.6e-4 / std::pow(16.0, lvl);
    cfg.imex_sigma = 1e9;  // fixed dt per level
    cfg.resample_every = 0;
    const auto res = evolve_curve(curves::perturbed_circle(32u << lvl, 1.0, 0.05, 3), 0.01, cfg, {}, 1);
    curve_res.push_back(max_abs(dissipation_check(res.records)));
  }
  for (int lvl = 0; lvl < 3; ++lvl) {
    StepperConfig cfg;
    cfg.max_dt = 1e-3 / std::pow(16.0, lvl);
    const auto res = evolve(FlowState(presets::sine(1, 16 << lvl, {1, 0, 0}, 0.05)), 0.05, cfg, AmbientModel::flat_model(1), {}, 1);
    scalar_res.push_back(max_abs(dissipation_check(res.records)));
  }
  for (int i = 0; i < 2; ++i) {
    r.measures.push_back(detail::at_least("curve refinement " + std::to_string(i + 1) + " residual ratio",
                                          curve_res[i] / curve_res[i + 1], 3.5));
    r.measures.push_back(detail::at_least("scalar refinement " + std::to_string(i + 1) + " residual ratio",
                                          scalar_res[i] / scalar_res[i + 1], 3.5));
  }
  r.info.push_back("curve residuals " + detail::fmt(curve_res[0]) + ", " + detail::fmt(curve_res[1]) + ", " +
                   detail::fmt(curve_res[2]) + "; scalar residuals " + detail::fmt(scalar_res[0]) + ", " +
                   detail::fmt(scalar_res[1]) + ", " + detail::fmt(scalar_res[2]));
  return r;
}

inline CheckResult conservation(CheckContext& ctx) {
  auto r = detail::started(6, "conservation");
  const auto& run = ctx.perturbed_run();
  const auto& recs = run.result.records;
  const double a0 = recs.front().signed_area;
  double drift = 0.0, worst_increase = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    drift = std::max(drift, std::abs(recs[i].signed_area - a0) / std::abs(a0));
    if (i > 0) worst_increase = std::max(worst_increase, recs[i].volume - recs[i - 1].volume);
  }
  r.measures.push_back(detail::at_most("max relative area drift to t=0.5", drift, 1e-5));
  r.measures.push_back(detail::at_most("largest per-step length increase", worst_increase, 1e-9));
  r.info.push_back(std::to_string(run.result.final_state.step_count) + " steps, shared run " + detail::fmt(run.seconds) + " s");
  r.seconds = run.seconds;
  return r;
}

inline CheckResult convergence(CheckContext& ctx) {
  auto r = detail::started(7, "convergence");
  const auto& run = ctx.perturbed_run();
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = evolve_curve(run.result.final_state.curve, 5.0, CheckContext::perturbed_stepper(), {}, 1000);
  const auto geom = curve_geometry(res.final_state.curve);
  double mn = geom.kappa[0], mx = geom.kappa[0], mean = 0.0;
  for (double k : geom.kappa) {
    mn = std::min(mn, k);
    mx = std::max(mx, k);
    mean += k / static_cast<double>(geom.kappa.size());
  }
  r.measures.push_back(detail::at_most("isoperimetric ratio - 1 at t=5", res.records.back().isoperimetric - 1.0, 1e-4));
  r.measures.push_back(detail::at_most("kappa spread (max-min)/mean at t=5", (mx - mn) / mean, 1e-3));
  r.seconds = run.seconds + detail::seconds_since(t0);
  return r;
}

inline CheckResult blowup(CheckContext& ctx) {
  auto r = detail::started(8, "blowup");
  const auto cfg = parse_config(
      "mode = curve\ninit = figure_eight\ncurve_m = 128\nt_end = 1\nmax_dt = 1e-4\ndiag_every = 100\n");
  const auto dir = ctx.scratch_dir("blowup");
  const auto out = run(cfg, dir.string());
  r.measures.push_back(detail::equals("exit code", out.exit_code, kExitBlowup));
  r.measures.push_back(detail::at_least("blowup_time", out.blowup ? out.blowup_time : 0.0, 1e-300));
  r.info.push_back("blow-up at t = " + detail::fmt(out.blowup_time) + " with sup|kappa| = " + detail::fmt(out.blowup_sup) +
                   "; files in " + dir.string());
  return r;
}

inline CheckResult meanzero(CheckContext&) {
  auto r = detail::started(9, "meanzero");
  struct Case {
    std::string label;
    PotentialGrid grid;
  };
  const std::vector<Case> cases = {{"sine n=1 m=64", presets::sine(1, 64, {1, 0, 0}, 0.05)},
                                   {"random n=1 m=64", presets::band_limited(1, 64, 0.01, 4, 7)},
                                   {"random n=2 m=32", presets::band_limited(2, 32, 0.002, 4, 7)},
                                   {"sine n=2 m=32", presets::sine(2, 32, {1, 2, 0}, 0.005)}};
  for (const auto& c : cases) {
    const auto s = snapshot(c.grid, AmbientModel::flat_model(c.grid.dim), Scheme::spectral);
    r.measures.push_back(detail::at_most(c.label + " |int div JH| / int |div JH|",
                                         std::abs(s.meanzero_residual) / s.meanzero_abs, 1e-6));
  }
  return r;
}

inline CheckResult invariance(CheckContext&) {
  auto r = detail::started(10, "invariance");
  const double ang = 0.7;
  const Point2 shift{0.3, -1.2};
  auto move = [&](Point2 p) {
    return Point2{std::cos(ang) * p.x - std::sin(ang) * p.y, std::sin(ang) * p.x + std::cos(ang) * p.y} + shift;
  };
  const auto c0 = curves::perturbed_circle(128, 1.0, 0.05, 3);
  ClosedCurve c1 = c0;
  for (auto& p : c1.points) p = move(p);
  CurveStepperConfig cfg;
  cfg.max_dt = 1e-5;
  const auto a = evolve_curve(c0, 0.2, cfg, {}, 100000).final_state.curve;
  const auto b = evolve_curve(c1, 0.2, cfg, {}, 100000).final_state.curve;
  // Node 0 anchors every resampling, so node indices stay aligned.
  double err = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) err = std::max(err, norm(move(a.points[j]) - b.points[j]));
  r.measures.push_back(detail::at_most("max node distance after rotation + translation", err, 1e-8));
  return r;
}

inline CheckResult graph_radius(CheckContext&) {
  auto r = detail::started(11, "graph_radius");
  struct Shape {
    std::string label;
    ClosedCurve curve;
  };
  const std::vector<Shape> shapes = {{"circle R=0.5", curves::circle(512, 0.5)},
                                     {"circle R=1", curves::circle(512, 1.0)},
                                     {"circle R=2", curves::circle(512, 2.0)},
                                     {"ellipse a=2 b=1", curves::ellipse(512, 2.0, 1.0)}};
  // c = min over shapes and nodes of r (K + 1), K = sup|kappa| of the shape.
  double c = std::numeric_limits<double>::infinity(), c_circles = c, worst_ellipse = c;
  std::vector<std::pair<std::vector<double>, double>> per_shape;
  for (const auto& s : shapes) {
    const auto geom = curve_geometry(s.curve);
    double K = 0.0;
    for (double k : geom.kappa) K = std::max(K, std::abs(k));
    std::vector<double> radii(s.curve.size());
    for (std::size_t j = 0; j < s.curve.size(); ++j) radii[j] = graph_radius_estimate(s.curve, geom, j);
    double cs = std::numeric_limits<double>::infinity();
    for (double x : radii) cs = std::min(cs, x * (K + 1.0));
    c = std::min(c, cs);
    if (s.label.rfind("circle", 0) == 0) c_circles = std::min(c_circles, cs);
    else worst_ellipse = cs;
    r.info.push_back(s.label + ": min r (K+1) = " + detail::fmt(cs) + ", K = " + detail::fmt(K));
  }
  r.measures.push_back(detail::at_least("fitted c over the family", c, 1e-12));
  // The constant fitted on circles alone must already cover the ellipse.
  r.measures.push_back(detail::at_least("ellipse min r (K+1) / circle-only c", worst_ellipse / c_circles, 1.0));
  return r;
}

inline CheckResult gronwall(CheckContext& ctx) {
  auto r = detail::started(12, "gronwall");
  const auto& run = ctx.perturbed_run();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<DiagnosticsRecord> window;
  const auto& recs = run.result.records;
  for (std::size_t i = 0; i < recs.size(); i += 100) window.push_back(recs[i]);
  if (window.back().time != recs.back().time) window.push_back(recs.back());
  const auto rep = gronwall_monitor(window, 2, 10.0);
  r.measures.push_back(detail::at_most("worst excess / (10 C rhs) in the check window", rep.worst_ratio, 1.0));
  r.measures.push_back({"monitor status is pass", rep.status == GronwallReport::Status::pass ? 1.0 : 0.0, ">=", 1.0,
                        rep.status == GronwallReport::Status::pass});
  r.info.push_back("status " + to_string(rep.status) + ", fitted C = " + detail::fmt(rep.C) + ", " +
                   std::to_string(window.size()) + " records" + (rep.note.empty() ? "" : "; " + rep.note));
  r.seconds = run.seconds + detail::seconds_since(t0);
  return r;
}

}  // namespace checks

struct CriterionSpec {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<CheckResult(CheckContext&)> fn;
};

inline const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> table = {
      {1, "stationarity", 1.0, checks::stationarity},   {2, "decay", 5.0, checks::decay},
      {3, "symbol", 5.0, checks::symbol},               {4, "theta", 30.0, checks::theta},
      {5, "dissipation", 60.0, checks::dissipation},    {6, "conservation", 60.0, checks::conservation},
      {7, "convergence", 300.0, checks::convergence},   {8, "blowup", 300.0, checks::blowup},
      {9, "meanzero", 1.0, checks::meanzero},           {10, "invariance", 30.0, checks::invariance},
      {11, "graph_radius", 5.0, checks::graph_radius},  {12, "gronwall", 60.0, checks::gronwall},
  };
  return table;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& c : criteria()) names.push_back(c.name);
  names.push_back("all");
  return names;
}

/// Runs one criterion; exceptions count as failures with the message as the note.
inline CheckResult run_criterion(const CriterionSpec& spec, CheckContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = spec.fn(ctx);
  } catch (const std::exception& e) {
    r = detail::started(spec.id, spec.name);
    r.note = std::string("error: ") + e.what();
  }
  // Criteria that reuse the shared run already include its cost.
  r.seconds = std::max(r.seconds, detail::seconds_since(t0));
  r.time_limit = spec.time_limit;
  r.measures.push_back(detail::at_most("runtime seconds", r.seconds, spec.time_limit));
  r.pass = r.note.empty();
  for (const auto& m : r.measures) r.pass = r.pass && m.pass;
  return r;
}

/// Suite names are the criterion names plus "all".
inline std::vector<CheckResult> check_suite(const std::string& name, const std::function<void(const CheckResult&)>& on_result = {}) {
  std::vector<const CriterionSpec*> chosen;
  for (const auto& c : criteria())
    if (name == "all" || c.name == name) chosen.push_back(&c);
  if (chosen.empty()) {
    std::string known;
    for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown suite '" + name + "' (known: " + known + ")");
  }
  CheckContext ctx;
  std::vector<CheckResult> out;
  for (const auto* spec : chosen) {
    out.push_back(run_criterion(*spec, ctx));
    if (on_result) on_result(out.back());
  }
  return out;
}

inline std::string format_result(const CheckResult& r) {
  std::string s = std::string(r.pass ? "PASS" : "FAIL") + "  [" + std::to_string(r.id) + "] " + r.name + ":";
  bool first = true;
  for (const auto& m : r.measures) {
    s += (first ? " " : "; ") + m.label + " = " + detail::fmt(m.value) + " (" + m.op + " " + detail::fmt(m.threshold) + ")";
    if (!m.pass) s += " FAILED";
    first = false;
  }
  if (!r.note.empty()) s += "; " + r.note;
  return s;
}

inline nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json measures = nlohmann::json::array();
  for (const auto& m : r.measures)
    measures.push_back({{"label", m.label}, {"value", json_number(m.value)}, {"op", m.op}, {"threshold", m.threshold}, {"pass", m.pass}});
  return {{"id", r.id},       {"name", r.name}, {"pass", r.pass},         {"seconds", r.seconds},
          {"time_limit", r.time_limit}, {"measures", measures}, {"info", r.info}, {"note", r.note}};
}

}  // namespace lagflow
