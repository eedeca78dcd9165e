#pragma once

// Time integration of phi_t = div(JH) on the periodic chart.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagflow/ambient.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/grid.hpp"

namespace lagflow {

enum class StepMethod { rk4_explicit, imex_spectral };

inline std::string to_string(StepMethod m) { return m == StepMethod::rk4_explicit ? "rk4_explicit" : "imex_spectral"; }

inline StepMethod step_method_from_string(const std::string& s) {
  if (s == "rk4_explicit" || s == "rk4") return StepMethod::rk4_explicit;
  if (s == "imex_spectral" || s == "imex") return StepMethod::imex_spectral;
  throw std::invalid_argument("unknown step method '" + s + "'");
}

struct StepperConfig {
  StepMethod method = StepMethod::imex_spectral;
  Scheme scheme = Scheme::spectral;
  double cfl_sigma = 0.1;
  double splitting_c = 1.0;
  double max_dt = 1e-3;
  double blowup_threshold = 1e3;

  void validate() const {
    if (!(cfl_sigma > 0.0 && cfl_sigma <= 1.0)) throw Error("cfl_sigma must lie in (0, 1]");
    if (!(splitting_c >= 1.0)) throw Error("splitting_c must be >= 1");
    if (!(max_dt > 0.0)) throw Error("max_dt must be positive");
    if (!(blowup_threshold > 0.0)) throw Error("blowup_threshold must be positive");
  }
};

struct FlowState {
  PotentialGrid grid;
  std::size_t step_count = 0;
  double last_dt = 0.0;

  explicit FlowState(PotentialGrid g) : grid(std::move(g)) {}
  double time() const { return grid.time; }
};

/// div(JH) of the current jets, after checking the slope condition at every node.
inline std::vector<double> rhs(const PotentialGrid& grid, const AmbientModel& ambient, Scheme scheme) {
  auto geo = graph_geometry(grid, ambient, scheme);
  const auto slopes = tangent_slopes(geo.jet, geo.metric);
  const double limit = slope_constant(grid.dim);
  for (std::size_t v = 0; v < slopes.size(); ++v)
    if (!(slopes[v] < limit)) throw SlopeViolation(v, slopes[v], hessian_norm(geo.jet, v), limit);
  return std::move(geo.curvature.divJH);
}

inline std::vector<double> rhs(const FlowState& state, const AmbientModel& ambient, Scheme scheme) {
  return rhs(state.grid, ambient, scheme);
}

/// max over nodes of ||g^{-1}||_2.
inline double max_inverse_metric_norm(const ChartMetric& metric, std::size_t nodes) {
  double mx = 0.0;
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto ev = symmetric_eigenvalues(metric.inverse_metric(v));
    mx = std::max(mx, ev[static_cast<std::size_t>(metric.dim - 1)]);
  }
  return mx;
}

/// cfl_sigma h^4 / (8 n^2 max ||g^{-1}||^2), capped by max_dt.
inline double stable_dt(const FlowState& state, const StepperConfig& config,
                        const AmbientModel& ambient) {
  const auto& g = state.grid;
  const auto jet = compute_jets(g, config.scheme);
  const auto metric = induced_metric(jet, ambient);
  const double gi = max_inverse_metric_norm(metric, g.size());
  const double h = g.spacing();
  const double dt = config.cfl_sigma * h * h * h * h / (8.0 * g.dim * g.dim * gi * gi);
  return std::min(dt, config.max_dt);
}

inline double stable_dt(const FlowState& state, const StepperConfig& config) {
  return stable_dt(state, config, AmbientModel::flat_model(state.grid.dim));
}

/// sup |A|_g; throws BlowupDetected above the threshold.
inline double check_blowup(const PotentialGrid& grid, const AmbientModel& ambient, Scheme scheme, double threshold) {
  const auto jet = compute_jets(grid, scheme);
  const auto metric = induced_metric(jet, ambient);
  const auto sf = second_form(jet, metric, ambient, 0);
  const double sup = *std::max_element(sf.normA.begin(), sf.normA.end());
  if (!(sup <= threshold)) throw BlowupDetected(grid.time, sup);
  return sup;
}

/// One step of size dt (dt <= 0 picks stable_dt for RK4 and max_dt for IMEX).
inline FlowState step(const FlowState& state, const StepperConfig& config, const AmbientModel& ambient, double dt = 0.0) {
  const auto& g0 = state.grid;
  FlowState next = state;
  if (config.method == StepMethod::rk4_explicit) {
    if (dt <= 0.0) dt = stable_dt(state, config, ambient);
    auto stage = [&](const std::vector<double>& k, double w) {
      PotentialGrid s = g0;
      for (std::size_t v = 0; v < s.size(); ++v) s.values[v] += w * k[v];
      return rhs(s, ambient, config.scheme);
    };
    const auto k1 = rhs(g0, ambient, config.scheme);
    const auto k2 = stage(k1, 0.5 * dt);
    const auto k3 = stage(k2, 0.5 * dt);
    const auto k4 = stage(k3, dt);
    for (std::size_t v = 0; v < g0.size(); ++v)
      next.grid.values[v] += dt / 6.0 * (k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]);
  } else {
    if (dt <= 0.0) dt = config.max_dt;
    auto geo = graph_geometry(g0, ambient, config.scheme);
    const auto slopes = tangent_slopes(geo.jet, geo.metric);
    const double limit = slope_constant(g0.dim);
    for (std::size_t v = 0; v < slopes.size(); ++v)
      if (!(slopes[v] < limit)) throw SlopeViolation(v, slopes[v], hessian_norm(geo.jet, v), limit);
    const double gi = max_inverse_metric_norm(geo.metric, g0.size());
    const double c = std::max(config.splitting_c, gi * gi);
    // (I + dt c L) phi+ = phi + dt (r + c L phi), L = Delta_0^2 with symbol |k|^4.
    std::vector<double> inc(g0.size());
    for (std::size_t v = 0; v < g0.size(); ++v) inc[v] = dt * geo.curvature.divJH[v];
    const auto& diff = differentiator_for(g0.dim, g0.m, Scheme::spectral);
    const auto smoothed = diff.apply_symbol(inc, [&](const std::array<int, 3>& k) {
      const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
      return 1.0 / (1.0 + dt * c * k2 * k2);
    });
    for (std::size_t v = 0; v < g0.size(); ++v) next.grid.values[v] += smoothed[v];
  }
  next.grid.time = g0.time + dt;
  next.step_count = state.step_count + 1;
  next.last_dt = dt;
  check_blowup(next.grid, ambient, config.scheme, config.blowup_threshold);
  return next;
}

struct EvolveResult {
  FlowState final_state;
  std::vector<DiagnosticsRecord> records;
  bool blowup = false;
  double blowup_time = 0.0;
  double blowup_sup = 0.0;
};

using FlowObserver = std::function<void(const FlowState&, const DiagnosticsRecord&)>;

/// Steps to t_end, recording a snapshot at the start, every `diag_every` steps and at the end.
/// Stops early on blow-up with the records gathered so far.
inline EvolveResult evolve(FlowState state, double t_end, const StepperConfig& config, const AmbientModel& ambient,
                           const FlowObserver& observer = {}, std::size_t diag_every = 1) {
  config.validate();
  if (!(t_end > state.time())) throw Error("evolve: t_end must exceed the current time");
  if (diag_every == 0) diag_every = 1;
  EvolveResult res{state, {}, false, 0.0, 0.0};
  auto record = [&](const FlowState& s) {
    res.records.push_back(snapshot(s.grid, ambient, config.scheme));
    if (observer) observer(s, res.records.back());
  };
  record(state);
  const double eps_t = 1e-12 * std::max(1.0, t_end);
  while (state.time() < t_end - eps_t) {
    double dt = config.method == StepMethod::rk4_explicit ? stable_dt(state, config, ambient) : config.max_dt;
    dt = std::min(dt, t_end - state.time());
    try {
      state = step(state, config, ambient, dt);
    } catch (const BlowupDetected& b) {
      res.blowup = true;
      res.blowup_time = b.time();
      res.blowup_sup = b.sup();
      break;
    }
    const bool last = state.time() >= t_end - eps_t;
    if (state.step_count % diag_every == 0 || last) record(state);
  }
  res.final_state = state;
  return res;
}

/// [rhs(phi + eps cos(k.x)) - rhs(phi)] / eps projected on cos(k.x).
inline double symbol_probe(const FlowState& state, const std::array<int, 3>& k, double eps, const AmbientModel& ambient,
                           Scheme scheme = Scheme::spectral) {
  const auto& g = state.grid;
  const auto r0 = rhs(g, ambient, scheme);
  PotentialGrid p = g;
  std::vector<double> mode(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto x = g.position(v);
    double ph = 0.0;
    for (int a = 0; a < g.dim; ++a) ph += k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    mode[v] = std::cos(ph);
    p.values[v] += eps * mode[v];
  }
  const auto r1 = rhs(p, ambient, scheme);
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    num += (r1[v] - r0[v]) / eps * mode[v];
    den += mode[v] * mode[v];
  }
  return num / den;
}

}  // namespace lagflow
