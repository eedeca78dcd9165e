#pragma once

// Curve diffusion flow for closed plane curves with periodic equal-chord resampling.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "lagflow/curve.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/differentiation.hpp"
#include "lagflow/scalar_flow.hpp"

namespace lagflow {

struct CurveStepperConfig {
  StepMethod method = StepMethod::imex_spectral;
  double cfl_sigma = 0.05;   // RK4: dt = cfl_sigma h_s^4
  double imex_sigma = 1e-3;  // IMEX: dt = min(max_dt, imex_sigma / sup|kappa|^4)
  double splitting_c = 1.0;
  double max_dt = 1e-5;
  int resample_every = 5;
  double blowup_threshold = 0.0;  // <= 0: 1e3 / initial diameter

  void validate() const {
    if (!(cfl_sigma > 0.0 && cfl_sigma <= 1.0)) throw Error("cfl_sigma must lie in (0, 1]");
    if (!(imex_sigma > 0.0)) throw Error("imex_sigma must be positive");
    if (!(splitting_c >= 1.0)) throw Error("splitting_c must be >= 1");
    if (!(max_dt > 0.0)) throw Error("max_dt must be positive");
    if (resample_every < 0) throw Error("resample_every must be >= 0");
  }
};

struct CurveState {
  ClosedCurve curve;
  std::size_t step_count = 0;
  double last_dt = 0.0;
};

inline std::vector<Point2> curve_velocity_field(const CurveGeometry& geom) {
  const auto v = curve_velocity(geom);
  std::vector<Point2> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] * geom.normal[j];
  return out;
}

inline double curve_dt(const ClosedCurve& curve, const CurveGeometry& geom, const CurveStepperConfig& cfg) {
  if (cfg.method == StepMethod::rk4_explicit) {
    const double hs = geom.length / static_cast<double>(curve.size());
    return std::min(cfg.max_dt, cfg.cfl_sigma * hs * hs * hs * hs);
  }
  double k = 0.0;
  for (double x : geom.kappa) k = std::max(k, std::abs(x));
  const double k4 = k * k * k * k;
  return k4 > 0.0 ? std::min(cfg.max_dt, cfg.imex_sigma / k4) : cfg.max_dt;
}

/// One step of size dt, followed by resampling when the step count hits the cadence.
inline CurveState step_curve(const CurveState& state, const CurveStepperConfig& cfg, double dt) {
  const ClosedCurve& c0 = state.curve;
  const std::size_t m = c0.size();
  CurveState next = state;
  if (cfg.method == StepMethod::rk4_explicit) {
    auto velocity = [](const ClosedCurve& c) { return curve_velocity_field(curve_geometry(c)); };
    auto stage = [&](const std::vector<Point2>& k, double w) {
      ClosedCurve s = c0;
      for (std::size_t j = 0; j < m; ++j) s.points[j] = s.points[j] + w * k[j];
      return velocity(s);
    };
    const auto k1 = velocity(c0);
    const auto k2 = stage(k1, 0.5 * dt);
    const auto k3 = stage(k2, 0.5 * dt);
    const auto k4 = stage(k3, dt);
    for (std::size_t j = 0; j < m; ++j)
      next.curve.points[j] = next.curve.points[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  } else {
    // (I + dt c d_s^4) gamma+ = gamma + dt (v N + c d_s^4 gamma), with d_s = (2pi/L) d_u.
    const auto geom = curve_geometry(c0);
    const auto vel = curve_velocity_field(geom);
    const double scale = 2.0 * std::numbers::pi / geom.length;
    const double w = dt * cfg.splitting_c * std::pow(scale, 4);
    std::vector<double> ix(m), iy(m);
    for (std::size_t j = 0; j < m; ++j) {
      ix[j] = dt * vel[j].x;
      iy[j] = dt * vel[j].y;
    }
    const auto& diff = differentiator_for(1, static_cast<int>(m), Scheme::spectral);
    auto symbol = [&](const std::array<int, 3>& k) {
      const double k2 = double(k[0]) * k[0];
      return 1.0 / (1.0 + w * k2 * k2);
    };
    const auto sx = diff.apply_symbol(ix, symbol), sy = diff.apply_symbol(iy, symbol);
    for (std::size_t j = 0; j < m; ++j) next.curve.points[j] = next.curve.points[j] + Point2{sx[j], sy[j]};
  }
  next.curve.time = c0.time + dt;
  next.step_count = state.step_count + 1;
  next.last_dt = dt;
  if (cfg.resample_every > 0 && next.step_count % static_cast<std::size_t>(cfg.resample_every) == 0)
    next.curve = resample_arclength(next.curve, m);
  return next;
}

struct CurveEvolveResult {
  CurveState final_state;
  std::vector<DiagnosticsRecord> records;
  bool blowup = false;
  double blowup_time = 0.0;
  double blowup_sup = 0.0;
  double threshold = 0.0;
};

using CurveObserver = std::function<void(const CurveState&, const DiagnosticsRecord&)>;

/// Steps to t_end, recording at the start, every `diag_every` steps and at the end.
/// Stops when sup|kappa| crosses the threshold.
inline CurveEvolveResult evolve_curve(const ClosedCurve& initial, double t_end, const CurveStepperConfig& cfg,
                                      const CurveObserver& observer = {}, std::size_t diag_every = 1) {
  cfg.validate();
  if (!(t_end > initial.time)) throw Error("evolve_curve: t_end must exceed the current time");
  if (diag_every == 0) diag_every = 1;
  CurveEvolveResult res;
  res.threshold = cfg.blowup_threshold > 0.0 ? cfg.blowup_threshold : 1e3 / curves::diameter(initial);
  CurveState state{initial, 0, 0.0};
  CurveGeometry geom = curve_geometry(state.curve);
  auto record = [&]() {
    res.records.push_back(snapshot(state.curve, geom));
    if (observer) observer(state, res.records.back());
  };
  record();
  const double eps_t = 1e-12 * std::max(1.0, t_end);
  while (state.curve.time < t_end - eps_t) {
    const double dt = std::min(curve_dt(state.curve, geom, cfg), t_end - state.curve.time);
    state = step_curve(state, cfg, dt);
    geom = curve_geometry(state.curve);
    double sup = 0.0;
    for (double k : geom.kappa) sup = std::max(sup, std::abs(k));
    const bool last = state.curve.time >= t_end - eps_t;
    if (!(sup <= res.threshold)) {
      res.blowup = true;
      res.blowup_time = state.curve.time;
      res.blowup_sup = sup;
      record();
      break;
    }
    if (state.step_count % diag_every == 0 || last) record();
  }
  res.final_state = state;
  return res;
}

}  // namespace lagflow
