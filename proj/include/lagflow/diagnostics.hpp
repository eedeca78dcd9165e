#pragma once

// Global functionals of a graph potential or a closed curve, and checks over
// record series (dissipation residuals, theta route, Gronwall envelope).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "lagflow/ambient.hpp"
#include "lagflow/curve.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/grid.hpp"

namespace lagflow {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DiagnosticsRecord {
  double time = 0.0;
  double volume = 0.0;
  double dissipation = 0.0;
  double meanzero_residual = 0.0;
  std::array<double, 3> a_norms{};  // int |A|^2, int |nabla A|^2, int |nabla^2 A|^2
  double sup_A = 0.0;
  double theta_residual = kNaN;
  double slope_margin = kNaN;  // scalar mode only
  double isoperimetric = kNaN;  // curve mode only
  double signed_area = kNaN;    // curve mode only
  double meanzero_abs = 0.0;    // int |div JH|, the scale for meanzero_residual
};

/// Pointwise max |div JH + Delta_g theta| for a computed geometry. Flat ambient only.
inline double theta_pointwise_residual(const GraphGeometry& geo, const AmbientModel& ambient) {
  const auto theta = theta_angle(geo.jet, ambient);
  const auto lap = laplace_beltrami(theta, geo.metric, geo.jet.differentiator());
  double r = 0.0;
  for (std::size_t v = 0; v < theta.size(); ++v) r = std::max(r, std::abs(geo.curvature.divJH[v] + lap[v]));
  return r;
}

/// c_n minus the largest tangent/vertical pairing over the lattice.
inline double slope_check(const JetField& jet, const ChartMetric& metric) {
  const auto s = tangent_slopes(jet, metric);
  return slope_constant(jet.dim) - *std::max_element(s.begin(), s.end());
}

inline DiagnosticsRecord snapshot(const PotentialGrid& grid, const GraphGeometry& geo, const AmbientModel& ambient) {
  const auto sf = second_form(geo.jet, geo.metric, ambient, 2);
  const double w = std::pow(grid.spacing(), grid.dim);
  const auto& f = geo.curvature.divJH;
  DiagnosticsRecord r;
  r.time = grid.time;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    const double dv = geo.metric.vol_elem[v] * w;
    r.volume += dv;
    r.dissipation += f[v] * f[v] * dv;
    r.meanzero_residual += f[v] * dv;
    r.meanzero_abs += std::abs(f[v]) * dv;
    r.a_norms[0] += sf.normA[v] * sf.normA[v] * dv;
    r.a_norms[1] += sf.normDA[v] * sf.normDA[v] * dv;
    r.a_norms[2] += sf.normD2A[v] * sf.normD2A[v] * dv;
    r.sup_A = std::max(r.sup_A, sf.normA[v]);
  }
  if (ambient.flat) r.theta_residual = theta_pointwise_residual(geo, ambient);
  r.slope_margin = slope_check(geo.jet, geo.metric);
  return r;
}

inline DiagnosticsRecord snapshot(const PotentialGrid& grid, const AmbientModel& ambient, Scheme scheme) {
  return snapshot(grid, graph_geometry(grid, ambient, scheme), ambient);
}

/// Curve case: volume is length, div JH = -kappa_s, |A| = |kappa|; theta is the tangent angle.
inline DiagnosticsRecord snapshot(const ClosedCurve& curve, const CurveGeometry& geom) {
  const std::size_t m = geom.size();
  const long lm = static_cast<long>(m);
  DiagnosticsRecord r;
  r.time = curve.time;
  r.volume = geom.length;
  for (std::size_t j = 0; j < m; ++j) {
    const double ds = geom.ds(j);
    const double f = -geom.kappa_s[j];
    r.dissipation += f * f * ds;
    r.meanzero_residual += f * ds;
    r.meanzero_abs += std::abs(f) * ds;
    r.a_norms[0] += geom.kappa[j] * geom.kappa[j] * ds;
    r.a_norms[1] += geom.kappa_s[j] * geom.kappa_s[j] * ds;
    r.a_norms[2] += geom.kappa_ss[j] * geom.kappa_ss[j] * ds;
    r.sup_A = std::max(r.sup_A, std::abs(geom.kappa[j]));
  }
  // theta_s from wrapped tangent-angle differences, then theta_ss; compare with kappa_s.
  std::vector<double> angle(m), theta_s(m);
  for (std::size_t j = 0; j < m; ++j) angle[j] = std::atan2(geom.tangent[j].y, geom.tangent[j].x);
  auto wrap = [](double a) { return std::remainder(a, 2.0 * std::numbers::pi); };
  for (long j = 0; j < lm; ++j) {
    const double d = wrap(angle[static_cast<std::size_t>((j + 1) % lm)] - angle[static_cast<std::size_t>((j - 1 + lm) % lm)]);
    theta_s[static_cast<std::size_t>(j)] = d / (2.0 * geom.h * geom.speed[static_cast<std::size_t>(j)]);
  }
  r.theta_residual = 0.0;
  for (long j = 0; j < lm; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double theta_ss = (theta_s[static_cast<std::size_t>((j + 1) % lm)] - theta_s[static_cast<std::size_t>((j - 1 + lm) % lm)]) /
                            (2.0 * geom.h * geom.speed[u]);
    r.theta_residual = std::max(r.theta_residual, std::abs(-geom.kappa_s[u] + theta_ss));
  }
  r.signed_area = geom.signed_area;
  r.isoperimetric = geom.signed_area != 0.0
                        ? geom.length * geom.length / (4.0 * std::numbers::pi * std::abs(geom.signed_area))
                        : kNaN;
  return r;
}

inline DiagnosticsRecord snapshot(const ClosedCurve& curve) { return snapshot(curve, curve_geometry(curve)); }

/// r_i = (Vol_{i+1} - Vol_i)/dt_i + (D_i + D_{i+1})/2 for consecutive records.
inline std::vector<double> dissipation_check(const std::vector<DiagnosticsRecord>& series) {
  if (series.size() < 3) throw Error("dissipation_check needs at least 3 records");
  std::vector<double> r;
  r.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double dt = series[i + 1].time - series[i].time;
    if (!(dt > 0.0)) throw Error("dissipation_check: time stamps not increasing at record " + std::to_string(i + 1));
    r.push_back((series[i + 1].volume - series[i].volume) / dt + 0.5 * (series[i].dissipation + series[i + 1].dissipation));
  }
  return r;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace detail {

// Delta_g^2 theta - a^m d_m theta with a = g^{-1} D^2phi D(div JH).
inline std::vector<double> theta_evolution_rhs(const GraphGeometry& geo, const std::vector<double>& theta) {
  const auto& diff = geo.jet.differentiator();
  const int n = geo.jet.dim;
  const auto lap = laplace_beltrami(theta, geo.metric, diff);
  const auto bilap = laplace_beltrami(lap, geo.metric, diff);
  const auto dtheta = gradient_of_components(diff, theta, 1);
  const auto df = gradient_of_components(diff, geo.curvature.divJH, 1);
  std::vector<double> out(theta.size());
  for (std::size_t v = 0; v < theta.size(); ++v) {
    const SmallMatrix gi = geo.metric.inverse_metric(v);
    const SmallMatrix s = geo.jet.hessian(v);
    std::array<double, 3> sdf{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sdf[static_cast<std::size_t>(i)] += s(i, j) * df[v * n + static_cast<std::size_t>(j)];
    double transport = 0.0;
    for (int a = 0; a < n; ++a) {
      double am = 0.0;
      for (int i = 0; i < n; ++i) am += gi(a, i) * sdf[static_cast<std::size_t>(i)];
      transport += am * dtheta[v * n + static_cast<std::size_t>(a)];
    }
    out[v] = bilap[v] - transport;
  }
  return out;
}

}  // namespace detail

/// Along a trajectory step a -> b: max |(theta_b - theta_a)/dt + mean of (Delta_g^2 theta - a.D theta)|.
/// The transport term accounts for the tangential motion of chart points. Flat ambient only.
inline double theta_trajectory_residual(const PotentialGrid& a, const PotentialGrid& b, Scheme scheme) {
  const auto flat = AmbientModel::flat_model(a.dim);
  const double dt = b.time - a.time;
  if (!(dt > 0.0)) throw Error("theta_trajectory_residual: states must be time ordered");
  const auto ga = graph_geometry(a, flat, scheme), gb = graph_geometry(b, flat, scheme);
  const auto ta = theta_angle(ga.jet, flat), tb = theta_angle(gb.jet, flat);
  const auto ra = detail::theta_evolution_rhs(ga, ta), rb = detail::theta_evolution_rhs(gb, tb);
  double r = 0.0;
  for (std::size_t v = 0; v < ta.size(); ++v) r = std::max(r, std::abs((tb[v] - ta[v]) / dt + 0.5 * (ra[v] + rb[v])));
  return r;
}

struct GronwallReport {
  enum class Status { pass, fail, abstain };
  Status status = Status::abstain;
  double C = 0.0;
  double slack = 10.0;
  double worst_ratio = 0.0;  // max over the check window of excess / (slack C rhs); <= 1 passes
  std::size_t violations = 0;
  std::string note;
};

inline std::string to_string(GronwallReport::Status s) {
  switch (s) {
    case GronwallReport::Status::pass: return "pass";
    case GronwallReport::Status::fail: return "fail";
    case GronwallReport::Status::abstain: return "abstain";
  }
  return "?";
}

/// Split-window envelope for Y = int |nabla^{k-1} A|^2: fit the smallest C with
/// dY/dt <= C (Y + sum_{l<k-1} int |nabla^l A|^2) on the first half, then check the
/// second half against slack * C. Differences within float roundoff of Y + S are ignored.
inline GronwallReport gronwall_monitor(const std::vector<DiagnosticsRecord>& series, int k, double slack = 10.0) {
  if (series.size() < 10) throw Error("gronwall_monitor: window too short (need at least 10 records)");
  if (k < 1 || k > 3) throw Error("gronwall_monitor: k must be 1, 2 or 3");
  GronwallReport rep;
  rep.slack = slack;
  const std::size_t half = series.size() / 2;
  double sup0 = 0.0;
  for (std::size_t i = 0; i < half; ++i) sup0 = std::max(sup0, series[i].sup_A);
  for (const auto& r : series)
    if (r.sup_A > 2.0 * sup0) {
      rep.status = GronwallReport::Status::abstain;
      rep.note = "sup_A left twice its initial-window maximum at t = " + std::to_string(r.time);
      return rep;
    }
  const auto kk = static_cast<std::size_t>(k - 1);
  auto interval = [&](std::size_t i, double& excess, double& rhs) {
    const auto &a = series[i], &b = series[i + 1];
    const double dt = b.time - a.time;
    if (!(dt > 0.0)) throw Error("gronwall_monitor: time stamps not increasing");
    const double ya = a.a_norms[kk], yb = b.a_norms[kk];
    rhs = 0.5 * (ya + yb);
    for (std::size_t l = 0; l < kk; ++l) rhs += 0.5 * (a.a_norms[l] + b.a_norms[l]);
    // Increments below the roundoff of the whole right-hand side are not resolvable.
    const double tol = 128.0 * std::numeric_limits<double>::epsilon() * rhs / dt;
    excess = (yb - ya) / dt - tol;
  };
  double C = 0.0;
  for (std::size_t i = 0; i + 1 < half; ++i) {
    double excess, rhs;
    interval(i, excess, rhs);
    if (excess <= 0.0) continue;
    C = std::max(C, rhs > 0.0 ? excess / rhs : std::numeric_limits<double>::infinity());
  }
  rep.C = C;
  for (std::size_t i = half; i + 1 < series.size(); ++i) {
    double excess, rhs;
    interval(i, excess, rhs);
    if (excess <= 0.0) continue;
    const double bound = slack * C * rhs;
    const double ratio = bound > 0.0 ? excess / bound : std::numeric_limits<double>::infinity();
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (ratio > 1.0) ++rep.violations;
  }
  rep.status = rep.violations == 0 ? GronwallReport::Status::pass : GronwallReport::Status::fail;
  return rep;
}

}  // namespace lagflow
