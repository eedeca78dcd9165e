#pragma once

// Closed plane curves: discrete arclength geometry, the curve-diffusion normal
// speed, equal-chord resampling on a periodic cubic spline, and the local
// graph-radius estimate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "lagflow/errors.hpp"

namespace lagflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise quarter turn (left normal of a tangent).
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }

enum class Orientation { ccw, cw };

struct ClosedCurve {
  std::vector<Point2> points;
  double time = 0.0;

  static constexpr std::size_t kMinNodes = 16;

  std::size_t size() const { return points.size(); }
  const Point2& at(long j) const {
    const long m = static_cast<long>(points.size());
    return points[static_cast<std::size_t>(((j % m) + m) % m)];
  }

  double signed_area() const {
    double s = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) s += cross(points[j], points[(j + 1) % points.size()]);
    return 0.5 * s;
  }
  Orientation orientation() const { return signed_area() >= 0.0 ? Orientation::ccw : Orientation::cw; }

  void validate() const {
    if (points.size() < kMinNodes) throw DegenerateCurve("closed curve needs at least 16 nodes");
    for (std::size_t j = 0; j < points.size(); ++j) {
      const Point2& p = points[j];
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw DegenerateCurve("non-finite curve node " + std::to_string(j));
      if (norm(points[(j + 1) % points.size()] - p) == 0.0)
        throw DegenerateCurve("duplicate consecutive curve nodes at " + std::to_string(j));
    }
  }
};

/// Per-node geometry of a closed curve from periodic central differences in the node parameter
/// u in [0, 2pi), h = 2pi/m.
struct CurveGeometry {
  double h = 0.0;
  std::vector<Point2> tangent;
  std::vector<Point2> normal;  // left of tangent
  std::vector<double> speed;   // |d gamma / du|
  std::vector<double> kappa, kappa_s, kappa_ss;
  double length = 0.0;       // polygon length
  double signed_area = 0.0;  // shoelace

  std::size_t size() const { return kappa.size(); }
  double ds(std::size_t j) const { return speed[j] * h; }
};

/// Signed curvature of a parameterized curve from its first and second derivatives.
inline double signed_curvature(Point2 d1, Point2 d2) {
  const double sp = norm(d1);
  return cross(d1, d2) / (sp * sp * sp);
}

inline CurveGeometry curve_geometry(const ClosedCurve& curve) {
  curve.validate();
  const std::size_t m = curve.size();
  const long lm = static_cast<long>(m);
  CurveGeometry g;
  g.h = 2.0 * std::numbers::pi / static_cast<double>(m);
  g.tangent.resize(m);
  g.normal.resize(m);
  g.speed.resize(m);
  g.kappa.resize(m);
  g.kappa_s.resize(m);
  g.kappa_ss.resize(m);
  const double h = g.h;
  for (long j = 0; j < lm; ++j) {
    const Point2 prev = curve.at(j - 1), cur = curve.at(j), next = curve.at(j + 1);
    const Point2 d1 = (0.5 / h) * (next - prev);
    const Point2 d2 = (1.0 / (h * h)) * (next - 2.0 * cur + prev);
    const double sp = norm(d1);
    if (sp == 0.0) throw DegenerateCurve("zero tangent at curve node " + std::to_string(j));
    const auto u = static_cast<std::size_t>(j);
    g.speed[u] = sp;
    g.tangent[u] = (1.0 / sp) * d1;
    g.normal[u] = perp(g.tangent[u]);
    g.kappa[u] = signed_curvature(d1, d2);
  }
  auto arclength_derivative = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (long j = 0; j < lm; ++j) {
      const double df = (f[static_cast<std::size_t>((j + 1) % lm)] - f[static_cast<std::size_t>((j - 1 + lm) % lm)]) / (2.0 * h);
      out[static_cast<std::size_t>(j)] = df / g.speed[static_cast<std::size_t>(j)];
    }
  };
  arclength_derivative(g.kappa, g.kappa_s);
  arclength_derivative(g.kappa_s, g.kappa_ss);
  for (std::size_t j = 0; j < m; ++j) g.length += norm(curve.points[(j + 1) % m] - curve.points[j]);
  g.signed_area = curve.signed_area();
  return g;
}

/// Curve-diffusion normal speed along the left normal: v = -kappa_ss.
/// (Equivalently +kappa_ss along the outward normal of a ccw curve.) Velocity is v * normal.
inline std::vector<double> curve_velocity(const CurveGeometry& geom) {
  std::vector<double> v(geom.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = -geom.kappa_ss[j];
  return v;
}

namespace detail {

/// Solves the cyclic tridiagonal system a_j x_{j-1} + b_j x_j + c_j x_{j+1} = r_j (Sherman-Morrison).
inline std::vector<double> solve_cyclic_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                                    std::vector<double> r) {
  const std::size_t n = b.size();
  const double alpha = c[n - 1];  // couples x_{n-1} -> x_0
  const double beta = a[0];       // couples x_0 -> x_{n-1}
  const double gamma = -b[0];
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;
  auto thomas = [&](std::vector<double> rhs) {
    std::vector<double> cp(n), x(n);
    double denom = b[0];
    cp[0] = c[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = b[i] - a[i] * cp[i - 1];
      cp[i] = c[i] / denom;
      rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) / denom;
    }
    x[n - 1] = rhs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = rhs[i] - cp[i] * x[i + 1];
    return x;
  };
  const auto x = thomas(r);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = thomas(u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

/// Periodic cubic spline through the curve nodes, parameterized by cumulative chord length.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const std::vector<Point2>& pts) : pts_(pts) {
    const std::size_t n = pts.size();
    knots_.resize(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) knots_[j + 1] = knots_[j] + norm(pts[(j + 1) % n] - pts[j]);
    std::vector<double> a(n), b(n), c(n), rx(n), ry(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double hp = seg(j == 0 ? n - 1 : j - 1), hj = seg(j);
      const Point2 pm = pts[(j + n - 1) % n], p = pts[j], pn = pts[(j + 1) % n];
      a[j] = hp;
      b[j] = 2.0 * (hp + hj);
      c[j] = hj;
      rx[j] = 6.0 * ((pn.x - p.x) / hj - (p.x - pm.x) / hp);
      ry[j] = 6.0 * ((pn.y - p.y) / hj - (p.y - pm.y) / hp);
    }
    mx_ = solve_cyclic_tridiagonal(a, b, c, rx);
    my_ = solve_cyclic_tridiagonal(a, b, c, ry);
  }

  double period() const { return knots_.back(); }

  Point2 eval(double t, Point2* deriv = nullptr) const {
    const double T = period();
    t = std::fmod(t, T);
    if (t < 0.0) t += T;
    std::size_t j = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());
    j = (j == 0) ? 0 : j - 1;
    if (j >= pts_.size()) j = pts_.size() - 1;
    const double hj = seg(j), u = t - knots_[j];
    const std::size_t jn = (j + 1) % pts_.size();
    auto comp = [&](double y0, double y1, double m0, double m1, double& d) {
      const double bcoef = (y1 - y0) / hj - hj * (2.0 * m0 + m1) / 6.0;
      d = bcoef + m0 * u + (m1 - m0) / (2.0 * hj) * u * u;
      return y0 + bcoef * u + 0.5 * m0 * u * u + (m1 - m0) / (6.0 * hj) * u * u * u;
    };
    Point2 d;
    const Point2 p{comp(pts_[j].x, pts_[jn].x, mx_[j], mx_[jn], d.x), comp(pts_[j].y, pts_[jn].y, my_[j], my_[jn], d.y)};
    if (deriv) *deriv = d;
    return p;
  }

 private:
  std::vector<Point2> pts_;
  std::vector<double> knots_;
  std::vector<double> mx_, my_;

  double seg(std::size_t j) const { return knots_[j + 1] - knots_[j]; }
};

}  // namespace detail

/// Tangential reparameterization: m_out nodes at equal chord length on the periodic cubic
/// spline through the input nodes, anchored at node 0. The image is unchanged up to the
/// spline interpolation error; self-intersections are allowed.
inline ClosedCurve resample_arclength(const ClosedCurve& curve, std::size_t m_out) {
  curve.validate();
  if (m_out < ClosedCurve::kMinNodes) throw DegenerateCurve("resample: need at least 16 output nodes");
  const detail::PeriodicSpline spline(curve.points);
  const double T = spline.period();

  // Parameter t > t0 with |S(t) - S(t0)| = chord, starting from t0 + chord.
  auto next_param = [&](double t0, double chord) {
    const Point2 p0 = spline.eval(t0);
    double t = t0 + chord;
    for (int it = 0; it < 60; ++it) {
      Point2 d;
      const Point2 diff = spline.eval(t, &d) - p0;
      const double dist = norm(diff);
      const double f = dist - chord;
      const double df = dot(diff, d) / std::max(dist, 1e-300);
      if (df <= 0.0) break;
      const double step = f / df;
      t -= step;
      if (std::abs(step) <= 1e-15 * T) break;
    }
    return t;
  };
  auto march = [&](double chord, std::vector<double>* params) {
    double t = 0.0;
    if (params) params->assign(1, 0.0);
    for (std::size_t k = 1; k <= m_out; ++k) {
      t = next_param(t, chord);
      if (params && k < m_out) params->push_back(t);
    }
    return t - T;  // closing defect
  };

  // Secant iteration on the chord length so that m_out equal chords close the curve.
  double c0 = T / static_cast<double>(m_out);
  double f0 = march(c0, nullptr);
  double c1 = c0 * (1.0 - 1e-3), f1 = march(c1, nullptr);
  for (int it = 0; it < 50 && std::abs(f1) > 1e-14 * T; ++it) {
    if (f1 == f0) break;
    const double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
    c0 = c1;
    f0 = f1;
    c1 = c2;
    f1 = march(c1, nullptr);
  }
  std::vector<double> params;
  march(c1, &params);
  ClosedCurve out;
  out.time = curve.time;
  out.points.reserve(m_out);
  for (double t : params) out.points.push_back(spline.eval(t));
  return out;
}

/// Radius of the tangent-line ball around `node` over which the curve stays a single-valued
/// graph with slope below `slope_limit`, found by marching both ways from the node.
inline double graph_radius_estimate(const ClosedCurve& curve, const CurveGeometry& geom, std::size_t node,
                                    double slope_limit = 0.1) {
  const long m = static_cast<long>(curve.size());
  const Point2 p0 = curve.points[node];
  const Point2 t0 = geom.tangent[node], n0 = geom.normal[node];
  auto one_way = [&](int dir) {
    double a_prev = 0.0, s_prev = 0.0;
    for (long step = 1; step <= m / 2; ++step) {
      const long j = ((static_cast<long>(node) + dir * step) % m + m) % m;
      const double a = dir * dot(curve.points[static_cast<std::size_t>(j)] - p0, t0);
      const Point2 t = geom.tangent[static_cast<std::size_t>(j)];
      const double along = dot(t, t0), across = std::abs(dot(t, n0));
      const bool turned = along <= 0.0 || a <= a_prev;
      const double s = turned ? std::numeric_limits<double>::infinity() : across / along;
      if (turned) return a_prev;
      if (s >= slope_limit) return a_prev + (slope_limit - s_prev) / (s - s_prev) * (a - a_prev);
      a_prev = a;
      s_prev = s;
    }
    return a_prev;
  };
  return std::min(one_way(+1), one_way(-1));
}

namespace curves {

inline ClosedCurve from_function(std::size_t m, auto&& fn) {
  ClosedCurve c;
  c.points.reserve(m);
  for (std::size_t j = 0; j < m; ++j) c.points.push_back(fn(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m)));
  return c;
}

inline ClosedCurve circle(std::size_t m, double radius, Point2 center = {}) {
  return from_function(m, [&](double t) { return Point2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)}; });
}

/// Uniform in the parameter angle (not arclength).
inline ClosedCurve ellipse_raw(std::size_t m, double a, double b) {
  return from_function(m, [&](double t) { return Point2{a * std::cos(t), b * std::sin(t)}; });
}

inline ClosedCurve ellipse(std::size_t m, double a, double b) { return resample_arclength(ellipse_raw(4 * m, a, b), m); }

/// Polar graph r = radius + amp cos(wave * angle), resampled to equal chords.
inline ClosedCurve perturbed_circle(std::size_t m, double radius, double amp, int wave) {
  const auto raw = from_function(4 * m, [&](double t) {
    const double r = radius + amp * std::cos(wave * t);
    return Point2{r * std::cos(t), r * std::sin(t)};
  });
  return resample_arclength(raw, m);
}

/// Lemniscate of Bernoulli with half-width `scale`; one lobe ccw, the other cw.
inline ClosedCurve figure_eight(std::size_t m, double scale) {
  const auto raw = from_function(4 * m, [&](double t) {
    const double s = std::sin(t), c = std::cos(t), d = 1.0 + s * s;
    return Point2{scale * c / d, scale * s * c / d};
  });
  return resample_arclength(raw, m);
}

inline double diameter(const ClosedCurve& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) d = std::max(d, norm(c.points[i] - c.points[j]));
  return d;
}

}  // namespace curves

}  // namespace lagflow
