#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lagflow/curve_flow.hpp"

using namespace lagflow;

namespace {

const double kPi = std::numbers::pi;

}  // namespace

TEST(CurveGeometry, Circle) {
  for (double R : {0.5, 1.0, 3.0}) {
    const auto g = curve_geometry(curves::circle(256, R, {0.3, -1.2}));
    for (double k : g.kappa) EXPECT_NEAR(k * R, 1.0, 1e-3);
    EXPECT_NEAR(g.length / (2.0 * kPi * R), 1.0, 1e-4);
    EXPECT_NEAR(g.signed_area / (kPi * R * R), 1.0, 1e-3);
  }
}

TEST(CurveGeometry, FrameIsOrthonormal) {
  const auto g = curve_geometry(curves::perturbed_circle(128, 1.0, 0.1, 5));
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(dot(g.tangent[j], g.normal[j]), 0.0, 1e-12);
    EXPECT_NEAR(norm(g.tangent[j]), 1.0, 1e-12);
    EXPECT_NEAR(norm(g.normal[j]), 1.0, 1e-12);
  }
}

TEST(CurveGeometry, EllipseVertexAndArea) {
  const auto c = curves::ellipse_raw(256, 2.0, 1.0);
  const auto g = curve_geometry(c);
  EXPECT_DOUBLE_EQ(c.points[0].x, 2.0);
  EXPECT_NEAR(g.kappa[0], 2.0, 2e-3);
  EXPECT_NEAR(g.signed_area / (2.0 * kPi), 1.0, 1e-3);
}

TEST(CurveGeometry, TurningNumber) {
  auto turning_error = [](std::size_t m) {
    const auto g = curve_geometry(curves::perturbed_circle(m, 1.0, 0.1, 3));
    double total = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) total += g.kappa[j] * g.ds(j);
    return std::abs(total - 2.0 * kPi);
  };
  const double e1 = turning_error(128), e2 = turning_error(256);
  EXPECT_LT(e1, 1e-2);
  EXPECT_GT(e1 / e2, 3.5);
  const auto f8 = curve_geometry(curves::figure_eight(256, 1.0));
  double total = 0.0;
  for (std::size_t j = 0; j < f8.size(); ++j) total += f8.kappa[j] * f8.ds(j);
  EXPECT_NEAR(total, 0.0, 1e-9);
}

TEST(CurveGeometry, ClockwiseCircleHasNegativeCurvature) {
  auto c = curves::circle(64, 1.0);
  std::reverse(c.points.begin(), c.points.end());
  const auto g = curve_geometry(c);
  EXPECT_EQ(c.orientation(), Orientation::cw);
  EXPECT_LT(g.signed_area, 0.0);
  for (double k : g.kappa) EXPECT_LT(k, 0.0);
}

TEST(CurveGeometry, DegenerateInputsRejected) {
  auto c = curves::circle(32, 1.0);
  c.points[5] = c.points[4];
  EXPECT_THROW(curve_geometry(c), DegenerateCurve);
  EXPECT_THROW(curve_geometry(curves::circle(8, 1.0)), DegenerateCurve);
}

TEST(CurveVelocity, CircleIsStationary) {
  // kappa_ss is a fourth difference of rounded coordinates: roundoff grows like eps / h^4.
  const auto v = curve_velocity(curve_geometry(curves::circle(128, 1.0)));
  EXPECT_LE(max_abs(v), 1e-10);
  const auto c = curves::circle(256, 1.0);
  CurveStepperConfig cfg;
  const auto s1 = step_curve(CurveState{c, 0, 0.0}, cfg, 1e-5);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_LE(norm(s1.curve.points[j] - c.points[j]) / 1e-5, 1e-10);
}

TEST(CurveVelocity, EllipseReflectionSymmetric) {
  const std::size_t m = 256;
  const auto v = curve_velocity(curve_geometry(curves::ellipse_raw(m, 2.0, 1.0)));
  EXPECT_GT(max_abs(v), 1e-2);
  for (std::size_t j = 0; j < m; ++j) {
    EXPECT_NEAR(v[j], v[(m - j) % m], 1e-8);          // y -> -y
    EXPECT_NEAR(v[j], v[(m / 2 + m - j) % m], 1e-8);  // x -> -x
  }
}

TEST(CurveVelocity, LinearResponseOfPerturbedCircle) {
  // r = 1 + d cos(2t): kappa ~ 1 + 3 d cos 2t, so v = -kappa_ss ~ 12 d cos 2t.
  const std::size_t m = 256;
  for (double d : {1e-4, 1e-5}) {
    const auto c = curves::from_function(m, [d](double t) {
      const double r = 1.0 + d * std::cos(2.0 * t);
      return Point2{r * std::cos(t), r * std::sin(t)};
    });
    const auto v = curve_velocity(curve_geometry(c));
    for (std::size_t j = 0; j < m; ++j) {
      const double t = 2.0 * kPi * static_cast<double>(j) / m;
      EXPECT_NEAR(v[j] / d, 12.0 * std::cos(2.0 * t), 0.05);
    }
  }
}

TEST(Resample, UniformCircleUnchanged) {
  const auto c = curves::circle(128, 1.3);
  const auto r = resample_arclength(c, 128);
  for (std::size_t j = 0; j < c.size(); ++j) {
    EXPECT_NEAR(r.points[j].x, c.points[j].x, 1e-12);
    EXPECT_NEAR(r.points[j].y, c.points[j].y, 1e-12);
  }
}

TEST(Resample, NonuniformCircleBecomesEqualSpaced) {
  const auto c = curves::from_function(400, [](double t) {
    const double s = t + 0.3 * std::sin(t);
    return Point2{std::cos(s), std::sin(s)};
  });
  const auto r = resample_arclength(c, 128);
  std::vector<double> chords;
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_NEAR(norm(r.points[j]), 1.0, 1e-8);
    chords.push_back(norm(r.points[(j + 1) % r.size()] - r.points[j]));
  }
  const auto [lo, hi] = std::minmax_element(chords.begin(), chords.end());
  EXPECT_LE((*hi - *lo) / *hi, 1e-10);
  EXPECT_NEAR(*hi, 2.0 * std::sin(kPi / 128), 1e-8);
}

TEST(Resample, PreservesLengthOfFlowedCurve) {
  // A few flow steps without resampling skew the node spacing slightly, as between resamples.
  CurveStepperConfig cfg;
  cfg.resample_every = 0;
  CurveState s{curves::perturbed_circle(256, 1.0, 0.05, 3), 0, 0.0};
  for (int i = 0; i < 5; ++i) s = step_curve(s, cfg, 1e-5);
  const double L = curve_geometry(s.curve).length;
  const auto r = resample_arclength(s.curve, 256);
  EXPECT_NEAR(curve_geometry(r).length / L, 1.0, 1e-8);
}

TEST(Resample, ChordsUniformAndAnchored) {
  const auto raw = curves::ellipse_raw(2048, 2.0, 1.0);
  const auto coarse = resample_arclength(raw, 256);
  std::vector<double> chords;
  for (std::size_t j = 0; j < coarse.size(); ++j) chords.push_back(norm(coarse.points[(j + 1) % coarse.size()] - coarse.points[j]));
  const auto [lo, hi] = std::minmax_element(chords.begin(), chords.end());
  EXPECT_LE((*hi - *lo) / *hi, 1e-10);
  EXPECT_EQ(coarse.points[0].x, raw.points[0].x);
  // Polygon length depends on node placement at O(h^2); against the fine polygon it converges.
  EXPECT_NEAR(curve_geometry(coarse).length / curve_geometry(raw).length, 1.0, 1e-4);
}

TEST(Resample, FigureEightAllowed) {
  const auto r = resample_arclength(curves::figure_eight(128, 1.0), 96);
  EXPECT_EQ(r.size(), 96u);
  EXPECT_NEAR(r.signed_area(), 0.0, 1e-12);
}

TEST(GraphRadius, CircleMatchesTangentLineGeometry) {
  for (double R : {0.5, 1.0, 2.0}) {
    const auto c = curves::circle(1024, R);
    const auto g = curve_geometry(c);
    EXPECT_NEAR(graph_radius_estimate(c, g, 0) / (R * std::sin(std::atan(0.1))), 1.0, 1e-3);
    EXPECT_NEAR(graph_radius_estimate(c, g, 371) / (R * std::sin(std::atan(0.1))), 1.0, 1e-3);
  }
}

TEST(GraphRadius, EllipseVertexAboveCircleFit) {
  double c_fit = 1e300;
  for (double R : {0.5, 1.0, 2.0}) {
    const auto c = curves::circle(512, R);
    c_fit = std::min(c_fit, graph_radius_estimate(c, curve_geometry(c), 0) * (1.0 / R + 1.0));
  }
  const auto e = curves::ellipse_raw(512, 2.0, 1.0);
  EXPECT_GE(graph_radius_estimate(e, curve_geometry(e), 0), c_fit / 3.0);
}

TEST(GraphRadius, FlatCircleStillAboveBound) {
  const auto c = curves::circle(256, 1e3);
  const double r = graph_radius_estimate(c, curve_geometry(c), 0);
  EXPECT_GT(r, 0.05 / (1e-3 + 1.0));
}

TEST(EvolveCurve, CircleDiagnosticsConstant) {
  CurveStepperConfig cfg;
  cfg.max_dt = 1e-3;
  const auto res = evolve_curve(curves::circle(64, 1.0), 1.0, cfg, {}, 50);
  const auto& a = res.records.front();
  for (const auto& r : res.records) {
    EXPECT_NEAR(r.volume, a.volume, 1e-6);
    EXPECT_NEAR(r.signed_area, a.signed_area, 1e-6);
    EXPECT_NEAR(r.sup_A, a.sup_A, 1e-6);
    EXPECT_NEAR(r.a_norms[0], a.a_norms[0], 1e-6);
    EXPECT_NEAR(r.isoperimetric, a.isoperimetric, 1e-6);
  }
  EXPECT_FALSE(res.blowup);
}

TEST(EvolveCurve, PerturbedCircleConservesAreaAndRounds) {
  CurveStepperConfig cfg;
  cfg.max_dt = 1e-4;
  const auto res = evolve_curve(curves::perturbed_circle(128, 1.0, 0.05, 3), 0.05, cfg, {}, 10);
  const double a0 = res.records.front().signed_area;
  for (const auto& r : res.records) EXPECT_LE(std::abs(r.signed_area - a0) / a0, 1e-4);
  for (std::size_t i = 0; i + 1 < res.records.size(); ++i) {
    EXPECT_LE(res.records[i + 1].volume, res.records[i].volume + 1e-9);
    EXPECT_LE(res.records[i + 1].isoperimetric, res.records[i].isoperimetric + 1e-9);
  }
  EXPECT_LT(res.records.back().isoperimetric - 1.0, 0.5 * (res.records.front().isoperimetric - 1.0));
}

TEST(EvolveCurve, Rk4AgreesWithImexOnShortRun) {
  CurveStepperConfig rk;
  rk.method = StepMethod::rk4_explicit;
  rk.max_dt = 1.0;
  CurveStepperConfig im;
  im.max_dt = 1e-6;
  const auto c = curves::perturbed_circle(32, 1.0, 0.05, 3);
  const auto a = evolve_curve(c, 2e-3, rk, {}, 1000000);
  const auto b = evolve_curve(c, 2e-3, im, {}, 1000000);
  EXPECT_LT(a.records.back().volume, a.records.front().volume);
  EXPECT_NEAR(a.records.back().volume, b.records.back().volume, 1e-5);
}

TEST(EvolveCurve, FigureEightBlowsUp) {
  CurveStepperConfig cfg;
  cfg.max_dt = 1e-4;
  const auto res = evolve_curve(curves::figure_eight(64, 1.0), 1.0, cfg, {}, 1000);
  EXPECT_TRUE(res.blowup);
  EXPECT_GT(res.blowup_time, 0.0);
  EXPECT_GT(res.blowup_sup, res.threshold);
  EXPECT_NEAR(res.threshold, 500.0, 1e-6);
}
