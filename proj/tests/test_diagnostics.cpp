#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lagflow/diagnostics.hpp"
#include "lagflow/presets.hpp"
#include "lagflow/scalar_flow.hpp"

using namespace lagflow;

namespace {

const double kPi = std::numbers::pi;

std::vector<DiagnosticsRecord> synthetic(std::size_t count, auto&& y_of_t, double sup = 1.0) {
  std::vector<DiagnosticsRecord> s(count);
  for (std::size_t i = 0; i < count; ++i) {
    s[i].time = 0.1 * static_cast<double>(i);
    s[i].a_norms = {1.0, y_of_t(s[i].time), 0.0};
    s[i].sup_A = sup;
  }
  return s;
}

}  // namespace

TEST(Snapshot, ZeroSection) {
  for (int n : {1, 2}) {
    const auto r = snapshot(PotentialGrid(n, 16), AmbientModel::flat_model(n), Scheme::spectral);
    EXPECT_NEAR(r.volume, std::pow(2.0 * kPi, n), 1e-12);
    EXPECT_EQ(r.dissipation, 0.0);
    for (double a : r.a_norms) EXPECT_EQ(a, 0.0);
    EXPECT_EQ(r.sup_A, 0.0);
    EXPECT_EQ(r.theta_residual, 0.0);
    EXPECT_EQ(r.slope_margin, slope_constant(n));
    EXPECT_TRUE(std::isnan(r.isoperimetric));
  }
}

TEST(Snapshot, QuadraticVolume) {
  const double c = 0.05;
  const auto r = snapshot(presets::quadratic(2, 16, c), AmbientModel::flat_model(2), Scheme::spectral);
  EXPECT_NEAR(r.volume, (1.0 + c * c) * 4.0 * kPi * kPi, 1e-12);
  EXPECT_NEAR(r.dissipation, 0.0, 1e-24);
}

TEST(Snapshot, TrigonometricQuadratureIsExact) {
  // Volume of phi = a sin x in 1D is int sqrt(1 + a^2 sin^2 x); compare with a fine reference.
  const double a = 0.05;
  const auto r = snapshot(presets::sine(1, 32, {1, 0, 0}, a), AmbientModel::flat_model(1), Scheme::spectral);
  double ref = 0.0;
  const int N = 4096;
  for (int i = 0; i < N; ++i) {
    const double x = 2.0 * kPi * i / N;
    ref += std::sqrt(1.0 + a * a * std::sin(x) * std::sin(x)) * 2.0 * kPi / N;
  }
  EXPECT_NEAR(r.volume, ref, 1e-12);
}

TEST(Snapshot, UnitCircle) {
  const auto r = snapshot(curves::circle(256, 1.0));
  EXPECT_NEAR(r.volume, 2.0 * kPi, 1e-3);
  EXPECT_NEAR(r.a_norms[0], 2.0 * kPi, 1e-2);
  EXPECT_NEAR(r.dissipation, 0.0, 1e-20);
  EXPECT_NEAR(r.isoperimetric, 1.0, 1e-3);
  EXPECT_TRUE(std::isnan(r.slope_margin));
}

TEST(Snapshot, PureFunction) {
  const auto g = presets::band_limited(2, 16, 0.002, 3, 9);
  const auto a = snapshot(g, AmbientModel::flat_model(2), Scheme::spectral);
  const auto b = snapshot(g, AmbientModel::flat_model(2), Scheme::spectral);
  EXPECT_EQ(a.volume, b.volume);
  EXPECT_EQ(a.dissipation, b.dissipation);
  EXPECT_EQ(a.a_norms, b.a_norms);
  EXPECT_EQ(a.theta_residual, b.theta_residual);
}

TEST(Snapshot, MeanZeroOnSpectralJets) {
  for (int n : {1, 2}) {
    const auto r = snapshot(presets::band_limited(n, 32, 0.002, 4, 21), AmbientModel::flat_model(n), Scheme::spectral);
    EXPECT_LE(std::abs(r.meanzero_residual) / r.meanzero_abs, 1e-6);
  }
}

TEST(DissipationCheck, Errors) {
  std::vector<DiagnosticsRecord> two(2);
  EXPECT_THROW(dissipation_check(two), Error);
  std::vector<DiagnosticsRecord> bad(3);
  bad[1].time = 1.0;
  bad[2].time = 0.5;
  EXPECT_THROW(dissipation_check(bad), Error);
}

TEST(DissipationCheck, StationaryRunIsRoundoff) {
  StepperConfig cfg;
  cfg.max_dt = 1e-3;
  const auto res = evolve(FlowState(presets::quadratic(1, 32, 0.05)), 0.01, cfg, AmbientModel::flat_model(1));
  EXPECT_LE(max_abs(dissipation_check(res.records)), 1e-12);
}

TEST(DissipationCheck, LinearRegimeResidualSmall) {
  StepperConfig cfg;
  cfg.max_dt = 1e-5;
  const double d = 1e-3;
  const auto res = evolve(FlowState(presets::sine(1, 32, {1, 0, 0}, d)), 2e-3, cfg, AmbientModel::flat_model(1), {}, 10);
  // dVol/dt ~ -pi d^2, so the residual must be well below that scale.
  EXPECT_LE(max_abs(dissipation_check(res.records)), 1e-3 * kPi * d * d);
}

TEST(Theta, ZeroAndQuadraticExact) {
  const auto flat = AmbientModel::flat_model(2);
  EXPECT_EQ(theta_pointwise_residual(graph_geometry(PotentialGrid(2, 16), flat, Scheme::spectral), flat), 0.0);
  EXPECT_EQ(theta_pointwise_residual(graph_geometry(presets::quadratic(2, 16, 0.05), flat, Scheme::central2), flat), 0.0);
}

TEST(Theta, CurvedAmbientUnsupported) {
  auto amb = AmbientModel::conformal(
      1, [](std::span<const double>) { return 0.0; },
      [](std::span<const double>, std::span<double> out) { for (double& o : out) o = 0.0; });
  const auto geo = graph_geometry(PotentialGrid(1, 16), amb, Scheme::spectral);
  EXPECT_THROW(theta_pointwise_residual(geo, amb), UnsupportedOperation);
}

TEST(Theta, TrajectoryResidualScalesWithAmplitude) {
  StepperConfig cfg;
  cfg.max_dt = 1e-5;
  std::vector<double> res;
  for (double d : {1e-3, 1e-4}) {
    FlowState s(presets::sine(1, 32, {1, 0, 0}, d));
    const auto s1 = step(s, cfg, AmbientModel::flat_model(1));
    res.push_back(theta_trajectory_residual(s.grid, s1.grid, Scheme::spectral));
  }
  EXPECT_GT(res[0] / res[1], 8.0);
  EXPECT_LT(res[0], 1e-3 * 1e-3);
}

TEST(Theta, TrajectoryResidualZeroForZero) {
  PotentialGrid a(1, 16), b(1, 16);
  b.time = 0.1;
  EXPECT_EQ(theta_trajectory_residual(a, b, Scheme::spectral), 0.0);
}

TEST(SlopeCheck, Values) {
  const auto flat1 = AmbientModel::flat_model(1);
  auto margin = [&](const PotentialGrid& g) {
    const auto jet = compute_jets(g, Scheme::spectral);
    return slope_check(jet, induced_metric(jet, flat1));
  };
  EXPECT_EQ(margin(PotentialGrid(1, 16)), 0.1);
  EXPECT_NEAR(margin(presets::quadratic(1, 16, 0.05)), 0.1 - 0.05 / std::sqrt(1.0 + 0.05 * 0.05), 1e-15);
  double prev = 1.0;
  for (double s : {0.0, 0.01, 0.02, 0.04, 0.08}) {
    const double m = margin(presets::quadratic(1, 16, s));
    EXPECT_LE(m, prev);
    prev = m;
  }
}

TEST(Gronwall, WindowTooShort) {
  EXPECT_THROW(gronwall_monitor(synthetic(9, [](double) { return 1.0; }), 2), Error);
}

TEST(Gronwall, StationaryPassesWithZeroC) {
  const auto rep = gronwall_monitor(synthetic(20, [](double) { return 1.0; }), 2);
  EXPECT_EQ(rep.status, GronwallReport::Status::pass);
  EXPECT_EQ(rep.C, 0.0);
}

TEST(Gronwall, ExponentialGrowthFitsRate) {
  const auto rep = gronwall_monitor(synthetic(40, [](double t) { return std::exp(0.5 * t); }), 2);
  EXPECT_EQ(rep.status, GronwallReport::Status::pass);
  EXPECT_GT(rep.C, 0.2);
  EXPECT_LT(rep.C, 0.5);
}

TEST(Gronwall, LateGrowthFails) {
  const auto rep = gronwall_monitor(synthetic(40, [](double t) { return t < 2.0 ? 1.0 + 0.01 * t : std::exp(5.0 * t); }), 2);
  EXPECT_EQ(rep.status, GronwallReport::Status::fail);
  EXPECT_GT(rep.violations, 0u);
}

TEST(Gronwall, AbstainsWhenCurvatureEscapes) {
  auto s = synthetic(20, [](double) { return 1.0; });
  s.back().sup_A = 5.0;
  EXPECT_EQ(gronwall_monitor(s, 2).status, GronwallReport::Status::abstain);
}
