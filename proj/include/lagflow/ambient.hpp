#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>

#include "lagflow/tensor.hpp"

namespace lagflow {

/// Slope-condition constant c_n = 1 / (10 sqrt(n)).
inline double slope_constant(int n) { return 1.0 / (10.0 * std::sqrt(static_cast<double>(n))); }

/// Ambient Kahler metric in the Darboux chart, evaluated at (x, v) with v the fiber coordinate.
///
/// `metric_eval` fills a row-major 2n x 2n matrix h_ab; `christoffel_eval` fills
/// Gamma~^b_{ac} stored as [b][a][c]. Directions 0..n-1 are base directions E_i,
/// n..2n-1 the fiber directions E_{i+n}.
struct AmbientModel {
  using PointEval = std::function<void(std::span<const double> x, std::span<const double> v, std::span<double> out)>;

  int dim = 1;
  bool flat = true;
  PointEval metric_eval;
  PointEval christoffel_eval;

  static AmbientModel flat_model(int n) {
    AmbientModel a;
    a.dim = n;
    a.flat = true;
    a.metric_eval = [n](std::span<const double>, std::span<const double>, std::span<double> h) {
      const int N = 2 * n;
      for (int i = 0; i < N * N; ++i) h[static_cast<std::size_t>(i)] = 0.0;
      for (int i = 0; i < N; ++i) h[static_cast<std::size_t>(i * N + i)] = 1.0;
    };
    a.christoffel_eval = [n](std::span<const double>, std::span<const double>, std::span<double> g) {
      const int N = 2 * n;
      for (int i = 0; i < N * N * N; ++i) g[static_cast<std::size_t>(i)] = 0.0;
    };
    return a;
  }

  /// Conformally flat metric h = exp(2u) delta with Gamma~^b_{ac} = d_a u delta_bc + d_c u delta_ab - d_b u delta_ac.
  /// `u` and `grad_u` take the 2n ambient coordinates (x, v).
  static AmbientModel conformal(int n, std::function<double(std::span<const double>)> u,
                                std::function<void(std::span<const double>, std::span<double>)> grad_u) {
    AmbientModel a;
    a.dim = n;
    a.flat = false;
    const int N = 2 * n;
    a.metric_eval = [N, u](std::span<const double> x, std::span<const double> v, std::span<double> h) {
      std::array<double, 6> y{};
      for (int i = 0; i < N / 2; ++i) {
        y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(i + N / 2)] = v[static_cast<std::size_t>(i)];
      }
      const double e = std::exp(2.0 * u(std::span<const double>(y.data(), static_cast<std::size_t>(N))));
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) h[static_cast<std::size_t>(i * N + j)] = (i == j) ? e : 0.0;
    };
    a.christoffel_eval = [N, grad_u](std::span<const double> x, std::span<const double> v, std::span<double> g) {
      std::array<double, 6> y{};
      std::array<double, 6> du{};
      for (int i = 0; i < N / 2; ++i) {
        y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(i + N / 2)] = v[static_cast<std::size_t>(i)];
      }
      grad_u(std::span<const double>(y.data(), static_cast<std::size_t>(N)),
             std::span<double>(du.data(), static_cast<std::size_t>(N)));
      for (int b = 0; b < N; ++b)
        for (int p = 0; p < N; ++p)
          for (int c = 0; c < N; ++c) {
            double val = 0.0;
            if (b == c) val += du[static_cast<std::size_t>(p)];
            if (b == p) val += du[static_cast<std::size_t>(c)];
            if (p == c) val -= du[static_cast<std::size_t>(b)];
            g[static_cast<std::size_t>((b * N + p) * N + c)] = val;
          }
    };
    return a;
  }

  /// Frobenius distance ||h - delta|| at a point; chart admissibility needs it below c_n.
  double deviation_from_flat(std::span<const double> x, std::span<const double> v) const {
    const int N = 2 * dim;
    std::array<double, 36> h{};
    metric_eval(x, v, std::span<double>(h.data(), static_cast<std::size_t>(N * N)));
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double d = h[static_cast<std::size_t>(i * N + j)] - (i == j ? 1.0 : 0.0);
        s += d * d;
      }
    return std::sqrt(s);
  }
};

}  // namespace lagflow
