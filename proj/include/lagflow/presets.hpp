#pragma once

// Initial potentials for the scalar flow.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "lagflow/grid.hpp"

namespace lagflow::presets {

/// amp * sin(k . x).
inline PotentialGrid sine(int dim, int m, std::array<int, 3> k, double amp) {
  PotentialGrid g(dim, m);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto x = g.position(v);
    double phase = 0.0;
    for (int a = 0; a < dim; ++a) phase += k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    g.values[v] = amp * std::sin(phase);
  }
  return g;
}

/// phi = c |x|^2 / 2: no periodic part, constant Hessian c I.
inline PotentialGrid quadratic(int dim, int m, double c) {
  PotentialGrid g(dim, m);
  for (int i = 0; i < dim; ++i) g.hessian_offset(i, i) = c;
  return g;
}

/// Seeded band-limited field: random Fourier coefficients on |k|_inf <= modes with
/// 1/(1+|k|^2)^2 decay, scaled so that max |phi| = amp.
inline PotentialGrid band_limited(int dim, int m, double amp, int modes, std::uint64_t seed) {
  PotentialGrid g(dim, m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[static_cast<std::size_t>(a)] = -modes;
    hi[static_cast<std::size_t>(a)] = modes;
  }
  lo[0] = 0;  // half space; the conjugate mode adds nothing new for a real cos/sin pair
  for (int k2 = lo[2]; k2 <= hi[2]; ++k2)
    for (int k1 = lo[1]; k1 <= hi[1]; ++k1)
      for (int k0 = lo[0]; k0 <= hi[0]; ++k0) {
        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
        const double k2sum = double(k0 * k0 + k1 * k1 + k2 * k2);
        const double w = 1.0 / ((1.0 + k2sum) * (1.0 + k2sum));
        const double a = w * coef(rng), b = w * coef(rng);
        for (std::size_t v = 0; v < g.size(); ++v) {
          const auto x = g.position(v);
          const double ph = k0 * x[0] + k1 * x[1] + k2 * x[2];
          g.values[v] += a * std::cos(ph) + b * std::sin(ph);
        }
      }
  double mx = 0.0;
  for (double v : g.values) mx = std::max(mx, std::abs(v));
  if (mx > 0.0)
    for (double& v : g.values) v *= amp / mx;
  return g;
}

}  // namespace lagflow::presets
