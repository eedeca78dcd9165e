#pragma once

// Small dense helpers for the per-node n x n algebra (n <= 3).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>

namespace lagflow {

inline constexpr int kMaxDim = 3;

constexpr int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Row-major n x n matrix with n <= 3, stored inline.
struct SmallMatrix {
  int n = 0;
  std::array<double, 9> a{};

  SmallMatrix() = default;
  explicit SmallMatrix(int dim) : n(dim) {}

  static SmallMatrix identity(int dim) {
    SmallMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static SmallMatrix from(std::span<const double> src, int dim) {
    SmallMatrix m(dim);
    std::copy_n(src.begin(), dim * dim, m.a.begin());
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  void copy_to(std::span<double> dst) const { std::copy_n(a.begin(), n * n, dst.begin()); }
};

inline SmallMatrix operator*(const SmallMatrix& x, const SmallMatrix& y) {
  SmallMatrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      double s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

inline SmallMatrix transpose(const SmallMatrix& x) {
  SmallMatrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r(i, j) = x(j, i);
  return r;
}

inline double determinant(const SmallMatrix& m) {
  switch (m.n) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: throw std::invalid_argument("determinant: dimension must be 1..3");
  }
}

/// Inverse by cofactors. Caller guarantees nonsingularity.
inline SmallMatrix inverse(const SmallMatrix& m) {
  const double det = determinant(m);
  SmallMatrix r(m.n);
  switch (m.n) {
    case 1: r(0, 0) = 1.0 / det; break;
    case 2:
      r(0, 0) = m(1, 1) / det;
      r(0, 1) = -m(0, 1) / det;
      r(1, 0) = -m(1, 0) / det;
      r(1, 1) = m(0, 0) / det;
      break;
    case 3:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
          const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
          r(i, j) = (m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1)) / det;
        }
      break;
    default: throw std::invalid_argument("inverse: dimension must be 1..3");
  }
  return r;
}

/// Eigenvalues of a symmetric matrix in ascending order (entries past n are zero).
/// n <= 2 closed form; n = 3 trigonometric cubic with clamping of the acos argument.
inline std::array<double, 3> symmetric_eigenvalues(const SmallMatrix& m) {
  std::array<double, 3> ev{};
  if (m.n == 1) {
    ev[0] = m(0, 0);
  } else if (m.n == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double rad = std::hypot(half, m(0, 1));
    ev[0] = mean - rad;
    ev[1] = mean + rad;
  } else if (m.n == 3) {
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
    const double d0 = m(0, 0) - q, d1 = m(1, 1) - q, d2 = m(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if (p2 <= 0.0 || p2 < 1e-300) {
      ev = {m(0, 0), m(1, 1), m(2, 2)};
    } else {
      const double p = std::sqrt(p2 / 6.0);
      SmallMatrix b(3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
      const double r = std::clamp(determinant(b) / 2.0, -1.0, 1.0);
      const double phi = std::acos(r) / 3.0;
      const double e_hi = q + 2.0 * p * std::cos(phi);
      const double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
      ev = {e_lo, 3.0 * q - e_hi - e_lo, e_hi};
    }
    std::sort(ev.begin(), ev.end());
  } else {
    throw std::invalid_argument("symmetric_eigenvalues: dimension must be 1..3");
  }
  return ev;
}

/// Lower-triangular Cholesky factor; returns false if the matrix is not positive definite.
inline bool cholesky(const SmallMatrix& m, SmallMatrix& lower) {
  lower = SmallMatrix(m.n);
  for (int j = 0; j < m.n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > 0.0)) return false;
    lower(j, j) = std::sqrt(d);
    for (int i = j + 1; i < m.n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
    }
  }
  return true;
}

}  // namespace lagflow
