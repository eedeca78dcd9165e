#pragma once

// Differential geometry of a Lagrangian graph (x, dphi(x)) in a Darboux chart:
// jets of the potential, induced metric and Christoffel symbols, second
// fundamental form with two covariant derivatives, mean curvature components,
// div(JH) and the Lagrangian angle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lagflow/ambient.hpp"
#include "lagflow/differentiation.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/grid.hpp"
#include "lagflow/tensor.hpp"

namespace lagflow {

namespace detail {

/// Per-axis derivative counts of a flat multi-index t in [0, n^k), digits most significant first.
inline MultiOrder index_counts(std::size_t t, int n, int k) {
  MultiOrder c{};
  for (int r = 0; r < k; ++r) {
    ++c[t % static_cast<std::size_t>(n)];
    t /= static_cast<std::size_t>(n);
  }
  return c;
}

inline std::array<double, 3> node_position(int dim, int m, std::size_t node) {
  std::array<double, 3> x{};
  const double h = 2.0 * std::numbers::pi / m;
  for (int a = 0; a < dim; ++a) {
    x[static_cast<std::size_t>(a)] = static_cast<double>(node % static_cast<std::size_t>(m)) * h;
    node /= static_cast<std::size_t>(m);
  }
  return x;
}

/// Differentiate each of `count` interleaved node-major fields (stride `count`) along every axis.
/// Result layout: out[node * count * n + c * n + p] = d_p field_c.
inline std::vector<double> gradient_of_components(const Differentiator& diff, std::span<const double> data,
                                                  std::size_t count) {
  const int n = diff.dim();
  const std::size_t nodes = diff.size();
  std::vector<double> out(nodes * count * static_cast<std::size_t>(n));
  std::vector<MultiOrder> orders(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) orders[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)] = 1;
  std::vector<double> field(nodes);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t v = 0; v < nodes; ++v) field[v] = data[v * count + c];
    const auto ders = diff.apply_many(field, orders);
    for (int p = 0; p < n; ++p)
      for (std::size_t v = 0; v < nodes; ++v)
        out[(v * count + c) * static_cast<std::size_t>(n) + static_cast<std::size_t>(p)] =
            ders[static_cast<std::size_t>(p)][v];
  }
  return out;
}

/// |T|_g^2 for a rank-r covariant tensor at one node (all indices contracted with g^-1).
inline double tensor_norm_sq(std::span<const double> t, const SmallMatrix& ginv, int rank) {
  const int n = ginv.n;
  std::vector<double> u(t.begin(), t.end()), w(u.size());
  // Raise index r (digit position r from the most significant end) one at a time.
  for (int r = 0; r < rank; ++r) {
    const std::size_t inner = static_cast<std::size_t>(ipow(n, rank - 1 - r));
    const std::size_t outer = static_cast<std::size_t>(ipow(n, r));
    for (std::size_t o = 0; o < outer; ++o)
      for (int a = 0; a < n; ++a)
        for (std::size_t in = 0; in < inner; ++in) {
          double s = 0.0;
          for (int b = 0; b < n; ++b)
            s += ginv(a, b) * u[(o * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)) * inner + in];
          w[(o * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)) * inner + in] = s;
        }
    std::swap(u, w);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += t[i] * u[i];
  return s;
}

}  // namespace detail

/// Derivatives of orders 1-4 of the potential, node-major, full (symmetric) index storage.
struct JetField {
  int dim = 1;
  int m = 8;
  Scheme scheme = Scheme::central2;
  std::vector<double> d1, d2, d3, d4;

  std::size_t nodes() const { return static_cast<std::size_t>(ipow(m, dim)); }
  std::span<const double> grad(std::size_t v) const { return {d1.data() + v * dim, static_cast<std::size_t>(dim)}; }
  SmallMatrix hessian(std::size_t v) const {
    return SmallMatrix::from({d2.data() + v * dim * dim, static_cast<std::size_t>(dim * dim)}, dim);
  }
  std::span<const double> third(std::size_t v) const {
    const auto s = static_cast<std::size_t>(ipow(dim, 3));
    return {d3.data() + v * s, s};
  }
  std::span<const double> fourth(std::size_t v) const {
    const auto s = static_cast<std::size_t>(ipow(dim, 4));
    return {d4.data() + v * s, s};
  }
  const Differentiator& differentiator() const { return differentiator_for(dim, m, scheme); }
};

inline JetField compute_jets(const PotentialGrid& grid, Scheme scheme) {
  grid.validate();
  const int n = grid.dim;
  JetField jet;
  jet.dim = n;
  jet.m = grid.m;
  jet.scheme = scheme;
  const std::size_t nodes = grid.size();
  const auto& diff = differentiator_for(n, grid.m, scheme);

  // One derivative per distinct per-axis count vector; permutations share it.
  std::vector<MultiOrder> unique;
  std::map<MultiOrder, std::size_t> slot;
  std::array<std::vector<std::size_t>, 5> field_of;
  for (int k = 1; k <= 4; ++k) {
    const std::size_t total = static_cast<std::size_t>(ipow(n, k));
    field_of[static_cast<std::size_t>(k)].resize(total);
    for (std::size_t t = 0; t < total; ++t) {
      const auto c = detail::index_counts(t, n, k);
      auto [it, inserted] = slot.emplace(c, unique.size());
      if (inserted) unique.push_back(c);
      field_of[static_cast<std::size_t>(k)][t] = it->second;
    }
  }
  const auto ders = diff.apply_many(grid.values, unique);

  std::array<std::vector<double>*, 5> dst{nullptr, &jet.d1, &jet.d2, &jet.d3, &jet.d4};
  for (int k = 1; k <= 4; ++k) {
    const std::size_t total = static_cast<std::size_t>(ipow(n, k));
    auto& out = *dst[static_cast<std::size_t>(k)];
    out.resize(nodes * total);
    for (std::size_t v = 0; v < nodes; ++v)
      for (std::size_t t = 0; t < total; ++t) out[v * total + t] = ders[field_of[static_cast<std::size_t>(k)][t]][v];
  }

  // Constant Hessian background: contributes Q x to D phi and Q to D^2 phi.
  const auto& q = grid.hessian_offset;
  bool has_offset = false;
  for (int i = 0; i < n * n; ++i) has_offset = has_offset || q.a[static_cast<std::size_t>(i)] != 0.0;
  if (has_offset) {
    for (std::size_t v = 0; v < nodes; ++v) {
      const auto x = grid.position(v);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          s += q(i, j) * x[static_cast<std::size_t>(j)];
          jet.d2[v * n * n + static_cast<std::size_t>(i * n + j)] += q(i, j);
        }
        jet.d1[v * n + static_cast<std::size_t>(i)] += s;
      }
    }
  }
  return jet;
}

/// Induced metric g, its inverse, Christoffel symbols Gamma^k_ij (stored [k][i][j]) and sqrt(det g).
struct ChartMetric {
  int dim = 1;
  std::vector<double> g, g_inv, christoffel, vol_elem;

  SmallMatrix metric(std::size_t v) const {
    return SmallMatrix::from({g.data() + v * dim * dim, static_cast<std::size_t>(dim * dim)}, dim);
  }
  SmallMatrix inverse_metric(std::size_t v) const {
    return SmallMatrix::from({g_inv.data() + v * dim * dim, static_cast<std::size_t>(dim * dim)}, dim);
  }
  double gamma(std::size_t v, int k, int i, int j) const {
    return christoffel[v * static_cast<std::size_t>(dim * dim * dim) + static_cast<std::size_t>((k * dim + i) * dim + j)];
  }
};

namespace detail {

/// Tangent frame components F_i^alpha of e_i = E_i + phi_ik E_{k+n} (row i, 2n columns).
inline std::array<double, 18> tangent_frame(const SmallMatrix& s) {
  const int n = s.n, N = 2 * n;
  std::array<double, 18> f{};
  for (int i = 0; i < n; ++i) {
    f[static_cast<std::size_t>(i * N + i)] = 1.0;
    for (int k = 0; k < n; ++k) f[static_cast<std::size_t>(i * N + n + k)] = s(i, k);
  }
  return f;
}

struct AmbientAtNode {
  std::array<double, 36> h{};
  std::array<double, 216> gamma{};
};

inline AmbientAtNode eval_ambient(const AmbientModel& amb, const JetField& jet, std::size_t v) {
  const int n = jet.dim, N = 2 * n;
  AmbientAtNode out;
  const auto x = node_position(jet.dim, jet.m, v);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  amb.metric_eval(xs, jet.grad(v), std::span<double>(out.h.data(), static_cast<std::size_t>(N * N)));
  amb.christoffel_eval(xs, jet.grad(v), std::span<double>(out.gamma.data(), static_cast<std::size_t>(N * N * N)));
  return out;
}

}  // namespace detail

inline ChartMetric induced_metric(const JetField& jet, const AmbientModel& ambient) {
  const int n = jet.dim, N = 2 * n;
  if (ambient.dim != n) throw std::invalid_argument("induced_metric: ambient dimension mismatch");
  const std::size_t nodes = jet.nodes();
  const std::size_t nn = static_cast<std::size_t>(n * n);
  ChartMetric cm;
  cm.dim = n;
  cm.g.resize(nodes * nn);
  cm.g_inv.resize(nodes * nn);
  cm.vol_elem.resize(nodes);
  const double cn = slope_constant(n);
  for (std::size_t v = 0; v < nodes; ++v) {
    const SmallMatrix s = jet.hessian(v);
    SmallMatrix g(n);
    if (ambient.flat) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = (i == j) ? 1.0 : 0.0;
          for (int k = 0; k < n; ++k) acc += s(i, k) * s(k, j);
          g(i, j) = acc;
        }
    } else {
      const auto amb = detail::eval_ambient(ambient, jet, v);
      const auto x = detail::node_position(n, jet.m, v);
      if (ambient.deviation_from_flat({x.data(), static_cast<std::size_t>(n)}, jet.grad(v)) >= cn)
        throw Error("ambient metric not admissible at node " + std::to_string(v) + " (||h - delta|| >= c_n)");
      const auto f = detail::tangent_frame(s);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
              acc += f[static_cast<std::size_t>(i * N + a)] * f[static_cast<std::size_t>(j * N + b)] *
                     amb.h[static_cast<std::size_t>(a * N + b)];
          g(i, j) = acc;
        }
    }
    SmallMatrix l;
    if (!cholesky(g, l))
      throw SingularGraphError(v, "induced metric not positive definite at node " + std::to_string(v));
    const SmallMatrix gi = inverse(g);
    g.copy_to({cm.g.data() + v * nn, nn});
    gi.copy_to({cm.g_inv.data() + v * nn, nn});
    cm.vol_elem[v] = std::sqrt(determinant(g));
  }

  // Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), with d g from the lattice differentiator.
  const auto dg = detail::gradient_of_components(jet.differentiator(), cm.g, nn);
  const std::size_t n3 = static_cast<std::size_t>(n * n * n);
  cm.christoffel.assign(nodes * n3, 0.0);
  auto dgv = [&](std::size_t v, int i, int j, int p) {
    return dg[(v * nn + static_cast<std::size_t>(i * n + j)) * static_cast<std::size_t>(n) + static_cast<std::size_t>(p)];
  };
  for (std::size_t v = 0; v < nodes; ++v) {
    const SmallMatrix gi = cm.inverse_metric(v);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) acc += gi(k, l) * (dgv(v, j, l, i) + dgv(v, i, l, j) - dgv(v, i, j, l));
          acc *= 0.5;
          cm.christoffel[v * n3 + static_cast<std::size_t>((k * n + i) * n + j)] = acc;
          cm.christoffel[v * n3 + static_cast<std::size_t>((k * n + j) * n + i)] = acc;
        }
  }
  return cm;
}

/// Second fundamental form A_ijl = <nabla~_{e_i} e_j, J e_l> and its covariant derivatives,
/// as literal components in the frame e_i / J e_l.
struct SecondFormField {
  int dim = 1;
  int levels = 2;  // highest covariant derivative populated
  std::vector<double> A, gradA, grad2A;
  std::vector<double> normA, normDA, normD2A;
};

inline SecondFormField second_form(const JetField& jet, const ChartMetric& metric, const AmbientModel& ambient,
                                   int levels = 2) {
  const int n = jet.dim, N = 2 * n;
  const std::size_t nodes = jet.nodes();
  const std::size_t n3 = static_cast<std::size_t>(ipow(n, 3)), n4 = n3 * n, n5 = n4 * n;
  SecondFormField sf;
  sf.dim = n;
  sf.levels = levels;
  if (ambient.flat) {
    sf.A = jet.d3;
  } else {
    sf.A.resize(nodes * n3);
    for (std::size_t v = 0; v < nodes; ++v) {
      const SmallMatrix s = jet.hessian(v);
      const auto f = detail::tangent_frame(s);
      const auto amb = detail::eval_ambient(ambient, jet, v);
      const auto d3 = jet.third(v);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          // W^b = F_i^a F_j^c Gamma~^b_ac: ambient part of nabla~_{e_i} e_j.
          std::array<double, 6> w{};
          for (int b = 0; b < N; ++b) {
            double acc = 0.0;
            for (int a = 0; a < N; ++a)
              for (int c = 0; c < N; ++c)
                acc += f[static_cast<std::size_t>(i * N + a)] * f[static_cast<std::size_t>(j * N + c)] *
                       amb.gamma[static_cast<std::size_t>((b * N + a) * N + c)];
            w[static_cast<std::size_t>(b)] = acc;
          }
          for (int l = 0; l < n; ++l) {
            // omega(e_l, E_{s+n}) = delta_sl, omega(e_l, E_s) = -phi_sl
            double acc = d3[static_cast<std::size_t>((i * n + j) * n + l)] + w[static_cast<std::size_t>(n + l)];
            for (int q = 0; q < n; ++q) acc -= s(q, l) * w[static_cast<std::size_t>(q)];
            sf.A[v * n3 + static_cast<std::size_t>((i * n + j) * n + l)] = acc;
          }
        }
    }
  }

  const auto& diff = jet.differentiator();
  auto covariant = [&](const std::vector<double>& t, int rank) {
    // (nabla T)_{p i1..ir} = d_p T_{i1..ir} - sum_s Gamma^q_{p i_s} T_{..q..}
    const std::size_t tr = static_cast<std::size_t>(ipow(n, rank));
    const auto dt = detail::gradient_of_components(diff, t, tr);
    std::vector<double> out(nodes * tr * static_cast<std::size_t>(n));
    for (std::size_t v = 0; v < nodes; ++v) {
      for (int p = 0; p < n; ++p)
        for (std::size_t idx = 0; idx < tr; ++idx) {
          double acc = dt[(v * tr + idx) * static_cast<std::size_t>(n) + static_cast<std::size_t>(p)];
          for (int slot = 0; slot < rank; ++slot) {
            const std::size_t stride = static_cast<std::size_t>(ipow(n, rank - 1 - slot));
            const int is = static_cast<int>((idx / stride) % static_cast<std::size_t>(n));
            const std::size_t base = idx - static_cast<std::size_t>(is) * stride;
            for (int q = 0; q < n; ++q)
              acc -= metric.gamma(v, q, p, is) * t[v * tr + base + static_cast<std::size_t>(q) * stride];
          }
          out[v * tr * static_cast<std::size_t>(n) + static_cast<std::size_t>(p) * tr + idx] = acc;
        }
    }
    return out;
  };
  if (levels >= 1) sf.gradA = covariant(sf.A, 3);
  if (levels >= 2) sf.grad2A = covariant(sf.gradA, 4);

  sf.normA.resize(nodes);
  if (levels >= 1) sf.normDA.resize(nodes);
  if (levels >= 2) sf.normD2A.resize(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    const SmallMatrix gi = metric.inverse_metric(v);
    sf.normA[v] = std::sqrt(std::max(0.0, detail::tensor_norm_sq({sf.A.data() + v * n3, n3}, gi, 3)));
    if (levels >= 1)
      sf.normDA[v] = std::sqrt(std::max(0.0, detail::tensor_norm_sq({sf.gradA.data() + v * n4, n4}, gi, 4)));
    if (levels >= 2)
      sf.normD2A[v] = std::sqrt(std::max(0.0, detail::tensor_norm_sq({sf.grad2A.data() + v * n5, n5}, gi, 5)));
  }
  return sf;
}

/// Mean curvature components H^a (H = H^a J e_a), velocity potential div(JH), Lagrangian angle.
struct MeanCurvatureField {
  int dim = 1;
  std::vector<double> H;      // node-major, n per node
  std::vector<double> divJH;  // empty until div_JH runs
  std::vector<double> theta;  // flat ambient only
};

/// h(H, J e_p) = g^ij phi_pij + ambient corrections, then H^a = g^ap h(H, J e_p).
inline MeanCurvatureField mean_curvature(const JetField& jet, const ChartMetric& metric, const AmbientModel& ambient) {
  const int n = jet.dim, N = 2 * n;
  const std::size_t nodes = jet.nodes();
  MeanCurvatureField mc;
  mc.dim = n;
  mc.H.resize(nodes * static_cast<std::size_t>(n));
  for (std::size_t v = 0; v < nodes; ++v) {
    const SmallMatrix gi = metric.inverse_metric(v);
    const SmallMatrix s = jet.hessian(v);
    const auto d3 = jet.third(v);
    std::array<double, 3> hp{};
    for (int p = 0; p < n; ++p) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += gi(i, j) * d3[static_cast<std::size_t>((p * n + i) * n + j)];
      hp[static_cast<std::size_t>(p)] = acc;
    }
    if (!ambient.flat) {
      const auto amb = detail::eval_ambient(ambient, jet, v);
      auto G = [&](int b, int a, int c) { return amb.gamma[static_cast<std::size_t>((b * N + a) * N + c)]; };
      for (int p = 0; p < n; ++p) {
        const int P = p + n;
        double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0, t6 = 0, t7 = 0, t8 = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double gij = gi(i, j);
            if (gij == 0.0) continue;
            t1 += gij * G(P, i, j);
            for (int mm = 0; mm < n; ++mm) {
              t2 += gij * s(mm, j) * G(P, i, mm + n);
              t3 += gij * s(mm, i) * G(P, mm + n, j);
              for (int r = 0; r < n; ++r) t4 += gij * s(mm, i) * s(r, j) * G(P, mm + n, r + n);
            }
            for (int q = 0; q < n; ++q) {
              t5 -= gij * G(q, i, j) * s(p, q);
              for (int mm = 0; mm < n; ++mm) {
                t6 -= gij * s(mm, j) * G(q, i, mm + n) * s(p, q);
                t7 -= gij * s(mm, i) * G(q, mm + n, j) * s(p, q);
                for (int r = 0; r < n; ++r) t8 -= gij * s(mm, i) * s(r, j) * G(q, mm + n, r + n) * s(p, q);
              }
            }
          }
        hp[static_cast<std::size_t>(p)] += t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8;
      }
    }
    for (int a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int p = 0; p < n; ++p) acc += gi(a, p) * hp[static_cast<std::size_t>(p)];
      mc.H[v * n + static_cast<std::size_t>(a)] = acc;
    }
  }
  return mc;
}

/// div(JH) = -d_a H^a - H^m Gamma^a_am. Stores into `mc.divJH` and returns it.
inline const std::vector<double>& div_JH(MeanCurvatureField& mc, const ChartMetric& metric, const JetField& jet) {
  const int n = jet.dim;
  const std::size_t nodes = jet.nodes();
  const auto dH = detail::gradient_of_components(jet.differentiator(), mc.H, static_cast<std::size_t>(n));
  mc.divJH.assign(nodes, 0.0);
  for (std::size_t v = 0; v < nodes; ++v) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a) acc -= dH[(v * n + static_cast<std::size_t>(a)) * n + static_cast<std::size_t>(a)];
    for (int mm = 0; mm < n; ++mm) {
      double tr = 0.0;
      for (int a = 0; a < n; ++a) tr += metric.gamma(v, a, a, mm);
      acc -= mc.H[v * n + static_cast<std::size_t>(mm)] * tr;
    }
    mc.divJH[v] = acc;
  }
  return mc.divJH;
}

/// Lagrangian angle theta = sum_i arctan(lambda_i(D^2 phi)); flat ambient only.
inline std::vector<double> theta_angle(const JetField& jet, const AmbientModel& ambient) {
  if (!ambient.flat) throw UnsupportedOperation("theta_angle requires a flat ambient model");
  const std::size_t nodes = jet.nodes();
  std::vector<double> theta(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto ev = symmetric_eigenvalues(jet.hessian(v));
    double t = 0.0;
    for (int i = 0; i < jet.dim; ++i) t += std::atan(ev[static_cast<std::size_t>(i)]);
    theta[v] = t;
  }
  return theta;
}

/// Laplace-Beltrami Delta_g f = g^ij d_ij f - g^ij Gamma^k_ij d_k f on the lattice.
inline std::vector<double> laplace_beltrami(std::span<const double> f, const ChartMetric& metric,
                                            const Differentiator& diff) {
  const int n = diff.dim();
  std::vector<MultiOrder> orders;
  for (int k = 0; k < n; ++k) {
    MultiOrder o{};
    o[static_cast<std::size_t>(k)] = 1;
    orders.push_back(o);
  }
  std::array<std::array<std::size_t, 3>, 3> second{};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      MultiOrder o{};
      ++o[static_cast<std::size_t>(i)];
      ++o[static_cast<std::size_t>(j)];
      second[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = orders.size();
      second[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = orders.size();
      orders.push_back(o);
    }
  const auto d = diff.apply_many(f, orders);
  std::vector<double> out(f.size());
  for (std::size_t v = 0; v < f.size(); ++v) {
    const SmallMatrix gi = metric.inverse_metric(v);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        acc += gi(i, j) * d[second[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]][v];
        for (int k = 0; k < n; ++k) acc -= gi(i, j) * metric.gamma(v, k, i, j) * d[static_cast<std::size_t>(k)][v];
      }
    out[v] = acc;
  }
  return out;
}

/// Largest tangent/vertical pairing max e.nu over g-unit tangents e and unit fiber directions nu,
/// i.e. sqrt(lambda_max) of the pencil (S^2, g) with S = D^2 phi. Returns the per-node values.
inline std::vector<double> tangent_slopes(const JetField& jet, const ChartMetric& metric) {
  const int n = jet.dim;
  const std::size_t nodes = jet.nodes();
  std::vector<double> slope(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    const SmallMatrix s = jet.hessian(v);
    const SmallMatrix s2 = s * s;
    SmallMatrix l;
    if (!cholesky(metric.metric(v), l)) throw SingularGraphError(v, "metric not positive definite");
    const SmallMatrix li = inverse(l);
    const SmallMatrix mtx = li * s2 * transpose(li);
    SmallMatrix sym(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sym(i, j) = 0.5 * (mtx(i, j) + mtx(j, i));
    const auto ev = symmetric_eigenvalues(sym);
    slope[v] = std::sqrt(std::max(0.0, ev[static_cast<std::size_t>(n - 1)]));
  }
  return slope;
}

/// Spectral-norm of D^2 phi at a node (for error reports).
inline double hessian_norm(const JetField& jet, std::size_t v) {
  const auto ev = symmetric_eigenvalues(jet.hessian(v));
  return std::max(std::abs(ev[0]), std::abs(ev[static_cast<std::size_t>(jet.dim - 1)]));
}

/// Jets, metric, mean curvature and div(JH) of one potential.
struct GraphGeometry {
  JetField jet;
  ChartMetric metric;
  MeanCurvatureField curvature;
};

inline GraphGeometry graph_geometry(const PotentialGrid& grid, const AmbientModel& ambient, Scheme scheme) {
  GraphGeometry geo;
  geo.jet = compute_jets(grid, scheme);
  geo.metric = induced_metric(geo.jet, ambient);
  geo.curvature = mean_curvature(geo.jet, geo.metric, ambient);
  div_JH(geo.curvature, geo.metric, geo.jet);
  return geo;
}

}  // namespace lagflow
