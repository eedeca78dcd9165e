#pragma once

// Periodic differentiation on the uniform chart lattice: finite-difference
// stencils applied axis by axis, or Fourier differentiation through FFTW.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "lagflow/tensor.hpp"

namespace lagflow {

enum class Scheme { central2, central4, spectral };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::central2: return "central2";
    case Scheme::central4: return "central4";
    case Scheme::spectral: return "spectral";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "central2") return Scheme::central2;
  if (s == "central4") return Scheme::central4;
  if (s == "spectral") return Scheme::spectral;
  throw std::invalid_argument("unknown differentiation scheme '" + s + "'");
}

using MultiOrder = std::array<int, 3>;

namespace detail {

struct Stencil {
  int radius = 0;
  std::array<double, 7> w{};  // offsets -radius..radius
};

// Unscaled weights; the caller divides by h^order.
inline const Stencil& central_stencil(Scheme s, int order) {
  static const std::array<Stencil, 5> c2 = {{
      {0, {1.0}},
      {1, {-0.5, 0.0, 0.5}},
      {1, {1.0, -2.0, 1.0}},
      {2, {-0.5, 1.0, 0.0, -1.0, 0.5}},
      {2, {1.0, -4.0, 6.0, -4.0, 1.0}},
  }};
  static const std::array<Stencil, 5> c4 = {{
      {0, {1.0}},
      {2, {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12}},
      {2, {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12}},
      {3, {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8}},
      {3, {-1.0 / 6, 2.0, -6.5, 28.0 / 3, -6.5, 2.0, -1.0 / 6}},
  }};
  if (order < 0 || order > 4)
    throw std::invalid_argument("stencil schemes support derivative orders 0..4 per axis");
  return s == Scheme::central2 ? c2[static_cast<std::size_t>(order)] : c4[static_cast<std::size_t>(order)];
}

struct FftwPlan {
  int dim;
  int m;
  std::size_t real_size;
  std::size_t complex_size;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftwPlan(int n, int nodes) : dim(n), m(nodes) {
    real_size = static_cast<std::size_t>(ipow(m, dim));
    complex_size = real_size / static_cast<std::size_t>(m) * static_cast<std::size_t>(m / 2 + 1);
    real = fftw_alloc_real(real_size);
    spec = fftw_alloc_complex(complex_size);
    std::array<int, 3> dims{m, m, m};
    forward = fftw_plan_dft_r2c(dim, dims.data(), real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r(dim, dims.data(), spec, real, FFTW_ESTIMATE);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    fftw_destroy_plan(backward);
    fftw_destroy_plan(forward);
    fftw_free(spec);
    fftw_free(real);
  }
};

}  // namespace detail

/// Periodic derivative operator on an m^n lattice of spacing 2pi/m.
///
/// Mixed partials are built as products of one-dimensional operators, so
/// d_i d_j f and d_j d_i f are the same floating point computation.
/// Not safe for concurrent use of one instance (shared FFT buffers); use
/// `differentiator_for`, which hands out one instance per thread.
class Differentiator {
 public:
  Differentiator(int dim, int m, Scheme scheme) : dim_(dim), m_(m), scheme_(scheme) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Differentiator: dimension must be 1..3");
    if (m < 8) throw std::invalid_argument("Differentiator: need m >= 8");
  }

  int dim() const { return dim_; }
  int m() const { return m_; }
  Scheme scheme() const { return scheme_; }
  double spacing() const { return 2.0 * std::numbers::pi / m_; }
  std::size_t size() const { return static_cast<std::size_t>(ipow(m_, dim_)); }

  std::vector<double> apply(std::span<const double> f, const MultiOrder& orders) const {
    return apply_many(f, std::span<const MultiOrder>(&orders, 1)).front();
  }

  /// Several derivatives of one field (one forward transform in the spectral case).
  std::vector<std::vector<double>> apply_many(std::span<const double> f,
                                              std::span<const MultiOrder> orders) const {
    check_size(f);
    std::vector<std::vector<double>> out;
    out.reserve(orders.size());
    if (scheme_ == Scheme::spectral) {
      forward(f);
      const std::vector<std::complex<double>> hat(spectrum_begin(), spectrum_begin() + plan().complex_size);
      for (const auto& o : orders) {
        out.push_back(backward_with([&](const std::array<int, 3>& k, const std::array<bool, 3>& nyq) {
          std::complex<double> mult{1.0, 0.0};
          for (int a = 0; a < dim_; ++a) {
            const int p = o[static_cast<std::size_t>(a)];
            if (p == 0) continue;
            if (nyq[static_cast<std::size_t>(a)] && (p % 2 == 1)) return std::complex<double>{};
            const std::complex<double> ik{0.0, static_cast<double>(k[static_cast<std::size_t>(a)])};
            for (int r = 0; r < p; ++r) mult *= ik;
          }
          return mult;
        }, hat));
      }
    } else {
      for (const auto& o : orders) {
        std::vector<double> cur(f.begin(), f.end());
        for (int a = 0; a < dim_; ++a) {
          const int p = o[static_cast<std::size_t>(a)];
          if (p > 0) cur = stencil_axis(cur, a, p);
        }
        out.push_back(std::move(cur));
      }
    }
    return out;
  }

  /// Fourier multiplier with a real symbol of the integer wavevector; independent of the
  /// differentiation scheme.
  template <class Symbol>
  std::vector<double> apply_symbol(std::span<const double> f, Symbol&& symbol) const {
    check_size(f);
    forward(f);
    const std::vector<std::complex<double>> hat(spectrum_begin(), spectrum_begin() + plan().complex_size);
    return backward_with([&](const std::array<int, 3>& k, const std::array<bool, 3>&) {
      return std::complex<double>{symbol(k), 0.0};
    }, hat);
  }

  /// Forward transform normalized so that a real mode cos(k.x) has coefficient 1/2 at +-k.
  std::vector<std::complex<double>> spectrum(std::span<const double> f) const {
    check_size(f);
    forward(f);
    std::vector<std::complex<double>> hat(spectrum_begin(), spectrum_begin() + plan().complex_size);
    const double norm = 1.0 / static_cast<double>(size());
    for (auto& c : hat) c *= norm;
    return hat;
  }

  /// Integer wavevector of a half-spectrum slot (axis 0 is the halved FFTW axis).
  std::array<int, 3> wavevector(std::size_t slot, std::array<bool, 3>* nyquist = nullptr) const {
    const int half = m_ / 2 + 1;
    std::array<int, 3> k{};
    std::array<bool, 3> nyq{};
    const int j0 = static_cast<int>(slot % static_cast<std::size_t>(half));
    std::size_t rest = slot / static_cast<std::size_t>(half);
    k[0] = j0;
    nyq[0] = (m_ % 2 == 0) && j0 == m_ / 2;
    for (int a = 1; a < dim_; ++a) {
      const int j = static_cast<int>(rest % static_cast<std::size_t>(m_));
      rest /= static_cast<std::size_t>(m_);
      k[static_cast<std::size_t>(a)] = j <= m_ / 2 ? j : j - m_;
      nyq[static_cast<std::size_t>(a)] = (m_ % 2 == 0) && j == m_ / 2;
    }
    if (nyquist) *nyquist = nyq;
    return k;
  }

 private:
  int dim_;
  int m_;
  Scheme scheme_;
  mutable std::unique_ptr<detail::FftwPlan> plan_;

  void check_size(std::span<const double> f) const {
    if (f.size() != size()) throw std::invalid_argument("Differentiator: field size does not match grid");
  }

  detail::FftwPlan& plan() const {
    if (!plan_) plan_ = std::make_unique<detail::FftwPlan>(dim_, m_);
    return *plan_;
  }

  const std::complex<double>* spectrum_begin() const {
    return reinterpret_cast<const std::complex<double>*>(plan().spec);
  }

  void forward(std::span<const double> f) const {
    auto& p = plan();
    std::copy(f.begin(), f.end(), p.real);
    fftw_execute(p.forward);
  }

  template <class Mult>
  std::vector<double> backward_with(Mult&& mult, const std::vector<std::complex<double>>& hat) const {
    auto& p = plan();
    auto* spec = reinterpret_cast<std::complex<double>*>(p.spec);
    const double norm = 1.0 / static_cast<double>(size());
    for (std::size_t s = 0; s < p.complex_size; ++s) {
      std::array<bool, 3> nyq{};
      const auto k = wavevector(s, &nyq);
      spec[s] = hat[s] * mult(k, nyq) * norm;
    }
    fftw_execute(p.backward);
    return std::vector<double>(p.real, p.real + p.real_size);
  }

  std::vector<double> stencil_axis(const std::vector<double>& f, int axis, int order) const {
    const auto& st = detail::central_stencil(scheme_, order);
    double scale = 1.0;
    for (int i = 0; i < order; ++i) scale /= spacing();
    const std::size_t stride = static_cast<std::size_t>(ipow(m_, axis));
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> out(f.size());
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      const long c = static_cast<long>((idx / stride) % mm);
      const std::size_t base = idx - static_cast<std::size_t>(c) * stride;
      double s = 0.0;
      for (int o = -st.radius; o <= st.radius; ++o) {
        const double w = st.w[static_cast<std::size_t>(o + st.radius)];
        if (w == 0.0) continue;
        const long cc = ((c + o) % m_ + m_) % m_;
        s += w * f[base + static_cast<std::size_t>(cc) * stride];
      }
      out[idx] = s * scale;
    }
    return out;
  }
};

/// Per-thread cached differentiator for a lattice shape.
inline const Differentiator& differentiator_for(int dim, int m, Scheme scheme) {
  thread_local std::map<std::tuple<int, int, int>, std::unique_ptr<Differentiator>> cache;
  auto key = std::make_tuple(dim, m, static_cast<int>(scheme));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Differentiator>(dim, m, scheme)).first;
  return *it->second;
}

}  // namespace lagflow
