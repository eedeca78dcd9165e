#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "lagflow/errors.hpp"
#include "lagflow/tensor.hpp"

namespace lagflow {

/// Periodic uniform grid of the graph potential over [0, 2pi)^n.
///
/// Nodes are stored with axis 0 varying fastest. The potential is
/// phi(x) = x^T Q x / 2 + values(x), where Q = `hessian_offset` is a constant
/// symmetric background; only the periodic part lives on the grid.
struct PotentialGrid {
  int dim = 1;
  int m = 8;
  double time = 0.0;
  std::vector<double> values;
  SmallMatrix hessian_offset{1};

  PotentialGrid() = default;
  PotentialGrid(int n, int nodes_per_axis)
      : dim(n), m(nodes_per_axis), values(static_cast<std::size_t>(ipow(nodes_per_axis, n)), 0.0),
        hessian_offset(n) {}

  double spacing() const { return 2.0 * std::numbers::pi / m; }
  std::size_t size() const { return values.size(); }

  std::array<int, 3> coords(std::size_t node) const {
    std::array<int, 3> c{};
    for (int a = 0; a < dim; ++a) {
      c[static_cast<std::size_t>(a)] = static_cast<int>(node % static_cast<std::size_t>(m));
      node /= static_cast<std::size_t>(m);
    }
    return c;
  }

  std::array<double, 3> position(std::size_t node) const {
    const auto c = coords(node);
    std::array<double, 3> x{};
    for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] * spacing();
    return x;
  }

  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int a = dim - 1; a >= 0; --a) {
      const int wrapped = ((c[static_cast<std::size_t>(a)] % m) + m) % m;
      idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(wrapped);
    }
    return idx;
  }

  /// Throws GridError on bad shape or non-finite data.
  void validate() const {
    if (dim < 1 || dim > kMaxDim) throw GridError("grid dimension must be 1, 2 or 3");
    if (m < 8) throw GridError("grid needs at least 8 nodes per axis");
    if (values.size() != static_cast<std::size_t>(ipow(m, dim)))
      throw GridError("grid value count does not match m^n");
    if (hessian_offset.n != dim) throw GridError("hessian offset dimension mismatch");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (!std::isfinite(hessian_offset(i, j)) || hessian_offset(i, j) != hessian_offset(j, i))
          throw GridError("hessian offset must be finite and symmetric");
      }
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) {
        const auto c = coords(k);
        std::string where = "(";
        for (int a = 0; a < dim; ++a) where += (a ? "," : "") + std::to_string(c[static_cast<std::size_t>(a)]);
        throw GridError("non-finite potential value at node " + std::to_string(k) + " " + where + ")", k);
      }
    }
  }
};

/// Periodic lattice shift of the grid data: out(i) = in(i - shift).
inline PotentialGrid shifted(const PotentialGrid& g, const std::array<int, 3>& shift) {
  PotentialGrid out = g;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto c = g.coords(k);
    for (int a = 0; a < g.dim; ++a) c[static_cast<std::size_t>(a)] += shift[static_cast<std::size_t>(a)];
    out.values[g.index(c)] = g.values[k];
  }
  return out;
}

}  // namespace lagflow
