#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sbe/error.hpp"

namespace sbe {

using Velocity = std::array<double, 2>;

/// Gaussian weight (2 pi)^(-d/2) exp(-|v|^2/2) in d = 1 or 2 dimensions.
inline double maxwellian(const Velocity& v, int dim) {
  const double e = dim == 1 ? v[0] * v[0] : v[0] * v[0] + v[1] * v[1];
  const double norm = dim == 1 ? 1.0 / std::sqrt(2.0 * std::numbers::pi) : 1.0 / (2.0 * std::numbers::pi);
  return norm * std::exp(-0.5 * e);
}

/// Truncated, cell-centred velocity lattice on [-L, L]^d with midpoint weights.
///
/// Nodes are ordered so that node `size() - 1 - i` is the exact negation of
/// node i; moments of odd integrands therefore cancel pairwise without
/// rounding. Immutable after construction.
struct VelocityGrid {
  int dim = 1;
  double half_width = 0.0;
  int nodes_per_axis = 0;
  double spacing = 0.0;
  std::vector<Velocity> nodes;
  std::vector<double> weights;
  std::vector<double> maxwellian;
  /// Gaussian mass outside the box, 1 - erf(L/sqrt 2)^d.
  double tail_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
  std::size_t mirror(std::size_t i) const { return nodes.size() - 1 - i; }
  /// Upper bound on |v_1| over the lattice, used by the transport CFL limit.
  double speed_bound() const { return half_width; }
  double box_volume() const { return std::pow(2.0 * half_width, dim); }
};

inline VelocityGrid build_velocity_grid(int dim, double half_width, int nodes_per_axis) {
  if (dim != 1 && dim != 2) throw InvalidArgument("velocity dimension must be 1 or 2");
  if (!(half_width > 0.0)) throw InvalidArgument("velocity half width must be positive");
  if (half_width < 4.0) throw InvalidArgument("velocity half width below 4 leaves too much Gaussian tail mass");
  if (nodes_per_axis < 8 || nodes_per_axis % 2 != 0)
    throw InvalidArgument("nodes_per_axis must be even and >= 8, got " + std::to_string(nodes_per_axis));

  VelocityGrid g;
  g.dim = dim;
  g.half_width = half_width;
  g.nodes_per_axis = nodes_per_axis;
  g.spacing = 2.0 * half_width / nodes_per_axis;

  // Build |v| from the integer index so that the two halves are exact negations.
  const int half = nodes_per_axis / 2;
  std::vector<double> axis(nodes_per_axis);
  for (int k = 0; k < half; ++k) {
    const double m = (2 * (half - k) - 1) * 0.5 * g.spacing;
    axis[k] = -m;
    axis[nodes_per_axis - 1 - k] = m;
  }

  const double cell = std::pow(g.spacing, dim);
  if (dim == 1) {
    for (double a : axis) g.nodes.push_back({a, 0.0});
  } else {
    for (double a : axis)
      for (double b : axis) g.nodes.push_back({a, b});
  }
  g.weights.assign(g.nodes.size(), cell);
  g.maxwellian.reserve(g.nodes.size());
  for (const auto& v : g.nodes) g.maxwellian.push_back(sbe::maxwellian(v, dim));

  const double outside_1d = std::erfc(half_width / std::numbers::sqrt2);
  g.tail_mass = -std::expm1(dim * std::log1p(-outside_1d));
  return g;
}

/// Midpoint quadrature sum_i values_i w_i, accumulated over mirror pairs so
/// that odd integrands give exactly zero.
inline double integrate(std::span<const double> values, const VelocityGrid& grid) {
  const std::size_t n = grid.size();
  if (values.size() != n)
    throw InvalidArgument("integrate: expected " + std::to_string(n) + " values, got " +
                          std::to_string(values.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t m = n - 1 - i;
    acc += values[i] * grid.weights[i] + values[m] * grid.weights[m];
  }
  return acc;
}

/// Sum of M(v_i) w_i; differs from 1 by the tail mass plus the quadrature defect.
inline double maxwellian_mass(const VelocityGrid& grid) { return integrate(grid.maxwellian, grid); }

}  // namespace sbe
