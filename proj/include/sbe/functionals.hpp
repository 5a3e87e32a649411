#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/error.hpp"
#include "sbe/fields.hpp"
#include "sbe/parallel.hpp"
#include "sbe/state.hpp"

namespace sbe {

/// Weighted L2 norm sqrt(sum_x sum_v g^2 / M w_v dx) of a cell-major field.
inline double weighted_norm(std::span<const double> g, const SpatialGrid& sg, const VelocityGrid& vg) {
  const std::size_t nv = vg.size();
  if (g.size() != nv * static_cast<std::size_t>(sg.cells)) throw InvalidArgument("weighted_norm: size mismatch");
  std::vector<double> per_cell(static_cast<std::size_t>(sg.cells));
  parallel_for(per_cell.size(), [&](std::size_t x) {
    double acc = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      const double gv = g[x * nv + v];
      acc += gv * gv / vg.maxwellian[v] * vg.weights[v];
    }
    per_cell[x] = acc;
  });
  return std::sqrt(pairwise_sum(per_cell) * sg.spacing);
}

/// ||a - b|| in the weighted norm; both states must share grids.
inline double weighted_distance(const PhaseState& a, const PhaseState& b) {
  if (a.f.size() != b.f.size()) throw InvalidArgument("weighted_distance: state sizes differ");
  std::vector<double> d(a.f.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.f[i] - b.f[i];
  return weighted_norm(d, a.sgrid, *a.vgrid);
}

/// ||f - profile|| with the profile broadcast over all cells.
inline double weighted_distance(const PhaseState& a, std::span<const double> profile) {
  const std::size_t nv = a.velocities();
  if (profile.size() != nv) throw InvalidArgument("weighted_distance: profile size mismatch");
  std::vector<double> d(a.f.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.f[i] - profile[i % nv];
  return weighted_norm(d, a.sgrid, *a.vgrid);
}

namespace detail {

/// (1 + r) ln(1 + r) - r, accurate for small |r|.
inline double xlogx_excess(double r) {
  if (std::abs(r) < 0.1) {
    // sum_{n>=2} (-1)^n r^n / (n (n - 1))
    double term = r * r;
    double acc = 0.0;
    for (int k = 2; k < 40; ++k) {
      const double t = term / (k * (k - 1.0));
      acc += (k % 2 == 0) ? t : -t;
      if (std::abs(t) < 1e-18 * std::abs(acc)) break;
      term *= r;
    }
    return acc;
  }
  return (1.0 + r) * std::log1p(r) - r;
}

inline void check_open_unit(double f) {
  if (!(f > 0.0 && f < 1.0)) throw DomainError("entropy: f must lie strictly inside (0, 1)");
}

}  // namespace detail

/// Relative Fermi-Dirac entropy per node,
///   f ln(f/f_inf) + (1 - f) ln((1 - f)/(1 - f_inf)),
/// rewritten as a sum of two nonnegative terms so that it keeps full
/// relative precision as f -> f_inf.
inline double entropy_density(double f, double f_inf) {
  detail::check_open_unit(f);
  const double u = f - f_inf;
  const double r = u / f_inf;
  const double s = -u / (1.0 - f_inf);
  return f_inf * detail::xlogx_excess(r) + (1.0 - f_inf) * detail::xlogx_excess(s);
}

inline double entropy_H(const PhaseState& f, const EquilibriumProfile& f_inf) {
  const VelocityGrid& g = *f.vgrid;
  std::vector<double> per_cell(f.cells());
  parallel_for(f.cells(), [&](std::size_t x) {
    const auto fx = f.cell(x);
    double acc = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) acc += entropy_density(fx[v], f_inf.profile[v]) * g.weights[v];
    per_cell[x] = acc;
  });
  return pairwise_sum(per_cell) * f.sgrid.spacing;
}

/// Increasing scalar function chi used to build the entropy family H_chi.
struct Chi {
  std::function<double(double)> fn;
  std::string name;

  double operator()(double z) const { return fn(z); }

  /// chi(z) = ln(z / kappa_inf); H_chi is then the physical entropy H.
  static Chi log_ratio(double kappa_inf) {
    return Chi{[kappa_inf](double z) { return std::log(z / kappa_inf); }, "log_ratio"};
  }
  static Chi identity() {
    return Chi{[](double z) { return z; }, "identity"};
  }
  /// Piecewise-linear interpolation through strictly increasing samples,
  /// extended linearly beyond the table.
  static Chi tabulated(std::vector<double> z, std::vector<double> y) {
    if (z.size() < 2 || z.size() != y.size()) throw InvalidArgument("tabulated chi needs >= 2 matching samples");
    for (std::size_t i = 1; i < z.size(); ++i)
      if (!(z[i] > z[i - 1]) || !(y[i] > y[i - 1]))
        throw InvalidArgument("tabulated chi must be strictly increasing");
    return Chi{[z = std::move(z), y = std::move(y)](double q) {
                 std::size_t k = 1;
                 while (k + 1 < z.size() && q > z[k]) ++k;
                 const double t = (q - z[k - 1]) / (z[k] - z[k - 1]);
                 return y[k - 1] + t * (y[k] - y[k - 1]);
               },
               "tabulated"};
  }
};

/// F = f / (M (1 - f)); constant in v exactly at local equilibria.
inline double fugacity(double f, double m) { return f / (m * (1.0 - f)); }

/// H_chi with S_chi(z, v) the antiderivative of chi(z / (M (1 - z))) that
/// vanishes at z = f_inf(v); evaluated by 32-point Gauss-Legendre per node.
inline double entropy_Hchi(const PhaseState& f, const Chi& chi, const EquilibriumProfile& f_inf) {
  const VelocityGrid& g = *f.vgrid;
  std::vector<double> per_cell(f.cells());
  parallel_for(f.cells(), [&](std::size_t x) {
    const auto fx = f.cell(x);
    double acc = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      detail::check_open_unit(fx[v]);
      const double m = g.maxwellian[v];
      const auto integrand = [&](double z) { return chi(fugacity(z, m)); };
      const double lo = f_inf.profile[v];
      if (fx[v] == lo) continue;
      acc += boost::math::quadrature::gauss<double, 32>::integrate(integrand, lo, fx[v]) * g.weights[v];
    }
    per_cell[x] = acc;
  });
  return pairwise_sum(per_cell) * f.sgrid.spacing;
}

/// Entropy dissipation
///   1/2 sum_x sum_{v,v'} sigma M M' (1-f)(1-f') (F - F')(chi(F) - chi(F')) w w' dx,
/// summed over unordered pairs. Every term is nonnegative for increasing chi.
inline double dissipation_D(const PhaseState& f, const CollisionKernel& kernel, const Chi& chi) {
  const VelocityGrid& g = *f.vgrid;
  const std::size_t n = g.size();
  std::vector<double> per_cell(f.cells());
  parallel_for(f.cells(), [&](std::size_t x) {
    const auto fx = f.cell(x);
    std::vector<double> F(n), c(n), X(n);
    for (std::size_t i = 0; i < n; ++i) {
      detail::check_open_unit(fx[i]);
      const double m = g.maxwellian[i];
      F[i] = fugacity(fx[i], m);
      c[i] = m * (1.0 - fx[i]) * g.weights[i];
      X[i] = chi(F[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = kernel.matrix.data() + i * n;
      double inner = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) inner += row[j] * c[j] * (F[i] - F[j]) * (X[i] - X[j]);
      acc += c[i] * inner;
    }
    per_cell[x] = acc;
  });
  return pairwise_sum(per_cell) * f.sgrid.spacing;
}

/// Dissipation for the physical entropy, chi = ln(z / kappa_inf). The kappa_inf
/// shift cancels in chi(F) - chi(F').
inline double dissipation_D(const PhaseState& f, const CollisionKernel& kernel) {
  return dissipation_D(f, kernel, Chi::log_ratio(1.0));
}

/// int grad phi . j dx; with d_x = 1 only j_1 couples.
inline double pairing(const FieldSet& fields, const SpatialGrid& sg) {
  return l2_dot(fields.grad_phi, current_x(fields.j), sg);
}

inline double modified_entropy_E(double entropy, double delta, double pairing_value) {
  return entropy + delta * pairing_value;
}

/// E[f] = H[f] + delta int grad phi . j dx.
inline double modified_entropy_E(const PhaseState& f, double delta, const FieldSet& fields,
                                 const EquilibriumProfile& f_inf) {
  return modified_entropy_E(entropy_H(f, f_inf), delta, pairing(fields, f.sgrid));
}

}  // namespace sbe
