#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sbe/error.hpp"
#include "sbe/parallel.hpp"
#include "sbe/state.hpp"

namespace sbe {

/// Discrete Poincare constant of the centred gradient against the compact
/// Laplacian on the unit torus: ||grad phi|| <= C_P ||rho - rho_inf||.
inline constexpr double kPoincareConstant = 0.5 / std::numbers::pi;

struct Moments {
  std::vector<double> rho;
  std::vector<Velocity> j;
};

/// rho(x) = int f dv and j(x) = int v f dv, per cell.
inline Moments moments(const PhaseState& s) {
  const VelocityGrid& g = *s.vgrid;
  Moments m{std::vector<double>(s.cells()), std::vector<Velocity>(s.cells(), Velocity{0.0, 0.0})};
  parallel_for(s.cells(), [&](std::size_t x) {
    const auto fx = s.cell(x);
    m.rho[x] = integrate(fx, g);
    std::vector<double> tmp(g.size());
    for (int c = 0; c < g.dim; ++c) {
      for (std::size_t v = 0; v < g.size(); ++v) tmp[v] = g.nodes[v][c] * fx[v];
      m.j[x][c] = integrate(tmp, g);
    }
  });
  return m;
}

/// Centred difference (u_{i+1} - u_{i-1}) / (2 dx) on the periodic grid.
inline std::vector<double> centered_gradient(std::span<const double> u, const SpatialGrid& sg) {
  const std::size_t n = u.size();
  std::vector<double> g(n);
  const double inv = 0.5 / sg.spacing;
  for (std::size_t i = 0; i < n; ++i) g[i] = (u[(i + 1) % n] - u[(i + n - 1) % n]) * inv;
  return g;
}

/// In one dimension divergence and gradient share the centred stencil, which
/// is skew-adjoint: sum (grad a) b = -sum a (div b).
inline std::vector<double> centered_divergence(std::span<const double> u, const SpatialGrid& sg) {
  return centered_gradient(u, sg);
}

/// Compact Laplacian (u_{i+1} - 2 u_i + u_{i-1}) / dx^2.
inline std::vector<double> compact_laplacian(std::span<const double> u, const SpatialGrid& sg) {
  const std::size_t n = u.size();
  std::vector<double> l(n);
  const double inv = 1.0 / (sg.spacing * sg.spacing);
  for (std::size_t i = 0; i < n; ++i) l[i] = (u[(i + 1) % n] - 2.0 * u[i] + u[(i + n - 1) % n]) * inv;
  return l;
}

struct PoissonSolution {
  std::vector<double> phi;
  std::vector<double> grad_phi;
};

namespace detail {

inline std::vector<double> zero_mean_source(std::span<const double> rho, double rho_inf, const SpatialGrid& sg) {
  if (rho.size() != static_cast<std::size_t>(sg.cells)) throw InvalidArgument("poisson: source size mismatch");
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = rho[i] - rho_inf;
  const double mean = pairwise_sum(s) / static_cast<double>(s.size());
  if (std::abs(mean * sg.volume) > 1e-10)
    throw InvalidArgument("poisson: source has nonzero mean " + std::to_string(mean) + "; not solvable on the torus");
  for (double& v : s) v -= mean;
  return s;
}

inline void remove_mean(std::vector<double>& u) {
  const double mean = pairwise_sum(u) / static_cast<double>(u.size());
  for (double& v : u) v -= mean;
}

}  // namespace detail

/// Solves -Lap_h phi = rho - rho_inf with sum(phi) = 0 by direct elimination
/// of the cyclic tridiagonal system. The first differences d_i = phi_{i+1} -
/// phi_i satisfy d_i - d_{i-1} = -dx^2 s_i; periodicity fixes d_0.
inline PoissonSolution solve_poisson(std::span<const double> rho, double rho_inf, const SpatialGrid& sg) {
  const std::vector<double> s = detail::zero_mean_source(rho, rho_inf, sg);
  const std::size_t n = s.size();
  const double h2 = sg.spacing * sg.spacing;

  // c_i = sum_{k=1..i} h^2 s_k, so that d_i = d_0 - c_i.
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) c[i] = c[i - 1] + h2 * s[i];
  const double d0 = pairwise_sum(c) / static_cast<double>(n);

  PoissonSolution out;
  out.phi.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) out.phi[i + 1] = out.phi[i] + (d0 - c[i]);
  detail::remove_mean(out.phi);
  out.grad_phi = centered_gradient(out.phi, sg);
  return out;
}

/// Same discrete problem solved mode by mode with a direct DFT; the compact
/// Laplacian has symbol -(4/dx^2) sin^2(pi k / N). The zero mode is dropped.
inline PoissonSolution solve_poisson_spectral(std::span<const double> rho, double rho_inf, const SpatialGrid& sg) {
  const std::vector<double> s = detail::zero_mean_source(rho, rho_inf, sg);
  const std::size_t n = s.size();
  std::vector<double> cs(n), sn(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cs[k] = std::cos(a);
    sn[k] = std::sin(a);
  }
  std::vector<double> re(n, 0.0), im(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double r = 0.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = (k * i) % n;
      r += s[i] * cs[idx];
      q -= s[i] * sn[idx];
    }
    const double sk = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    const double symbol = 4.0 * sk * sk / (sg.spacing * sg.spacing);
    re[k] = r / symbol;
    im[k] = q / symbol;
  }
  PoissonSolution out;
  out.phi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t idx = (k * i) % n;
      acc += re[k] * cs[idx] - im[k] * sn[idx];
    }
    out.phi[i] = acc / static_cast<double>(n);
  }
  detail::remove_mean(out.phi);
  out.grad_phi = centered_gradient(out.phi, sg);
  return out;
}

/// Moments plus the Poisson potential of one state.
struct FieldSet {
  std::vector<double> rho;
  std::vector<Velocity> j;
  std::vector<double> phi;
  std::vector<double> grad_phi;
  double rho_inf = 0.0;
};

inline FieldSet compute_fields(const PhaseState& s, double rho_inf) {
  Moments m = moments(s);
  PoissonSolution p = solve_poisson(m.rho, rho_inf, s.sgrid);
  return FieldSet{std::move(m.rho), std::move(m.j), std::move(p.phi), std::move(p.grad_phi), rho_inf};
}

/// x-component of the current, the only one that couples to grad phi when d_x = 1.
inline std::vector<double> current_x(const std::vector<Velocity>& j) {
  std::vector<double> out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out[i] = j[i][0];
  return out;
}

/// Discrete L2(T) norm sqrt(sum u^2 dx).
inline double l2_norm(std::span<const double> u, const SpatialGrid& sg) {
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
  return std::sqrt(pairwise_sum(sq) * sg.spacing);
}

/// Discrete L2(T) inner product sum a b dx.
inline double l2_dot(std::span<const double> a, std::span<const double> b, const SpatialGrid& sg) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return pairwise_sum(p) * sg.spacing;
}

}  // namespace sbe
