#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbe/error.hpp"
#include "sbe/parallel.hpp"
#include "sbe/root_finding.hpp"
#include "sbe/state.hpp"
#include "sbe/velocity_grid.hpp"

namespace sbe {

inline constexpr double kDefaultKappaTol = 1e-14;
/// Residual above which a stalled kappa solve is reported as a failure.
inline constexpr double kKappaAcceptTol = 1e-11;

/// kappa M / (1 + kappa M), written so that it stays in (0, 1) for any kappa > 0.
inline double fermi_dirac(double kappa, double m) {
  const double km = kappa * m;
  return km / (1.0 + km);
}

/// Fermi-Dirac profile kappa M / (1 + kappa M) on a velocity grid.
struct EquilibriumProfile {
  double kappa = 0.0;
  std::vector<double> profile;
  double density = 0.0;
};

inline double density_of_kappa(double kappa, const VelocityGrid& grid) {
  if (!(kappa > 0.0)) throw InvalidArgument("density_of_kappa: kappa must be positive");
  double acc = 0.0;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t m = n - 1 - i;
    acc += fermi_dirac(kappa, grid.maxwellian[i]) * grid.weights[i] +
           fermi_dirac(kappa, grid.maxwellian[m]) * grid.weights[m];
  }
  return acc;
}

/// d/dkappa of density_of_kappa: the integral of M / (1 + kappa M)^2.
inline double density_derivative(double kappa, const VelocityGrid& grid) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = grid.maxwellian[i];
    const double d = 1.0 + kappa * m;
    acc += m / (d * d) * grid.weights[i];
  }
  return acc;
}

/// Saturation density: the discrete integral of f = 1.
inline double saturation_density(const VelocityGrid& grid) {
  double s = 0.0;
  for (double w : grid.weights) s += w;
  return s;
}

/// Inverts density_of_kappa. Brackets the root by doubling/halving from
/// `guess`, then runs bracketed Newton.
inline double solve_kappa(double target_density, const VelocityGrid& grid, double rel_tol = kDefaultKappaTol,
                          double guess = 1.0) {
  const double sat = saturation_density(grid);
  if (!(target_density > 0.0) || !(target_density < sat))
    throw SaturationError("density " + std::to_string(target_density) + " outside the admissible interval (0, " +
                          std::to_string(sat) + ")");
  if (!(guess > 0.0) || !std::isfinite(guess)) guess = 1.0;

  double lo = guess, hi = guess;
  const double g0 = density_of_kappa(guess, grid);
  if (g0 < target_density) {
    do {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw SaturationError("kappa bracket diverged: density too close to saturation");
    } while (density_of_kappa(hi, grid) < target_density);
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min()) throw SaturationError("kappa bracket collapsed to zero");
    } while (density_of_kappa(lo, grid) > target_density);
  }

  const auto eval = [&](double k) { return std::pair{density_of_kappa(k, grid), density_derivative(k, grid)}; };
  const RootResult r = newton_bisect(eval, target_density, lo, hi, guess, rel_tol * target_density);
  if (!r.converged && std::abs(r.residual) > std::max(rel_tol, kKappaAcceptTol) * target_density)
    throw SaturationError("kappa solve did not reach tolerance (residual " + std::to_string(r.residual) + ")");
  return r.x;
}

inline EquilibriumProfile make_profile(double kappa, const VelocityGrid& grid) {
  if (!(kappa > 0.0)) throw InvalidArgument("make_profile: kappa must be positive");
  EquilibriumProfile p;
  p.kappa = kappa;
  p.profile.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.profile[i] = fermi_dirac(kappa, grid.maxwellian[i]);
  p.density = integrate(p.profile, grid);
  return p;
}

/// Global equilibrium f_inf whose density is initial_mass / spatial_volume.
inline EquilibriumProfile global_equilibrium(double initial_mass, double spatial_volume, const VelocityGrid& grid,
                                             double rel_tol = kDefaultKappaTol) {
  if (!(spatial_volume > 0.0)) throw InvalidArgument("spatial volume must be positive");
  return make_profile(solve_kappa(initial_mass / spatial_volume, grid, rel_tol), grid);
}

inline EquilibriumProfile global_equilibrium(const PhaseState& s, double rel_tol = kDefaultKappaTol) {
  return global_equilibrium(total_mass(s), s.sgrid.volume, *s.vgrid, rel_tol);
}

/// Result of the local projection: the projected state plus per-cell kappa
/// and density.
struct Projection {
  PhaseState state;
  std::vector<double> kappa;
  std::vector<double> density;
};

/// Cellwise projection onto local Fermi-Dirac profiles with matching density.
/// Warm-starts from f.kappa_cache; the returned state's cache holds the new kappa.
inline Projection project_cells(const PhaseState& f, double rel_tol = kDefaultKappaTol) {
  const VelocityGrid& grid = *f.vgrid;
  Projection out{PhaseState(f.sgrid, f.vgrid), std::vector<double>(f.cells()), std::vector<double>(f.cells())};
  out.state.time = f.time;
  out.state.step = f.step;
  parallel_for(f.cells(), [&](std::size_t x) {
    const double rho = integrate(f.cell(x), grid);
    const double guess = x < f.kappa_cache.size() ? f.kappa_cache[x] : 1.0;
    const double kappa = solve_kappa(rho, grid, rel_tol, guess);
    auto dst = out.state.cell(x);
    for (std::size_t v = 0; v < grid.size(); ++v) dst[v] = fermi_dirac(kappa, grid.maxwellian[v]);
    out.kappa[x] = kappa;
    out.density[x] = rho;
  });
  out.state.kappa_cache = out.kappa;
  return out;
}

inline PhaseState project(const PhaseState& f, double rel_tol = kDefaultKappaTol) {
  return project_cells(f, rel_tol).state;
}

}  // namespace sbe
