#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/error.hpp"
#include "sbe/parallel.hpp"
#include "sbe/state.hpp"

namespace sbe {

enum class TransportOrder { upwind1, muscl2 };
enum class Splitting { lie, strang };
/// Integrator used inside each substep. ssprk2 is a convex combination of
/// two forward Euler stages and inherits their bound preservation.
enum class TimeIntegrator { euler, ssprk2 };

struct SchemeConfig {
  double dt = 0.0;
  double cfl_safety = 0.9;
  TransportOrder transport_order = TransportOrder::upwind1;
  Splitting splitting = Splitting::strang;
  TimeIntegrator integrator = TimeIntegrator::ssprk2;
};

struct DtLimits {
  double transport = 0.0;
  double collision = 0.0;
  double max_dt() const { return std::min(transport, collision); }
};

namespace detail {

/// Largest Courant number |v| dt / dx for which the transport stage is monotone.
inline double courant_limit(TransportOrder order) { return order == TransportOrder::upwind1 ? 1.0 : 0.5; }

/// Largest dt for which f + dt Q(f) is nondecreasing in every f_i on [0, 1]^N:
/// -dQ_i/df_i <= sigma_+ (int M dv + M_i rho) <= sigma_+ (int M dv + rho_max).
inline double collision_monotone_dt(const CollisionKernel& k, const VelocityGrid& g) {
  return 1.0 / (k.sigma_plus * (maxwellian_mass(g) + saturation_density(g)));
}

}  // namespace detail

inline DtLimits cfl_limits(const PhaseState& s, const CollisionKernel& kernel, const SchemeConfig& cfg) {
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety < 1.0)) throw InvalidArgument("cfl_safety must lie in (0, 1)");
  DtLimits lim;
  lim.transport =
      cfg.cfl_safety * detail::courant_limit(cfg.transport_order) * s.sgrid.spacing / s.vgrid->speed_bound();
  lim.collision = cfg.cfl_safety * detail::collision_monotone_dt(kernel, *s.vgrid);
  return lim;
}

inline double cfl_max_dt(const PhaseState& s, const CollisionKernel& kernel, const SchemeConfig& cfg) {
  return cfl_limits(s, kernel, cfg).max_dt();
}

namespace detail {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

/// One forward-Euler transport stage for a single velocity node, periodic in x.
/// `c` is the signed Courant number v dt / dx.
inline void transport_stage(const std::vector<double>& u, double c, TransportOrder order, std::vector<double>& out) {
  const std::size_t n = u.size();
  auto at = [&](long long i) { return u[static_cast<std::size_t>((i % static_cast<long long>(n) + n) % n)]; };
  if (order == TransportOrder::upwind1) {
    const double a = std::abs(c);
    for (std::size_t x = 0; x < n; ++x) {
      const double up = c > 0.0 ? at(static_cast<long long>(x) - 1) : at(static_cast<long long>(x) + 1);
      out[x] = u[x] - a * (u[x] - up);
    }
    return;
  }
  // MUSCL with minmod slopes; face value at x + 1/2 taken from the upwind cell.
  std::vector<double> face(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto i = static_cast<long long>(x);
    if (c > 0.0)
      face[x] = at(i) + 0.5 * minmod(at(i) - at(i - 1), at(i + 1) - at(i));
    else
      face[x] = at(i + 1) - 0.5 * minmod(at(i + 1) - at(i), at(i + 2) - at(i + 1));
  }
  for (std::size_t x = 0; x < n; ++x) out[x] = u[x] - c * (face[x] - face[(x + n - 1) % n]);
}

}  // namespace detail

/// Advances v . grad_x f by dt with a conservative periodic upwind scheme,
/// independently for every velocity node.
inline PhaseState transport_step(PhaseState s, double dt, TransportOrder order = TransportOrder::upwind1,
                                 TimeIntegrator integrator = TimeIntegrator::euler) {
  if (!(dt >= 0.0)) throw InvalidArgument("transport_step: dt must be nonnegative");
  const double courant = dt * s.vgrid->speed_bound() / s.sgrid.spacing;
  if (courant > detail::courant_limit(order) * (1.0 + 1e-12))
    throw InvalidArgument("transport_step: CFL violation (Courant number " + std::to_string(courant) + ")");

  const std::size_t nx = s.cells(), nv = s.velocities();
  parallel_for(nv, [&](std::size_t v) {
    const double c = s.vgrid->nodes[v][0] * dt / s.sgrid.spacing;
    std::vector<double> u(nx), a(nx), b(nx);
    for (std::size_t x = 0; x < nx; ++x) u[x] = s.f[x * nv + v];
    detail::transport_stage(u, c, order, a);
    if (integrator == TimeIntegrator::ssprk2) {
      detail::transport_stage(a, c, order, b);
      for (std::size_t x = 0; x < nx; ++x) a[x] = 0.5 * (u[x] + b[x]);
    }
    for (std::size_t x = 0; x < nx; ++x) s.f[x * nv + v] = a[x];
  });
  return s;
}

/// f <- f + dt Q(f) in every cell (or its SSP-RK2 composition). Throws if
/// the result leaves [0, 1].
inline PhaseState collision_step(PhaseState s, const CollisionKernel& kernel, double dt,
                                 TimeIntegrator integrator = TimeIntegrator::euler) {
  if (!(dt >= 0.0)) throw InvalidArgument("collision_step: dt must be nonnegative");
  if (dt > detail::collision_monotone_dt(kernel, *s.vgrid) * (1.0 + 1e-12))
    throw InvalidArgument("collision_step: dt exceeds the monotonicity limit");
  const std::size_t nv = s.velocities();
  const VelocityGrid& g = *s.vgrid;
  parallel_for(s.cells(), [&](std::size_t x) {
    auto fx = s.cell(x);
    std::vector<double> q(nv), stage(fx.begin(), fx.end());
    apply_Q(stage, kernel, g, q);
    for (std::size_t v = 0; v < nv; ++v) stage[v] += dt * q[v];
    if (integrator == TimeIntegrator::ssprk2) {
      apply_Q(stage, kernel, g, q);
      for (std::size_t v = 0; v < nv; ++v) stage[v] = 0.5 * (fx[v] + (stage[v] + dt * q[v]));
    }
    for (std::size_t v = 0; v < nv; ++v) {
      if (!(stage[v] >= 0.0 && stage[v] <= 1.0))
        throw InvariantViolation("collision_step: f left [0, 1] at cell " + std::to_string(x) + ", node " +
                                 std::to_string(v));
      fx[v] = stage[v];
    }
  });
  return s;
}

/// One full step: Strang (T(dt/2) C(dt) T(dt/2)) or Lie (T(dt) C(dt)) splitting.
inline PhaseState step(PhaseState s, const CollisionKernel& kernel, const SchemeConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  const double limit = cfl_max_dt(s, kernel, cfg);
  if (cfg.dt > limit * (1.0 + 1e-12))
    throw InvalidArgument("step: dt " + std::to_string(cfg.dt) + " exceeds the stability limit " +
                          std::to_string(limit));
  if (cfg.splitting == Splitting::strang) {
    s = transport_step(std::move(s), 0.5 * cfg.dt, cfg.transport_order, cfg.integrator);
    s = collision_step(std::move(s), kernel, cfg.dt, cfg.integrator);
    s = transport_step(std::move(s), 0.5 * cfg.dt, cfg.transport_order, cfg.integrator);
  } else {
    s = transport_step(std::move(s), cfg.dt, cfg.transport_order, cfg.integrator);
    s = collision_step(std::move(s), kernel, cfg.dt, cfg.integrator);
  }
  s.time += cfg.dt;
  ++s.step;
  return s;
}

/// Fermi-Dirac envelope kappa_- M/(1+kappa_- M) <= f <= kappa_+ M/(1+kappa_+ M).
struct Sandwich {
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
};

/// Tightest envelope of a state: the range of F = f / (M (1 - f)).
inline Sandwich sandwich_of(const PhaseState& s) {
  Sandwich w{std::numeric_limits<double>::infinity(), 0.0};
  const VelocityGrid& g = *s.vgrid;
  for (std::size_t x = 0; x < s.cells(); ++x)
    for (std::size_t v = 0; v < g.size(); ++v) {
      const double f = s.at(x, v);
      if (!(f > 0.0 && f < 1.0)) throw DomainError("sandwich_of: f must lie strictly inside (0, 1)");
      const double F = f / (g.maxwellian[v] * (1.0 - f));
      w.kappa_minus = std::min(w.kappa_minus, F);
      w.kappa_plus = std::max(w.kappa_plus, F);
    }
  return w;
}

struct BoundCheck {
  std::size_t pauli_violations = 0;
  std::size_t sandwich_violations = 0;
  bool ok() const { return pauli_violations == 0 && sandwich_violations == 0; }
};

/// Counts nodes outside [0, 1] and outside the envelope widened by a relative slack.
inline BoundCheck check_bounds(const PhaseState& s, const Sandwich& w, double rel_slack = 1e-12) {
  BoundCheck out;
  const VelocityGrid& g = *s.vgrid;
  for (std::size_t x = 0; x < s.cells(); ++x)
    for (std::size_t v = 0; v < g.size(); ++v) {
      const double f = s.at(x, v);
      if (!(f >= 0.0 && f <= 1.0)) ++out.pauli_violations;
      const double lo = fermi_dirac(w.kappa_minus, g.maxwellian[v]);
      const double hi = fermi_dirac(w.kappa_plus, g.maxwellian[v]);
      if (f < lo * (1.0 - rel_slack) || f > hi * (1.0 + rel_slack)) ++out.sandwich_violations;
    }
  return out;
}

/// Initial data kappa(x) = kappa_bar (1 + a cos(2 pi x)) with an optional
/// multiplicative perturbation of the fugacity, F = kappa(x) (1 + p (2u - 1)),
/// u uniform from a seeded generator. Every such state is strictly inside (0, 1).
struct InitialData {
  double kappa_bar = 1.0;
  double amplitude = 0.5;
  double perturbation = 0.0;
  std::uint64_t seed = 1;
};

namespace detail {
/// Uniform double in [0, 1) from the top 53 bits, portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

inline PhaseState initial_state(const InitialData& d, SpatialGrid sg, std::shared_ptr<const VelocityGrid> vg) {
  if (!(d.kappa_bar > 0.0)) throw InvalidArgument("kappa_bar must be positive");
  if (!(std::abs(d.amplitude) < 1.0)) throw InvalidArgument("amplitude must satisfy |a| < 1");
  if (!(d.perturbation >= 0.0 && d.perturbation < 1.0)) throw InvalidArgument("perturbation must lie in [0, 1)");
  PhaseState s(sg, std::move(vg));
  std::mt19937_64 rng(d.seed);
  const VelocityGrid& g = *s.vgrid;
  for (std::size_t x = 0; x < s.cells(); ++x) {
    const double kx = d.kappa_bar * (1.0 + d.amplitude * std::cos(2.0 * std::numbers::pi * sg.center(static_cast<int>(x))));
    s.kappa_cache[x] = kx;
    for (std::size_t v = 0; v < g.size(); ++v) {
      double F = kx;
      if (d.perturbation > 0.0) F *= 1.0 + d.perturbation * (2.0 * detail::unit_uniform(rng) - 1.0);
      s.at(x, v) = fermi_dirac(F, g.maxwellian[v]);
    }
  }
  return s;
}

/// Far-from-equilibrium admissible state: each node drawn uniformly between
/// the two envelope profiles of `w`.
inline PhaseState random_sandwich_state(const Sandwich& w, SpatialGrid sg, std::shared_ptr<const VelocityGrid> vg,
                                        std::uint64_t seed) {
  PhaseState s(sg, std::move(vg));
  std::mt19937_64 rng(seed);
  const VelocityGrid& g = *s.vgrid;
  for (std::size_t x = 0; x < s.cells(); ++x) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      const double lo = fermi_dirac(w.kappa_minus, g.maxwellian[v]);
      const double hi = fermi_dirac(w.kappa_plus, g.maxwellian[v]);
      s.at(x, v) = lo + detail::unit_uniform(rng) * (hi - lo);
    }
    s.kappa_cache[x] = std::sqrt(w.kappa_minus * w.kappa_plus);
  }
  return s;
}

}  // namespace sbe
