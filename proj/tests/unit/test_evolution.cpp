#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "sbe/equilibrium.hpp"
#include "sbe/evolution.hpp"
#include "sbe/functionals.hpp"

using namespace sbe;
using Catch::Approx;

namespace {

std::shared_ptr<const VelocityGrid> grid(int dim = 1, double L = 8.0, int n = 64) {
  return std::make_shared<const VelocityGrid>(build_velocity_grid(dim, L, n));
}

CollisionKernel constant_kernel(const VelocityGrid& g, double scale = 1.0) {
  return build_kernel({KernelKind::constant, 1.0, scale, {}}, g);
}

double max_abs_diff(const PhaseState& a, const PhaseState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i) m = std::max(m, std::abs(a.f[i] - b.f[i]));
  return m;
}

}  // namespace

TEST_CASE("CFL limits", "[evolution]") {
  const auto g = grid();
  const PhaseState s(make_spatial_grid(64), g);
  SchemeConfig cfg;
  cfg.cfl_safety = 0.9;
  const DtLimits lim = cfl_limits(s, constant_kernel(*g), cfg);
  CHECK(lim.transport == Approx(0.9 * (1.0 / 64.0) / 8.0).epsilon(1e-15));
  CHECK(lim.collision == Approx(0.9 / (maxwellian_mass(*g) + 16.0)).epsilon(1e-15));
  CHECK(cfl_max_dt(s, constant_kernel(*g), cfg) == lim.transport);

  const DtLimits doubled = cfl_limits(s, constant_kernel(*g, 2.0), cfg);
  CHECK(doubled.collision == Approx(0.5 * lim.collision).epsilon(1e-15));
  cfg.transport_order = TransportOrder::muscl2;
  CHECK(cfl_limits(s, constant_kernel(*g), cfg).transport == Approx(0.5 * lim.transport).epsilon(1e-15));
  cfg.cfl_safety = 1.0;
  CHECK_THROWS_AS(cfl_limits(s, constant_kernel(*g), cfg), InvalidArgument);
}

TEST_CASE("transport: uniform states, mass, maximum principle, CFL guard", "[evolution]") {
  const auto g = grid();
  const SpatialGrid sg = make_spatial_grid(32);
  const EquilibriumProfile eq = make_profile(2.0, *g);
  const PhaseState u = broadcast(eq.profile, sg, g);
  const double dt = 0.9 * sg.spacing / g->speed_bound();
  for (TransportOrder order : {TransportOrder::upwind1, TransportOrder::muscl2}) {
    const double d = order == TransportOrder::upwind1 ? dt : 0.5 * dt;
    CHECK(transport_step(u, d, order).f == u.f);
    const PhaseState s = random_sandwich_state({0.1, 8.0}, sg, g, 3);
    const PhaseState t = transport_step(s, d, order, TimeIntegrator::ssprk2);
    CHECK(total_mass(t) == Approx(total_mass(s)).epsilon(1e-15));
    for (std::size_t v = 0; v < g->size(); ++v) {
      double lo = 1.0, hi = 0.0, tlo = 1.0, thi = 0.0;
      for (std::size_t x = 0; x < s.cells(); ++x) {
        lo = std::min(lo, s.at(x, v));
        hi = std::max(hi, s.at(x, v));
        tlo = std::min(tlo, t.at(x, v));
        thi = std::max(thi, t.at(x, v));
      }
      CHECK(tlo >= lo);
      CHECK(thi <= hi);
    }
  }
  CHECK_THROWS_AS(transport_step(u, 1.5 * sg.spacing / g->speed_bound()), InvalidArgument);
}

TEST_CASE("transport: a step profile advects at the node velocity", "[evolution]") {
  const auto g = grid(1, 8.0, 16);
  const SpatialGrid sg = make_spatial_grid(200);
  PhaseState s(sg, g);
  // Node 9 carries v = 1.5; a plateau on [0.2, 0.4) should move to [0.2 + 1.5 t, 0.4 + 1.5 t).
  const std::size_t node = 9;
  const double v = g->nodes[node][0];
  REQUIRE(v == 1.5);
  for (int x = 0; x < sg.cells; ++x) {
    const double c = sg.center(x);
    for (std::size_t k = 0; k < g->size(); ++k) s.at(x, k) = 0.1;
    if (c >= 0.2 && c < 0.4) s.at(x, node) = 0.9;
  }
  const double dt = 0.9 * sg.spacing / g->speed_bound();
  const int steps = static_cast<int>(std::llround(1.0 / dt));
  for (int i = 0; i < steps; ++i) s = transport_step(std::move(s), dt);
  const double t = steps * dt;
  // Fronts are where the profile crosses 0.5, located by linear interpolation.
  std::vector<double> crossings;
  for (int x = 0; x < sg.cells; ++x) {
    const int y = (x + 1) % sg.cells;
    const double a = s.at(x, node) - 0.5, b = s.at(y, node) - 0.5;
    if (a * b < 0.0) crossings.push_back(sg.center(x) + sg.spacing * a / (a - b));
  }
  REQUIRE(crossings.size() == 2);
  const auto wrap = [](double d) { return d - std::round(d); };
  std::sort(crossings.begin(), crossings.end());
  const double left = std::fmod(0.2 + v * t, 1.0), right = std::fmod(0.4 + v * t, 1.0);
  const double e1 = std::min(std::abs(wrap(crossings[0] - left)), std::abs(wrap(crossings[1] - left)));
  const double e2 = std::min(std::abs(wrap(crossings[0] - right)), std::abs(wrap(crossings[1] - right)));
  CHECK(e1 <= sg.spacing);
  CHECK(e2 <= sg.spacing);
}

TEST_CASE("collision step: equilibria, per-cell mass, monotonicity guard", "[evolution]") {
  const auto g = grid();
  const SpatialGrid sg = make_spatial_grid(8);
  const CollisionKernel k = build_kernel({KernelKind::gaussian_bump, 1.0, 1.0, {}}, *g);
  const PhaseState s = random_sandwich_state({0.1, 8.0}, sg, g, 4);
  const PhaseState p = project(s);
  SchemeConfig cfg;
  const double dt = cfl_limits(s, k, cfg).collision;
  for (TimeIntegrator it : {TimeIntegrator::euler, TimeIntegrator::ssprk2}) {
    CHECK(max_abs_diff(collision_step(p, k, dt, it), p) <= 1e-15);
    const PhaseState c = collision_step(s, k, dt, it);
    for (std::size_t x = 0; x < s.cells(); ++x) {
      const double before = integrate(s.cell(x), *g), after = integrate(c.cell(x), *g);
      CHECK(after == Approx(before).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(collision_step(s, k, 2.0 * dt), InvalidArgument);
}

TEST_CASE("bounds hold over random admissible initial states", "[evolution]") {
  const auto g = grid(1, 8.0, 16);
  const SpatialGrid sg = make_spatial_grid(16);
  std::mt19937_64 rng(2024);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double km = std::exp(std::uniform_real_distribution<double>(-3.0, 1.0)(rng));
    const double kp = km * std::exp(std::uniform_real_distribution<double>(0.1, 4.0)(rng));
    const PhaseState s0 = random_sandwich_state({km, kp}, sg, g, rng());
    const Sandwich w = sandwich_of(s0);
    SchemeConfig cfg;
    cfg.transport_order = trial % 2 ? TransportOrder::muscl2 : TransportOrder::upwind1;
    cfg.splitting = trial % 3 ? Splitting::strang : Splitting::lie;
    cfg.integrator = trial % 5 ? TimeIntegrator::ssprk2 : TimeIntegrator::euler;
    const KernelKind kind = trial % 2 ? KernelKind::gaussian_bump : KernelKind::constant;
    const CollisionKernel k = build_kernel({kind, 1.0, 1.0, {}}, *g);
    cfg.dt = cfl_max_dt(s0, k, cfg);
    PhaseState s = s0;
    for (int n = 0; n < 10; ++n) {
      s = step(std::move(s), k, cfg);
      const BoundCheck b = check_bounds(s, w);
      violations += b.pauli_violations + b.sandwich_violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("sandwich preserved over 10^4 steps from extreme data", "[evolution]") {
  const auto g = grid(1, 8.0, 16);
  const SpatialGrid sg = make_spatial_grid(8);
  const PhaseState s0 = random_sandwich_state({0.01, 50.0}, sg, g, 77);
  const Sandwich w = sandwich_of(s0);
  const CollisionKernel k = build_kernel({KernelKind::gaussian_bump, 1.0, 1.0, {}}, *g);
  SchemeConfig cfg;
  cfg.dt = cfl_max_dt(s0, k, cfg);
  PhaseState s = s0;
  const double m0 = total_mass(s0);
  std::size_t violations = 0;
  for (int n = 0; n < 10000; ++n) {
    s = step(std::move(s), k, cfg);
    const BoundCheck b = check_bounds(s, w);
    violations += b.pauli_violations + b.sandwich_violations;
  }
  CHECK(violations == 0);
  CHECK(total_mass(s) == Approx(m0).epsilon(1e-12));
}

TEST_CASE("equilibrium is a fixed point of the scheme", "[evolution]") {
  const auto g = grid();
  const SpatialGrid sg = make_spatial_grid(64);
  const CollisionKernel k = constant_kernel(*g);
  const EquilibriumProfile eq = make_profile(1.0, *g);
  PhaseState s = broadcast(eq.profile, sg, g);
  SchemeConfig cfg;
  cfg.dt = cfl_max_dt(s, k, cfg);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    s = step(std::move(s), k, cfg);
    worst = std::max(worst, weighted_distance(s, eq.profile));
  }
  CHECK(worst <= 1e-12);
  CHECK(s.step == 1000);
  CHECK(s.time == Approx(1000 * cfg.dt).epsilon(1e-12));
}

TEST_CASE("vanishing kernel reduces the step to pure transport", "[evolution]") {
  const auto g = grid(1, 8.0, 32);
  const SpatialGrid sg = make_spatial_grid(32);
  const PhaseState s0 = initial_state({1.0, 0.5, 0.2, 5}, sg, g);
  const CollisionKernel k = constant_kernel(*g, 1e-12);
  SchemeConfig cfg;
  cfg.dt = cfl_max_dt(s0, k, cfg);
  cfg.splitting = Splitting::lie;
  PhaseState a = s0, b = s0;
  for (int n = 0; n < 50; ++n) {
    a = step(std::move(a), k, cfg);
    b = transport_step(std::move(b), cfg.dt, cfg.transport_order, cfg.integrator);
  }
  CHECK(max_abs_diff(a, b) <= 1e-10);
}

TEST_CASE("H is non-increasing along trajectories", "[evolution]") {
  const auto g = grid(1, 8.0, 32);
  const SpatialGrid sg = make_spatial_grid(32);
  for (KernelKind kind : {KernelKind::constant, KernelKind::gaussian_bump}) {
    const CollisionKernel k = build_kernel({kind, 1.0, 1.0, {}}, *g);
    PhaseState s = initial_state({2.0, 0.7, 0.3, 11}, sg, g);
    const EquilibriumProfile eq = global_equilibrium(s);
    SchemeConfig cfg;
    cfg.dt = cfl_max_dt(s, k, cfg);
    const double h0 = entropy_H(s, eq);
    double prev = h0;
    for (int n = 0; n < 500; ++n) {
      s = step(std::move(s), k, cfg);
      const double h = entropy_H(s, eq);
      CHECK(h <= prev + 1e-10 * h0);
      prev = h;
    }
  }
}

TEST_CASE("splitting self-convergence: Lie first order, Strang second order", "[evolution]") {
  const auto g = grid(1, 8.0, 32);
  const SpatialGrid sg = make_spatial_grid(32);
  const CollisionKernel k = constant_kernel(*g);
  const PhaseState s0 = initial_state({1.0, 0.5, 0.0, 1}, sg, g);
  const EquilibriumProfile eq = global_equilibrium(s0);
  const double t_end = 0.5;

  struct Run {
    PhaseState state;
    double H;
  };
  const auto run = [&](Splitting sp, double dt) {
    SchemeConfig cfg;
    cfg.splitting = sp;
    cfg.dt = dt;
    PhaseState s = s0;
    const int n = static_cast<int>(std::llround(t_end / dt));
    for (int i = 0; i < n; ++i) s = step(std::move(s), k, cfg);
    const double h = entropy_H(s, eq);
    return Run{std::move(s), h};
  };
  SchemeConfig probe;
  const double dt = t_end / std::ceil(t_end / cfl_max_dt(s0, k, probe));

  std::vector<Run> lie, strang;
  for (int l = 0; l < 4; ++l) {
    lie.push_back(run(Splitting::lie, dt / (1 << l)));
    strang.push_back(run(Splitting::strang, dt / (1 << l)));
  }
  // The coarsest Lie level is still pre-asymptotic, so the order is read off
  // the three finest levels.
  const auto order = [](const std::vector<Run>& r) {
    return std::log2(weighted_distance(r[1].state, r[2].state) / weighted_distance(r[2].state, r[3].state));
  };
  CHECK(order(lie) == Approx(1.0).margin(0.2));
  CHECK(order(strang) >= 1.8);

  // H at t_end: both agree to O(dt); Strang is closer to the extrapolated value.
  const double h_ref = strang[2].H + (strang[2].H - strang[1].H) / 3.0;
  CHECK(std::abs(lie[0].H - strang[0].H) <= 10.0 * dt * std::abs(h_ref));
  CHECK(std::abs(strang[0].H - h_ref) < std::abs(lie[0].H - h_ref));
}

TEST_CASE("initial data generator", "[evolution]") {
  const auto g = grid();
  const SpatialGrid sg = make_spatial_grid(16);
  const PhaseState a = initial_state({1.5, 0.4, 0.0, 1}, sg, g);
  for (int x = 0; x < 16; ++x) {
    const double kx = 1.5 * (1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * sg.center(x)));
    CHECK(a.kappa_cache[x] == kx);
    for (std::size_t v = 0; v < g->size(); ++v) CHECK(a.at(x, v) == fermi_dirac(kx, g->maxwellian[v]));
  }
  const PhaseState b = initial_state({1.5, 0.4, 0.3, 8}, sg, g);
  const PhaseState c = initial_state({1.5, 0.4, 0.3, 8}, sg, g);
  CHECK(b.f == c.f);
  const Sandwich w = sandwich_of(b);
  CHECK(w.kappa_minus >= 1.5 * 0.6 * 0.7 * (1.0 - 1e-12));
  CHECK(w.kappa_plus <= 1.5 * 1.4 * 1.3 * (1.0 + 1e-12));
  CHECK_THROWS_AS(initial_state({1.0, 1.0, 0.0, 1}, sg, g), InvalidArgument);
  CHECK_THROWS_AS(initial_state({1.0, 0.5, 1.0, 1}, sg, g), InvalidArgument);
}
