#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sbe/experiment/audit.hpp"
#include "sbe/experiment/runner.hpp"

namespace sbe {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline ExperimentConfig small_config() {
  ExperimentConfig c;
  c.cells = 16;
  c.nodes_per_axis = 16;
  c.t_final = 2.0;
  c.record_every = 10;
  c.initial.perturbation = 0.2;
  c.initial.seed = 7;
  return c;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline CheckResult guarded(const std::string& name, const std::function<CheckResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

/// Short run: the runner itself aborts on mass, bound or dissipation breaches;
/// here H is additionally required to be non-increasing.
inline CheckResult check_run(const std::string& name, const ExperimentConfig& c) {
  RunOptions opt;
  opt.keep_samples = false;
  const RunResult r = run_experiment(c, opt);
  const double h0 = std::abs(r.records.front().H);
  double worst = 0.0;
  for (std::size_t i = 1; i < r.records.size(); ++i) worst = std::max(worst, r.records[i].H - r.records[i - 1].H);
  const bool ok = worst <= 1e-10 * h0;
  return {name, ok, "max H increase " + fmt(worst) + ", " + std::to_string(r.records.size()) + " records"};
}

inline CheckResult check_fixed_point() {
  const ExperimentConfig c = small_config();
  auto vg = make_velocity_grid(c);
  const CollisionKernel k = make_kernel(c, *vg);
  const EquilibriumProfile eq = make_profile(1.3, *vg);
  PhaseState s = broadcast(eq.profile, make_spatial_grid(c.cells), vg);
  SchemeConfig scheme = scheme_of(c);
  scheme.dt = cfl_max_dt(s, k, scheme);
  for (int n = 0; n < 200; ++n) s = step(std::move(s), k, scheme);
  const double d = weighted_distance(s, eq.profile);
  return {"equilibrium fixed point", d <= 1e-12, "distance after 200 steps " + fmt(d)};
}

inline CheckResult check_projection() {
  const ExperimentConfig c = small_config();
  auto vg = make_velocity_grid(c);
  const SpatialGrid sg = make_spatial_grid(c.cells);
  double worst_idem = 0.0, worst_rho = 0.0, worst_odd = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PhaseState s = random_sandwich_state({0.2, 5.0}, sg, vg, seed);
    const Projection p = project_cells(s);
    const PhaseState pp = project(p.state);
    for (std::size_t i = 0; i < s.f.size(); ++i) worst_idem = std::max(worst_idem, std::abs(pp.f[i] - p.state.f[i]));
    for (std::size_t x = 0; x < s.cells(); ++x) {
      const double rho = integrate(s.cell(x), *vg);
      worst_rho = std::max(worst_rho, std::abs(integrate(p.state.cell(x), *vg) - rho) / rho);
      std::vector<double> vf(vg->size());
      for (std::size_t v = 0; v < vg->size(); ++v) vf[v] = vg->nodes[v][0] * p.state.at(x, v);
      worst_odd = std::max(worst_odd, std::abs(integrate(vf, *vg)));
    }
  }
  const bool ok = worst_idem <= 1e-10 && worst_rho <= 1e-10 && worst_odd <= 1e-15;
  return {"projection", ok,
          "idempotence " + fmt(worst_idem) + ", density " + fmt(worst_rho) + ", odd moment " + fmt(worst_odd)};
}

inline CheckResult check_poisson() {
  const SpatialGrid sg = make_spatial_grid(64);
  std::vector<double> rho(64);
  for (int i = 0; i < 64; ++i) rho[i] = 1.0 + 0.3 * std::cos(2.0 * std::numbers::pi * sg.center(i));
  const PoissonSolution a = solve_poisson(rho, 1.0, sg);
  const PoissonSolution b = solve_poisson_spectral(rho, 1.0, sg);
  double diff = 0.0, err = 0.0, mean = 0.0;
  const double scale = 0.3 / (4.0 * std::numbers::pi * std::numbers::pi);
  for (int i = 0; i < 64; ++i) {
    diff = std::max(diff, std::abs(a.phi[i] - b.phi[i]));
    err = std::max(err, std::abs(a.phi[i] - scale * std::cos(2.0 * std::numbers::pi * sg.center(i))));
    mean += a.phi[i];
  }
  mean = std::abs(mean) / 64.0;
  const bool ok = diff <= 1e-12 && mean <= 1e-12 && err <= 1e-3 * scale;
  return {"poisson", ok, "route difference " + fmt(diff) + ", eigenfunction error " + fmt(err) + ", mean " + fmt(mean)};
}

inline CheckResult check_dissipation() {
  const ExperimentConfig c = small_config();
  auto vg = make_velocity_grid(c);
  const CollisionKernel k = make_kernel(c, *vg);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PhaseState s = random_sandwich_state({0.1, 10.0}, make_spatial_grid(c.cells), vg, seed);
    worst = std::min(worst, dissipation_D(s, k));
  }
  return {"dissipation sign", worst >= 0.0, "min D " + fmt(worst)};
}

}  // namespace detail

/// Invariant suite on small built-in configurations.
inline std::vector<CheckResult> run_checks() {
  std::vector<CheckResult> out;
  out.push_back(detail::guarded("run, constant kernel", [] {
    return detail::check_run("run, constant kernel", detail::small_config());
  }));
  out.push_back(detail::guarded("run, gaussian bump kernel, muscl2", [] {
    ExperimentConfig c = detail::small_config();
    c.kernel = KernelKind::gaussian_bump;
    c.transport_order = TransportOrder::muscl2;
    return detail::check_run("run, gaussian bump kernel, muscl2", c);
  }));
  out.push_back(detail::guarded("run, two velocity dimensions", [] {
    ExperimentConfig c = detail::small_config();
    c.velocity_dim = 2;
    c.cells = 8;
    c.t_final = 0.5;
    return detail::check_run("run, two velocity dimensions", c);
  }));
  out.push_back(detail::guarded("equilibrium fixed point", detail::check_fixed_point));
  out.push_back(detail::guarded("projection", detail::check_projection));
  out.push_back(detail::guarded("poisson", detail::check_poisson));
  out.push_back(detail::guarded("dissipation sign", detail::check_dissipation));
  return out;
}

}  // namespace sbe
