#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "naive.hpp"
#include "sbe/sbe.hpp"

namespace naive {

inline Field to_field(const sbe::PhaseState& s) {
  Field f(s.cells());
  for (std::size_t x = 0; x < s.cells(); ++x) f[x].assign(s.cell(x).begin(), s.cell(x).end());
  return f;
}

inline double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Relative discrepancy between library and oracle for every functional on one
/// random state with N_x = 8 cells and 8 nodes per velocity axis.
inline std::map<std::string, double> compare_tiny(int dim, sbe::KernelKind kind, std::uint64_t seed) {
  using namespace sbe;
  constexpr int n = 8;
  constexpr double L = 5.0;
  constexpr double delta = 0.01;
  auto vg = std::make_shared<const VelocityGrid>(build_velocity_grid(dim, L, n));
  const Grid ng = make_grid(dim, L, n);
  const SpatialGrid sg = make_spatial_grid(n);
  const CollisionKernel k = build_kernel({kind, 1.0, 1.0, {}}, *vg);
  const auto sigma = kind == KernelKind::constant ? sigma_constant : sigma_bump;
  const double dx = 1.0 / n;

  const PhaseState s = random_sandwich_state({0.2, 6.0}, sg, vg, seed);
  const Field f = to_field(s);

  std::map<std::string, double> e;
  e["mass"] = rel(total_mass(s), mass(f, ng, dx));

  const EquilibriumProfile eq = global_equilibrium(s);
  const double kinf = solve_kappa(mass(f, ng, dx), ng);
  e["kappa_inf"] = rel(eq.kappa, kinf);
  const std::vector<double> finf = profile(kinf, ng);
  const Field fin = broadcast(finf, n);
  const Field pf = project(f, ng);
  const PhaseState ps = sbe::project(s);

  const double h = H(f, finf, ng, dx);
  e["H"] = rel(entropy_H(s, eq), h);
  e["D"] = rel(dissipation_D(s, k), D(f, ng, dx, sigma));
  e["dist_total"] = rel(weighted_distance(s, eq.profile), norm(f, fin, ng, dx));
  e["dist_local"] = rel(weighted_distance(s, ps), norm(f, pf, ng, dx));
  e["dist_hydro"] = rel(weighted_distance(ps, eq.profile), norm(pf, fin, ng, dx));

  const FieldSet fs = compute_fields(s, eq.density);
  const double pr = pairing(f, density(kinf, ng), ng, dx);
  e["pairing"] = rel(sbe::pairing(fs, sg), pr);
  e["E"] = rel(modified_entropy_E(s, delta, fs, eq), h + delta * pr);

  double q_err = 0.0;
  for (std::size_t x = 0; x < s.cells(); ++x) {
    const auto q_lib = apply_Q(s.cell(x), k, *vg);
    const auto q_nai = Q(f[x], ng, sigma);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < q_nai.size(); ++i) {
      scale = std::max(scale, std::abs(q_nai[i]));
      diff = std::max(diff, std::abs(q_lib[i] - q_nai[i]));
    }
    q_err = std::max(q_err, diff / scale);
  }
  e["apply_Q"] = q_err;
  return e;
}

}  // namespace naive
