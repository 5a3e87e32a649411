#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/experiment/rate.hpp"
#include "sbe/fields.hpp"
#include "sbe/functionals.hpp"

namespace sbe {

/// Both sides of every state-level inequality at one sampled time.
struct StateAudit {
  double time = 0.0;
  double dist_total = 0.0;
  double dist_local = 0.0;
  double dist_hydro = 0.0;
  double q_norm = 0.0;        // ||Q(f)||
  double step1_lhs = 0.0;     // int d_t grad phi . j
  double step1_rhs = 0.0;     // d ||f - Pi f||^2
  double term_hydro = 0.0;    // -int grad phi . grad int v1^2 (Pi f - f_inf)
  double term_identity = 0.0; // -int (rho - rho_inf)(kappa - kappa_inf) int v1^2 M/((1+kM)(1+k_inf M))
  double term_local = 0.0;    // -int int (grad phi v)(v grad (f - Pi f))
  double term_collision = 0.0;// int int (grad phi v) Q(f)
  double c3 = std::numeric_limits<double>::quiet_NaN();
  double c4 = std::numeric_limits<double>::quiet_NaN();
  double c5 = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// Per-cell v1^2 moment of a field given cell by cell.
inline std::vector<double> second_moment_x(const PhaseState& s, std::span<const double> g) {
  const VelocityGrid& vg = *s.vgrid;
  std::vector<double> out(s.cells());
  parallel_for(s.cells(), [&](std::size_t x) {
    std::vector<double> w(vg.size());
    for (std::size_t v = 0; v < vg.size(); ++v) w[v] = vg.nodes[v][0] * vg.nodes[v][0] * g[x * vg.size() + v];
    out[x] = integrate(w, vg);
  });
  return out;
}

inline std::vector<double> first_moment_x(const PhaseState& s, std::span<const double> g) {
  const VelocityGrid& vg = *s.vgrid;
  std::vector<double> out(s.cells());
  parallel_for(s.cells(), [&](std::size_t x) {
    std::vector<double> w(vg.size());
    for (std::size_t v = 0; v < vg.size(); ++v) w[v] = vg.nodes[v][0] * g[x * vg.size() + v];
    out[x] = integrate(w, vg);
  });
  return out;
}

}  // namespace detail

/// Evaluates the pointwise bounds relating kappa, rho and Pi f, the Step 1
/// bound and the three Step 2 terms for one state.
inline StateAudit audit_state(const PhaseState& s, const EquilibriumProfile& f_inf, const CollisionKernel& kernel) {
  const VelocityGrid& vg = *s.vgrid;
  const SpatialGrid& sg = s.sgrid;
  const std::size_t nv = vg.size();
  const Projection proj = project_cells(s);
  const PhaseState& pi = proj.state;

  StateAudit a;
  a.time = s.time;
  a.dist_total = weighted_distance(s, f_inf.profile);
  a.dist_local = weighted_distance(s, pi);
  a.dist_hydro = weighted_distance(pi, f_inf.profile);

  const std::vector<double> q = apply_Q(s, kernel);
  a.q_norm = weighted_norm(q, sg, vg);

  const FieldSet fields = compute_fields(s, f_inf.density);
  const std::vector<double> jx = current_x(fields.j);

  // d_t phi solves -Lap psi = -div j, which follows from the continuity equation.
  std::vector<double> div = centered_divergence(jx, sg);
  for (double& v : div) v = -v;
  const PoissonSolution dphi = solve_poisson(div, 0.0, sg);
  a.step1_lhs = l2_dot(dphi.grad_phi, jx, sg);
  a.step1_rhs = static_cast<double>(vg.dim) * a.dist_local * a.dist_local;

  std::vector<double> hydro(s.f.size()), local(s.f.size());
  for (std::size_t x = 0; x < s.cells(); ++x)
    for (std::size_t v = 0; v < nv; ++v) {
      hydro[x * nv + v] = pi.at(x, v) - f_inf.profile[v];
      local[x * nv + v] = s.at(x, v) - pi.at(x, v);
    }
  const std::vector<double> p_hydro = detail::second_moment_x(s, hydro);
  const std::vector<double> p_local = detail::second_moment_x(s, local);
  const std::vector<double> q_moment = detail::first_moment_x(s, q);
  a.term_hydro = -l2_dot(fields.grad_phi, centered_gradient(p_hydro, sg), sg);
  a.term_local = -l2_dot(fields.grad_phi, centered_gradient(p_local, sg), sg);
  a.term_collision = l2_dot(fields.grad_phi, q_moment, sg);

  std::vector<double> ident(s.cells());
  double c3 = std::numeric_limits<double>::infinity();
  double c4 = std::numeric_limits<double>::infinity();
  double c5 = 0.0;
  bool any = false;
  for (std::size_t x = 0; x < s.cells(); ++x) {
    const double dk = proj.kappa[x] - f_inf.kappa;
    const double drho = proj.density[x] - f_inf.density;
    std::vector<double> w(nv);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      const double m = vg.maxwellian[v];
      w[v] = vg.nodes[v][0] * vg.nodes[v][0] * m / ((1.0 + proj.kappa[x] * m) * (1.0 + f_inf.kappa * m));
      const double r = hydro[x * nv + v] / m;
      lo = std::min(lo, r * r);
      hi = std::max(hi, r * r);
    }
    ident[x] = -drho * dk * integrate(w, vg);
    if (std::abs(dk) > 1e-8 * f_inf.kappa && lo > 0.0) {
      c3 = std::min(c3, dk * drho / hi);
      c4 = std::min(c4, drho * drho / hi);
      c5 = std::max(c5, drho * drho / lo);
      any = true;
    }
  }
  a.term_identity = pairwise_sum(ident) * sg.spacing;
  if (any) {
    a.c3 = c3;
    a.c4 = c4;
    a.c5 = c5;
  }
  return a;
}

/// Extremal constants over a set of state audits. Ratios whose denominator is
/// below kDegenerateFraction of dist_total are skipped and counted.
inline LemmaConstants state_constants(std::span<const StateAudit> audits) {
  const double inf = std::numeric_limits<double>::infinity();
  double c2 = 0.0, c3 = inf, c4 = inf, c5 = 0.0, c9 = inf, c10 = -inf, c11 = -inf;
  double s1_ratio = -inf, s1_excess = -inf;
  double skipped = 0.0;
  for (const StateAudit& a : audits) {
    s1_excess = std::max(s1_excess, a.step1_lhs - a.step1_rhs);
    if (a.step1_rhs > 0.0) s1_ratio = std::max(s1_ratio, a.step1_lhs / a.step1_rhs);
    if (!std::isnan(a.c3)) {
      c3 = std::min(c3, a.c3);
      c4 = std::min(c4, a.c4);
      c5 = std::max(c5, a.c5);
    }
    const bool local_ok = a.dist_local > kDegenerateFraction * a.dist_total && a.dist_total > kDistanceFloor;
    const bool hydro_ok = a.dist_hydro > kDegenerateFraction * a.dist_total && a.dist_total > kDistanceFloor;
    if (local_ok)
      c2 = std::max(c2, a.q_norm / a.dist_local);
    else
      skipped += 1.0;
    if (hydro_ok)
      c9 = std::min(c9, -a.term_hydro / (a.dist_hydro * a.dist_hydro));
    else
      skipped += 1.0;
    if (local_ok && hydro_ok) {
      const double cross = a.dist_local * a.dist_hydro;
      c10 = std::max(c10, a.term_local / cross);
      c11 = std::max(c11, a.term_collision / cross);
    }
  }
  return {{"c2_max_ratio", c2},
          {"c3_min", c3},
          {"c4_min", c4},
          {"c5_max", c5},
          {"c9_min", c9},
          {"c10_max", c10},
          {"c11_max", c11},
          {"step1_max_ratio", s1_ratio},
          {"step1_max_excess", s1_excess},
          {"state_samples", static_cast<double>(audits.size())},
          {"state_samples_skipped", skipped}};
}

/// Full proof-chain audit: constants from the recorded columns plus those that
/// need retained states.
inline LemmaConstants audit_proof_chain(std::span<const DiagnosticsRecord> records, std::span<const PhaseState> states,
                                        const EquilibriumProfile& f_inf, const CollisionKernel& kernel) {
  LemmaConstants out = record_constants(records);
  std::vector<StateAudit> audits;
  audits.reserve(states.size());
  for (const PhaseState& s : states) audits.push_back(audit_state(s, f_inf, kernel));
  for (const auto& [k, v] : state_constants(audits)) out[k] = v;
  return out;
}

}  // namespace sbe
