#pragma once

#include <algorithm>
#include <vector>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/experiment/records.hpp"
#include "sbe/fields.hpp"
#include "sbe/functionals.hpp"

namespace sbe {

struct RecordedSample {
  DiagnosticsRecord record;
  Projection projection;
};

/// Evaluates every diagnostic of one state. The projection is returned so
/// callers can refresh the state's kappa cache.
inline RecordedSample compute_record(const PhaseState& s, const EquilibriumProfile& f_inf,
                                     const CollisionKernel& kernel, double delta) {
  RecordedSample out{DiagnosticsRecord{}, project_cells(s)};
  DiagnosticsRecord& r = out.record;
  const PhaseState& pi = out.projection.state;

  r.time = s.time;
  r.mass = total_mass(s);
  r.H = entropy_H(s, f_inf);
  r.D = dissipation_D(s, kernel);
  const FieldSet fields = compute_fields(s, f_inf.density);
  r.pairing = pairing(fields, s.sgrid);
  r.E = modified_entropy_E(r.H, delta, r.pairing);
  r.dist_total = weighted_distance(s, f_inf.profile);
  r.dist_local = weighted_distance(s, pi);
  r.dist_hydro = weighted_distance(pi, f_inf.profile);
  r.ratio_c1 = r.D / (r.dist_local * r.dist_local);
  r.ratio_c6 = r.E / (r.dist_total * r.dist_total);
  const auto [lo, hi] = std::minmax_element(out.projection.kappa.begin(), out.projection.kappa.end());
  r.kappa_min = *lo;
  r.kappa_max = *hi;
  return out;
}

/// Recomputes E and ratio_c6 of existing records for a different delta.
inline void apply_delta(std::vector<DiagnosticsRecord>& records, double delta) {
  for (auto& r : records) {
    r.E = modified_entropy_E(r.H, delta, r.pairing);
    r.ratio_c6 = r.E / (r.dist_total * r.dist_total);
  }
}

}  // namespace sbe
