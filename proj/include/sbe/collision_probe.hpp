#pragma once

#include <algorithm>
#include <span>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/functionals.hpp"

namespace sbe {

struct NormProbeResult {
  /// max over non-degenerate samples of ||Q(f)|| / ||f - Pi f||; 0 if none.
  double max_ratio = 0.0;
  std::size_t used = 0;
  std::size_t degenerate = 0;

  bool all_degenerate() const { return used == 0; }
};

/// Empirical lower estimate of the constant in ||Q(f)|| <= c ||f - Pi f||.
/// Samples with ||f - Pi f|| below `degenerate_rel` ||f|| are counted but skipped.
inline NormProbeResult collision_operator_norm_probe(std::span<const PhaseState> samples, const CollisionKernel& kernel,
                                                     double degenerate_rel = 1e-10) {
  NormProbeResult out;
  for (const PhaseState& s : samples) {
    const PhaseState pi = project(s);
    const double local = weighted_distance(s, pi);
    const double scale = weighted_norm(s.f, s.sgrid, *s.vgrid);
    if (local <= degenerate_rel * scale) {
      ++out.degenerate;
      continue;
    }
    const std::vector<double> q = apply_Q(s, kernel);
    out.max_ratio = std::max(out.max_ratio, weighted_norm(q, s.sgrid, *s.vgrid) / local);
    ++out.used;
  }
  return out;
}

}  // namespace sbe
