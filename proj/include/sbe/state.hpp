#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbe/error.hpp"
#include "sbe/parallel.hpp"
#include "sbe/velocity_grid.hpp"

namespace sbe {

/// Uniform cell-centred grid on the unit torus T^1.
struct SpatialGrid {
  int dim = 1;
  int cells = 0;
  double spacing = 0.0;
  double volume = 1.0;

  double center(int i) const { return (i + 0.5) * spacing; }
};

inline SpatialGrid make_spatial_grid(int cells, int dim = 1) {
  if (dim != 1) throw InvalidArgument("only one spatial dimension is supported");
  if (cells < 4) throw InvalidArgument("need at least 4 spatial cells, got " + std::to_string(cells));
  SpatialGrid s;
  s.dim = dim;
  s.cells = cells;
  s.spacing = 1.0 / cells;
  s.volume = 1.0;
  return s;
}

/// Distribution f on the (cell x velocity node) lattice, stored cell-major.
struct PhaseState {
  SpatialGrid sgrid;
  std::shared_ptr<const VelocityGrid> vgrid;
  std::vector<double> f;
  double time = 0.0;
  std::int64_t step = 0;
  /// Per-cell kappa from the last projection; warm start for the next one.
  std::vector<double> kappa_cache;

  PhaseState() = default;
  PhaseState(SpatialGrid s, std::shared_ptr<const VelocityGrid> v)
      : sgrid(s), vgrid(std::move(v)), f(static_cast<std::size_t>(s.cells) * vgrid->size(), 0.0),
        kappa_cache(static_cast<std::size_t>(s.cells), 1.0) {}

  std::size_t cells() const { return static_cast<std::size_t>(sgrid.cells); }
  std::size_t velocities() const { return vgrid->size(); }

  std::span<double> cell(std::size_t x) { return {f.data() + x * velocities(), velocities()}; }
  std::span<const double> cell(std::size_t x) const { return {f.data() + x * velocities(), velocities()}; }

  double& at(std::size_t x, std::size_t v) { return f[x * velocities() + v]; }
  double at(std::size_t x, std::size_t v) const { return f[x * velocities() + v]; }
};

/// Total mass sum_x sum_v f w_v dx.
inline double total_mass(const PhaseState& s) {
  std::vector<double> per_cell(s.cells());
  for (std::size_t x = 0; x < s.cells(); ++x) per_cell[x] = integrate(s.cell(x), *s.vgrid);
  return pairwise_sum(per_cell) * s.sgrid.spacing;
}

/// Copies one velocity profile into every cell.
inline PhaseState broadcast(std::span<const double> profile, SpatialGrid s, std::shared_ptr<const VelocityGrid> v) {
  PhaseState st(s, std::move(v));
  if (profile.size() != st.velocities()) throw InvalidArgument("broadcast: profile size does not match grid");
  for (std::size_t x = 0; x < st.cells(); ++x) std::copy(profile.begin(), profile.end(), st.cell(x).begin());
  return st;
}

}  // namespace sbe
