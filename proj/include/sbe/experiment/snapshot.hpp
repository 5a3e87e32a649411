#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "sbe/error.hpp"
#include "sbe/evolution.hpp"
#include "sbe/state.hpp"

namespace sbe {

// Binary snapshot layout (native little-endian):
//   char[8]  magic "SBESNAP\0"
//   u32      version (kSnapshotVersion)
//   i32      velocity_dim, nodes_per_axis, cells
//   f64      half_width, time
//   i64      step
//   f64      reference_mass, kappa_minus, kappa_plus
//   f64[cells * nodes]  f, cell-major
//   f64[cells]          kappa cache
inline constexpr char kSnapshotMagic[8] = {'S', 'B', 'E', 'S', 'N', 'A', 'P', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// A state plus the run-level data needed to resume it exactly.
struct Snapshot {
  PhaseState state;
  /// Mass of the initial data; fixes f_inf independently of rounding drift.
  double reference_mass = 0.0;
  Sandwich sandwich;
};

namespace detail {

template <class T>
void put(std::ostream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("snapshot: unexpected end of file");
  return v;
}

}  // namespace detail

inline void snapshot_dump(const Snapshot& snap, std::ostream& o) {
  const PhaseState& s = snap.state;
  o.write(kSnapshotMagic, sizeof kSnapshotMagic);
  detail::put(o, kSnapshotVersion);
  detail::put<std::int32_t>(o, s.vgrid->dim);
  detail::put<std::int32_t>(o, s.vgrid->nodes_per_axis);
  detail::put<std::int32_t>(o, s.sgrid.cells);
  detail::put(o, s.vgrid->half_width);
  detail::put(o, s.time);
  detail::put<std::int64_t>(o, s.step);
  detail::put(o, snap.reference_mass);
  detail::put(o, snap.sandwich.kappa_minus);
  detail::put(o, snap.sandwich.kappa_plus);
  o.write(reinterpret_cast<const char*>(s.f.data()), static_cast<std::streamsize>(s.f.size() * sizeof(double)));
  std::vector<double> cache = s.kappa_cache;
  cache.resize(s.cells(), 1.0);
  o.write(reinterpret_cast<const char*>(cache.data()), static_cast<std::streamsize>(cache.size() * sizeof(double)));
  if (!o) throw FormatError("snapshot: write failed");
}

inline void snapshot_dump(const Snapshot& snap, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw FormatError("cannot write snapshot " + path);
  snapshot_dump(snap, o);
}

inline Snapshot snapshot_load(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
    throw FormatError("snapshot: bad magic");
  const auto version = detail::get<std::uint32_t>(in);
  if (version != kSnapshotVersion)
    throw FormatError("snapshot: unsupported version " + std::to_string(version) + " (expected " +
                      std::to_string(kSnapshotVersion) + ")");
  const auto dim = detail::get<std::int32_t>(in);
  const auto nodes = detail::get<std::int32_t>(in);
  const auto cells = detail::get<std::int32_t>(in);
  const auto half_width = detail::get<double>(in);

  Snapshot snap;
  auto vg = std::make_shared<const VelocityGrid>(build_velocity_grid(dim, half_width, nodes));
  snap.state = PhaseState(make_spatial_grid(cells), vg);
  snap.state.time = detail::get<double>(in);
  snap.state.step = detail::get<std::int64_t>(in);
  snap.reference_mass = detail::get<double>(in);
  snap.sandwich.kappa_minus = detail::get<double>(in);
  snap.sandwich.kappa_plus = detail::get<double>(in);
  const auto fbytes = static_cast<std::streamsize>(snap.state.f.size() * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(snap.state.f.data()), fbytes)) throw FormatError("snapshot: truncated data");
  const auto cbytes = static_cast<std::streamsize>(snap.state.kappa_cache.size() * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(snap.state.kappa_cache.data()), cbytes))
    throw FormatError("snapshot: truncated kappa cache");
  return snap;
}

inline Snapshot snapshot_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open snapshot " + path);
  return snapshot_load(in);
}

/// Loads a snapshot and verifies it was taken on the expected grids.
inline Snapshot snapshot_load(const std::string& path, const VelocityGrid& vg, const SpatialGrid& sg) {
  Snapshot snap = snapshot_load(path);
  const VelocityGrid& g = *snap.state.vgrid;
  if (g.dim != vg.dim || g.nodes_per_axis != vg.nodes_per_axis || g.half_width != vg.half_width ||
      snap.state.sgrid.cells != sg.cells)
    throw FormatError("snapshot " + path + ": grid does not match the configured grid");
  return snap;
}

}  // namespace sbe
