#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbe/collision.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/error.hpp"
#include "sbe/evolution.hpp"
#include "sbe/experiment/config.hpp"
#include "sbe/experiment/diagnostics.hpp"
#include "sbe/experiment/rate.hpp"
#include "sbe/experiment/records.hpp"
#include "sbe/experiment/snapshot.hpp"

namespace sbe {

inline constexpr double kMassDriftTolerance = 1e-12;
inline constexpr double kDissipationSlack = 1e-12;

struct RunOptions {
  /// Resume from this snapshot instead of building the initial data.
  std::string resume_from;
  /// Keep the audit samples in memory (RunResult::samples).
  bool keep_samples = true;
  /// Called after every record; for progress output.
  std::function<void(const DiagnosticsRecord&)> on_record;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  PhaseState final_state;
  std::vector<PhaseState> samples;
  EquilibriumProfile f_inf;
  Sandwich sandwich;
  CollisionKernel kernel;
  double reference_mass = 0.0;
  double dt = 0.0;
  double delta = 0.0;
  std::optional<DeltaScan> delta_scan;
  std::size_t steps_taken = 0;
};

inline std::string snapshot_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08lld.bin", static_cast<long long>(step));
  return buf;
}

inline SchemeConfig scheme_of(const ExperimentConfig& c) {
  SchemeConfig s;
  s.cfl_safety = c.cfl_safety;
  s.transport_order = c.transport_order;
  s.splitting = c.splitting;
  s.integrator = c.integrator;
  return s;
}

/// Evolves the configured problem to t_final. Records diagnostics every
/// record_every steps (and at the last step), streams them to the CSV when an
/// output directory is set, and aborts with InvariantViolation on any mass,
/// bound or dissipation breach.
inline RunResult run_experiment(const ExperimentConfig& c, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  RunResult res;
  auto vg = make_velocity_grid(c);
  const SpatialGrid sg = make_spatial_grid(c.cells);
  res.kernel = make_kernel(c, *vg);

  PhaseState state;
  if (!opt.resume_from.empty()) {
    Snapshot snap = snapshot_load(opt.resume_from, *vg, sg);
    state = std::move(snap.state);
    state.vgrid = vg;
    res.reference_mass = snap.reference_mass;
    res.sandwich = snap.sandwich;
  } else {
    state = initial_state(c.initial, sg, vg);
    res.reference_mass = total_mass(state);
    res.sandwich = sandwich_of(state);
  }
  res.f_inf = global_equilibrium(res.reference_mass, sg.volume, *vg);

  SchemeConfig scheme = scheme_of(c);
  scheme.dt = c.dt ? *c.dt : cfl_max_dt(state, res.kernel, scheme);
  res.dt = scheme.dt;
  res.delta = c.delta.value_or(default_delta_candidates().back());
  const std::int64_t total_steps = std::max<std::int64_t>(1, std::llround(c.t_final / scheme.dt));
  const std::int64_t audit_every = c.effective_audit_every();

  const bool write = !c.output_dir.empty();
  const fs::path out_dir = c.output_dir;
  const fs::path snap_dir = out_dir / "snapshots";
  std::ofstream csv;
  if (write) {
    fs::create_directories(out_dir);
    if (c.snapshots) fs::create_directories(snap_dir);
    csv.open(out_dir / c.csv_name, std::ios::binary | std::ios::trunc);
    if (!csv) throw FormatError("cannot write " + (out_dir / c.csv_name).string());
    csv << csv_header() << '\n';
    std::ofstream(out_dir / "config.txt", std::ios::binary) << format_config(c);
  }

  const auto record = [&]() {
    RecordedSample r = compute_record(state, res.f_inf, res.kernel, res.delta);
    const double drift = std::abs(r.record.mass - res.reference_mass) / res.reference_mass;
    if (drift > kMassDriftTolerance)
      throw InvariantViolation("mass drift " + std::to_string(drift) + " at step " + std::to_string(state.step));
    if (r.record.D < -kDissipationSlack)
      throw InvariantViolation("negative dissipation D = " + std::to_string(r.record.D) + " at step " +
                               std::to_string(state.step));
    state.kappa_cache = std::move(r.projection.kappa);
    res.records.push_back(r.record);
    if (write) csv << csv_row(r.record) << '\n' << std::flush;
    if (opt.on_record) opt.on_record(r.record);
  };
  const auto sample = [&]() {
    if (opt.keep_samples) res.samples.push_back(state);
    if (write && c.snapshots)
      snapshot_dump(Snapshot{state, res.reference_mass, res.sandwich}, (snap_dir / snapshot_name(state.step)).string());
  };

  // A resumed state was already recorded and sampled by the run that wrote it.
  if (opt.resume_from.empty()) {
    record();
    sample();
  }
  while (state.step < total_steps) {
    state = step(std::move(state), res.kernel, scheme);
    ++res.steps_taken;
    const BoundCheck b = check_bounds(state, res.sandwich);
    if (!b.ok())
      throw InvariantViolation("bound violation at step " + std::to_string(state.step) + ": " +
                               std::to_string(b.pauli_violations) + " outside [0,1], " +
                               std::to_string(b.sandwich_violations) + " outside the sandwich");
    if (state.step % c.record_every == 0 || state.step == total_steps) record();
    if (state.step % audit_every == 0 || state.step == total_steps) sample();
  }

  if (!c.delta) {
    res.delta_scan = scan_delta(res.records);
    res.delta = res.delta_scan->chosen;
    apply_delta(res.records, res.delta);
    if (write) {
      csv.close();
      write_csv(res.records, (out_dir / c.csv_name).string());
    }
  }
  res.final_state = std::move(state);
  return res;
}

}  // namespace sbe
