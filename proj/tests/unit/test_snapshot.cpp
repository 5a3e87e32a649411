#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "sbe/experiment/runner.hpp"
#include "sbe/experiment/snapshot.hpp"

using namespace sbe;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sbe_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small() {
  ExperimentConfig c;
  c.cells = 16;
  c.nodes_per_axis = 16;
  c.record_every = 20;
  c.audit_every = 100;
  c.initial.perturbation = 0.2;
  return c;
}

}  // namespace

TEST_CASE("dump and load are bit-faithful", "[snapshot]") {
  auto vg = std::make_shared<const VelocityGrid>(build_velocity_grid(2, 6.0, 8));
  Snapshot s{random_sandwich_state({0.3, 3.0}, make_spatial_grid(6), vg, 4), 1.2345, {0.3, 3.0}};
  s.state.time = 5.125;
  s.state.step = 4242;
  s.state.kappa_cache = {1, 2, 3, 4, 5, 6};
  std::stringstream ss;
  snapshot_dump(s, ss);
  const Snapshot r = snapshot_load(ss);
  CHECK(r.state.f == s.state.f);
  CHECK(r.state.kappa_cache == s.state.kappa_cache);
  CHECK(r.state.time == s.state.time);
  CHECK(r.state.step == s.state.step);
  CHECK(r.state.sgrid.cells == 6);
  CHECK(r.state.vgrid->dim == 2);
  CHECK(r.state.vgrid->nodes_per_axis == 8);
  CHECK(r.state.vgrid->half_width == 6.0);
  CHECK(r.reference_mass == s.reference_mass);
  CHECK(r.sandwich.kappa_minus == 0.3);
  CHECK(r.sandwich.kappa_plus == 3.0);
}

TEST_CASE("version, magic, truncation and grid mismatch errors", "[snapshot]") {
  auto vg = std::make_shared<const VelocityGrid>(build_velocity_grid(1, 8.0, 8));
  const Snapshot s{PhaseState(make_spatial_grid(4), vg), 1.0, {1.0, 1.0}};
  std::stringstream ss;
  snapshot_dump(s, ss);
  const std::string bytes = ss.str();

  std::string v2 = bytes;
  v2[8] = 2;
  std::istringstream in_v(v2);
  CHECK_THROWS_WITH(snapshot_load(in_v), Catch::Matchers::ContainsSubstring("unsupported version 2"));

  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream in_m(bad);
  CHECK_THROWS_AS(snapshot_load(in_m), FormatError);

  std::istringstream in_t(bytes.substr(0, bytes.size() - 9));
  CHECK_THROWS_AS(snapshot_load(in_t), FormatError);

  const fs::path dir = temp_dir("mismatch");
  snapshot_dump(s, (dir / "s.bin").string());
  const VelocityGrid other = build_velocity_grid(1, 8.0, 16);
  CHECK_THROWS_AS(snapshot_load((dir / "s.bin").string(), other, make_spatial_grid(4)), FormatError);
  CHECK_THROWS_AS(snapshot_load((dir / "s.bin").string(), *vg, make_spatial_grid(8)), FormatError);
  CHECK_NOTHROW(snapshot_load((dir / "s.bin").string(), *vg, make_spatial_grid(4)));
}

TEST_CASE("restart from a snapshot reproduces the trajectory bit for bit", "[snapshot]") {
  ExperimentConfig full = small();
  full.t_final = 10.0;
  full.output_dir = temp_dir("restart_full").string();
  const RunResult ref = run_experiment(full);

  // Stop near t = 5 on a step that is both recorded and sampled, then continue
  // from the snapshot taken there.
  ExperimentConfig first = small();
  first.t_final = 700 * ref.dt;
  first.dt = ref.dt;
  first.output_dir = temp_dir("restart_first").string();
  const RunResult a = run_experiment(first);
  const std::int64_t mid = a.final_state.step;
  REQUIRE(mid == 700);
  const fs::path snap = fs::path(first.output_dir) / "snapshots" / snapshot_name(mid);
  REQUIRE(fs::exists(snap));

  ExperimentConfig second = small();
  second.t_final = 10.0;
  second.dt = ref.dt;
  second.output_dir = temp_dir("restart_second").string();
  RunOptions opt;
  opt.resume_from = snap.string();
  const RunResult b = run_experiment(second, opt);

  CHECK(b.final_state.f == ref.final_state.f);
  CHECK(b.final_state.time == ref.final_state.time);
  CHECK(b.final_state.step == ref.final_state.step);
  REQUIRE(a.records.size() + b.records.size() == ref.records.size());
  for (std::size_t i = 0; i < b.records.size(); ++i)
    CHECK(csv_row(b.records[i]) == csv_row(ref.records[a.records.size() + i]));
}
