#include <catch2/catch_amalgamated.hpp>

#include "sbe/sbe.hpp"

using namespace sbe;

namespace {

ExperimentConfig small() {
  ExperimentConfig c;
  c.cells = 16;
  c.nodes_per_axis = 24;
  c.half_width = 6.0;
  c.t_final = 10.0;
  c.record_every = 10;
  c.initial.perturbation = 0.3;
  return c;
}

}  // namespace

TEST_CASE("run from equilibrium stays at equilibrium", "[runner]") {
  ExperimentConfig c = small();
  c.initial.perturbation = 0.0;
  c.initial.amplitude = 0.0;
  c.t_final = 2.0;
  const RunResult r = run_experiment(c);
  for (const DiagnosticsRecord& rec : r.records) CHECK(rec.dist_total <= 1e-12);
}

TEST_CASE("relaxing run conserves mass and decreases H", "[runner]") {
  const RunResult r = run_experiment(small());
  REQUIRE(r.records.size() > 20);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    CHECK(std::abs(r.records[i].mass - r.reference_mass) <= 1e-12 * r.reference_mass);
    CHECK(r.records[i].H <= r.records[i - 1].H + 1e-12 * std::abs(r.records.front().H));
  }
  CHECK(r.records.back().dist_total < 1e-2 * r.records.front().dist_total);
  const RateReport rep = estimate_decay_rate(r.records);
  CHECK(rep.lambda_obs > 0.0);
  CHECK(rep.r_squared >= 0.99);
}

TEST_CASE("decay rate is stable under halving dt", "[runner]") {
  const ExperimentConfig c = small();
  const RunResult a = run_experiment(c);
  ExperimentConfig h = c;
  h.dt = a.dt / 2.0;
  h.record_every = 2 * c.record_every;
  const RunResult b = run_experiment(h);
  const double la = estimate_decay_rate(a.records).lambda_obs;
  const double lb = estimate_decay_rate(b.records).lambda_obs;
  CHECK(std::abs(la - lb) <= 0.05 * la);
}

TEST_CASE("time step above the stability limit is rejected", "[runner]") {
  ExperimentConfig c = small();
  c.dt = 2.0;
  c.t_final = 20.0;
  CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
}

TEST_CASE("automatic delta picks an admissible candidate", "[runner]") {
  ExperimentConfig c = small();
  c.delta.reset();
  const RunResult r = run_experiment(c);
  REQUIRE(r.delta_scan.has_value());
  CHECK(r.delta == r.delta_scan->chosen);
  bool found = false;
  for (const DeltaCandidate& d : r.delta_scan->candidates) found = found || (d.delta == r.delta && d.admissible);
  CHECK(found);
}

TEST_CASE("output directory receives csv, config and snapshots", "[runner]") {
  const auto dir = std::filesystem::temp_directory_path() / "sbe_runner_out";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = small();
  c.t_final = 1.0;
  c.output_dir = dir.string();
  const RunResult r = run_experiment(c);
  const CsvLoad back = load_csv((dir / c.csv_name).string());
  CHECK(back.records.size() == r.records.size());
  CHECK(std::filesystem::exists(dir / "config.txt"));
  CHECK(std::filesystem::exists(dir / "snapshots" / snapshot_name(0)));
  std::filesystem::remove_all(dir);
}
