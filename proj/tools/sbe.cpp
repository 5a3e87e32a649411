#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbe/sbe.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  int threads = 0;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
};

void write_report_files(const sbe::RateReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream txt(dir / "rate_report.txt");
  sbe::write_rate_report_text(txt, rep);
  std::ofstream kv(dir / "rate_report.kv");
  sbe::write_rate_report_kv(kv, rep);
}

std::vector<sbe::Snapshot> load_snapshot_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<sbe::Snapshot> out;
  for (const auto& f : files) out.push_back(sbe::snapshot_load(f.string()));
  return out;
}

int cmd_run(const std::string& config_path, const std::string& resume, const GlobalFlags& g) {
  sbe::ExperimentConfig c = sbe::load_config(config_path);
  if (!g.output_dir.empty()) c.output_dir = g.output_dir;
  if (c.output_dir.empty()) c.output_dir = "out";
  if (g.seed) c.initial.seed = *g.seed;

  sbe::RunOptions opt;
  opt.resume_from = resume;
  std::size_t n = 0;
  opt.on_record = [&](const sbe::DiagnosticsRecord& r) {
    if (n++ % 20 == 0)
      std::cerr << "t = " << r.time << "  dist = " << r.dist_total << "  H = " << r.H << '\n';
  };
  const sbe::RunResult res = sbe::run_experiment(c, opt);
  std::cout << "steps " << res.steps_taken << ", dt " << res.dt << ", kappa_inf " << res.f_inf.kappa << ", delta "
            << res.delta << '\n';
  std::cout << "diagnostics written to " << (fs::path(c.output_dir) / c.csv_name).string() << '\n';

  try {
    sbe::RateReport rep = sbe::estimate_decay_rate(res.records);
    rep.delta = res.delta;
    rep.lemma_constants = sbe::audit_proof_chain(res.records, res.samples, res.f_inf, res.kernel);
    sbe::write_rate_report_text(std::cout, rep);
    write_report_files(rep, c.output_dir);
  } catch (const sbe::InvalidArgument& e) {
    std::cerr << "no decay fit: " << e.what() << '\n';
  }
  return 0;
}

int cmd_fit(const std::string& csv_path, const GlobalFlags& g) {
  const sbe::CsvLoad load = sbe::load_csv(csv_path);
  if (load.warnings) std::cerr << "warning: dropped " << load.warnings << " truncated line(s)\n";
  sbe::RateReport rep = sbe::estimate_decay_rate(load.records);
  rep.lemma_constants = sbe::record_constants(load.records);
  sbe::write_rate_report_text(std::cout, rep);
  if (!g.output_dir.empty()) write_report_files(rep, g.output_dir);
  return 0;
}

int cmd_audit(const std::string& csv_path, const std::string& snap_dir, const std::string& config_path,
              const GlobalFlags& g) {
  const sbe::CsvLoad load = sbe::load_csv(csv_path);
  if (load.warnings) std::cerr << "warning: dropped " << load.warnings << " truncated line(s)\n";
  const std::vector<sbe::Snapshot> snaps = load_snapshot_dir(snap_dir);
  if (snaps.empty()) throw sbe::FormatError("no snapshots in " + snap_dir);

  const sbe::ExperimentConfig c = config_path.empty() ? sbe::ExperimentConfig{} : sbe::load_config(config_path);
  const auto& vg = snaps.front().state.vgrid;
  const sbe::CollisionKernel kernel = sbe::make_kernel(c, *vg);
  const sbe::EquilibriumProfile f_inf =
      sbe::global_equilibrium(snaps.front().reference_mass, snaps.front().state.sgrid.volume, *vg);
  std::vector<sbe::PhaseState> states;
  for (const auto& s : snaps) states.push_back(s.state);

  sbe::RateReport rep;
  try {
    rep = sbe::estimate_decay_rate(load.records);
  } catch (const sbe::InvalidArgument& e) {
    std::cerr << "no decay fit: " << e.what() << '\n';
  }
  rep.lemma_constants = sbe::audit_proof_chain(load.records, states, f_inf, kernel);
  sbe::write_rate_report_text(std::cout, rep);
  if (!g.output_dir.empty()) write_report_files(rep, g.output_dir);
  return 0;
}

int cmd_check() {
  bool all = true;
  for (const sbe::CheckResult& r : sbe::run_checks()) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiconductor Boltzmann relaxation solver"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed = 0;
  app.add_option("--threads", g.threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", g.output_dir, "directory for CSV, snapshots and reports");
  auto* seed_opt = app.add_option("--seed", seed, "override the initial-data seed");

  std::string config_path, resume, csv_path, snap_dir, audit_config;
  auto* run = app.add_subcommand("run", "evolve a configuration and write diagnostics");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--resume", resume, "continue from a snapshot")->check(CLI::ExistingFile);

  auto* fit = app.add_subcommand("fit", "fit the exponential decay rate of a diagnostics CSV");
  fit->add_option("csv", csv_path, "diagnostics CSV")->required()->check(CLI::ExistingFile);

  auto* audit = app.add_subcommand("audit", "evaluate the empirical proof-chain constants");
  audit->add_option("csv", csv_path, "diagnostics CSV")->required()->check(CLI::ExistingFile);
  audit->add_option("snapshots", snap_dir, "directory of state snapshots")->required()->check(CLI::ExistingDirectory);
  audit->add_option("--config", audit_config, "config describing the collision kernel")->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "run the invariant suite on built-in configurations");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;
  if (g.threads > 0) sbe::set_threads(g.threads);

  try {
    if (*run) return cmd_run(config_path, resume, g);
    if (*fit) return cmd_fit(csv_path, g);
    if (*audit) return cmd_audit(csv_path, snap_dir, audit_config, g);
    if (*check) return cmd_check();
  } catch (const sbe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
