#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "thermofrac/config.hpp"
#include "thermofrac/output.hpp"
#include "thermofrac/simulation.hpp"
#include "thermofrac/verify.hpp"

namespace fs = std::filesystem;
using namespace thermofrac;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

void print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks) fmt::print("{} {}{}\n", c.pass ? "PASS" : "FAIL", c.name, c.detail);
}

int cmd_run(const std::string& path, const std::string& out_override, bool quiet) {
  RunConfig cfg;
  Problem problem;
  try {
    cfg = load_config(path);
    problem = make_problem(cfg);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }
  const fs::path dir = out_override.empty() ? output_directory(cfg.output.directory) : fs::path(out_override);

  Simulation sim(std::move(problem), cfg.solver);
  if (!quiet) sim.set_progress([](const std::string& line) { fmt::print("{}\n", line); });
  OutputWriter writer(dir, cfg.output.every, cfg.output.vtk, cfg.output.csv);
  sim.add_step_hook([&writer](const StepInfo& info) { writer(info); });
  sim.add_step_hook([quiet](const StepInfo& info) {
    if (quiet) return;
    std::string sizes;
    for (const auto& fr : info.problem->grid.fractures) sizes += fmt::format(" {:.6g}", fr.length());
    fmt::print("step {} t={:g} iterations {} fracture lengths{}\n", info.step, info.time, info.report->iterations,
               sizes);
  });
  try {
    sim.run();
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "solver failure at t={:g}: {}\n", sim.time(), e.what());
    fmt::print(stderr, "warning: output in {} is partial\n", dir.string());
    return kSolverFailure;
  } catch (const LinearSolveError& e) {
    fmt::print(stderr, "solver failure at t={:g}: {}\n", sim.time(), e.what());
    fmt::print(stderr, "warning: output in {} is partial\n", dir.string());
    return kSolverFailure;
  } catch (const OutputError& e) {
    fmt::print(stderr, "output failure: {}\nwarning: output in {} is partial\n", e.what(), dir.string());
    return kSolverFailure;
  }
  {
    std::ofstream log(dir / "propagation.csv");
    sim.propagation_log().write_csv(log);
  }
  fmt::print("finished {} steps, t={:g}; worst mass balance {:.2e}, energy balance {:.2e}; {} resolution warnings\n",
             sim.steps(), sim.time(), sim.worst_mass_error(), sim.worst_energy_error(), sim.warnings().size());
  return kOk;
}

int cmd_sneddon(int levels, const std::string& reference_path, const std::string& out_dir) {
  std::map<double, double> reference;
  {
    std::ifstream in(reference_path);
    if (!in) {
      fmt::print(stderr, "cannot open Sneddon reference {}\n", reference_path);
      return kConfigError;
    }
    reference = read_sneddon_reference(in);
  }
  std::vector<SneddonResult> results;
  fmt::print("{:>10} {:>5} {:>12} {:>12} {:>12} {:>12}\n", "h", "nu", "K_I left", "K_I right", "E_I", "E_II");
  try {
    for (double nu : sneddon_poisson_ratios()) {
      for (double h : sneddon_mesh_sizes(levels)) {
        SneddonSetup s;
        s.h = h;
        s.poisson_ratio = nu;
        results.push_back(run_sneddon(s));
        const auto& r = results.back();
        fmt::print("{:>10g} {:>5g} {:>12.5e} {:>12.5e} {:>12.5f} {:>12.3e}\n", h, nu, r.sifs[0].k_i, r.sifs[1].k_i,
                   r.error_i, r.error_ii);
      }
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  }
  const fs::path dir = output_directory(out_dir);
  fs::create_directories(dir);
  std::ofstream csv(dir / "sneddon_errors.csv");
  write_sneddon_csv(csv, results);
  const auto checks = check_sneddon(results, reference);
  print_checks(checks);
  return all_pass(checks) ? kOk : kSolverFailure;
}

int cmd_speed(int levels, int jobs, double t_end, const std::string& out_dir) {
  SpeedStudyOptions opt;
  opt.mesh_sizes.resize(std::min<std::size_t>(levels, opt.mesh_sizes.size()));
  opt.jobs = jobs;
  opt.t_end = t_end;
  std::vector<SpeedRun> runs;
  try {
    runs = propagation_speed_study(opt);
  } catch (const std::exception& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  }
  fmt::print("{:>8} {:>6} {:>8} {:>12} {:>7} {:>9} {:>8}\n", "h", "dt", "onset", "speed", "splits", "warnings",
             "seconds");
  for (const auto& r : runs) {
    fmt::print("{:>8} {:>6g} {:>8} {:>12.4e} {:>7} {:>9} {:>8.1f}\n", fmt::format("1/{:.0f}", 1.0 / r.h), r.dt,
               r.inconclusive ? std::string("-") : fmt::format("{:g}", r.onset_time), r.mean_speed, r.splits,
               r.resolution_warnings, r.seconds);
  }
  const fs::path dir = output_directory(out_dir);
  fs::create_directories(dir);
  std::ofstream csv(dir / "speed_study.csv");
  write_speed_csv(csv, runs);
  const auto checks = check_speed_study(runs);
  print_checks(checks);
  return all_pass(checks) ? kOk : kSolverFailure;
}

int cmd_check_grid(const std::string& path) {
  RunConfig cfg;
  Problem problem;
  try {
    cfg = load_config(path);
    problem = make_problem(cfg);
  } catch (const std::exception& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }
  const auto& mdg = problem.grid;
  fmt::print("matrix: {} cells, {} faces, {} nodes\n", mdg.matrix.num_cells(), mdg.matrix.num_faces(),
             mdg.matrix.num_nodes());
  for (std::size_t i = 0; i < mdg.fractures.size(); ++i) {
    fmt::print("fracture {}: {} cells, length {:g}\n", i, mdg.fractures[i].grid.num_cells(), mdg.fractures[i].length());
  }
  fmt::print("interfaces: {}, mortar cells {}\n", mdg.interfaces.size(), mdg.num_mortar_cells());
  const auto problems = check_consistency(mdg);
  for (const auto& p : problems) fmt::print("violation: {}\n", p);
  fmt::print("{}\n", problems.empty() ? "PASS" : "FAIL");
  return problems.empty() ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermo-hydro-mechanical fracture propagation simulator"};
  app.require_subcommand(1);

  std::string config, out_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a simulation from a YAML config");
  run->add_option("config", config, "Config file")->required();
  run->add_option("-o,--output", out_dir, "Output directory (overrides config and THERMOFRAC_OUTPUT_DIR)");
  run->add_flag("-q,--quiet", quiet, "Only print the summary");

  int mesh_levels = 3;
  std::string reference = THERMOFRAC_SNEDDON_REFERENCE;
  std::string verify_out = "output";
  auto* sneddon = app.add_subcommand("verify-sneddon", "Pressurised crack SIF benchmark");
  sneddon->add_option("--mesh-levels", mesh_levels, "Number of mesh levels starting at h = 1.25")
      ->check(CLI::Range(1, 6));
  sneddon->add_option("--reference", reference, "Fine-mesh reference CSV");
  sneddon->add_option("-o,--output", verify_out, "Directory for sneddon_errors.csv");

  int speed_levels = 3;
  int jobs = 1;
  double t_end = SpeedStudyOptions{}.t_end;
  auto* speed = app.add_subcommand("verify-speed", "Propagation speed study on the (h, dt) matrix");
  speed->add_option("--levels", speed_levels, "Number of mesh levels starting at h = 1/16")->check(CLI::Range(1, 3));
  speed->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::Range(1, 64));
  speed->add_option("--t-end", t_end, "End time [s]")->check(CLI::PositiveNumber);
  speed->add_option("-o,--output", verify_out, "Directory for speed_study.csv");

  auto* check = app.add_subcommand("check-grid", "Build the grid of a config and check its invariants");
  check->add_option("config", config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kOk;
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out_dir, quiet);
    if (*sneddon) return cmd_sneddon(mesh_levels, reference, verify_out);
    if (*speed) return cmd_speed(speed_levels, jobs, t_end, verify_out);
    if (*check) return cmd_check_grid(config);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSolverFailure;
  }
  return kConfigError;
}
