// Command-line front end: solve, converge, inspect.

#include "ufep/config.hpp"
#include "ufep/convergence.hpp"
#include "ufep/driver.hpp"
#include "ufep/vtk.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int run_solve(const std::string& config_path, const std::string& output, bool quiet) {
  ufep::ProblemConfig cfg = ufep::load_config(config_path);
  if (!output.empty()) cfg.output_dir = output;
  ufep::SimulationSetup setup = cfg.setup();

  std::ofstream log_file;
  if (!setup.output_dir.empty()) {
    fs::create_directories(setup.output_dir);
    log_file.open(fs::path(setup.output_dir) / "run.log");
  }
  std::ostream* sink = log_file.is_open() ? static_cast<std::ostream*>(&log_file) : (quiet ? nullptr : &std::cerr);
  ufep::RunLog log(sink);
  const ufep::SimulationResult res = ufep::run_simulation(setup, log);

  if (!setup.output_dir.empty()) {
    std::ofstream csv(fs::path(setup.output_dir) / "reports.csv", std::ios::binary);
    ufep::write_reports_csv(csv, res.reports);
  }
  if (!quiet) ufep::write_reports_csv(std::cout, res.reports);
  if (res.failed) {
    std::cerr << "error: solver failed: " << res.failure << "\n";
    return kExitSolver;
  }
  return 0;
}

int run_converge(const std::string& config_path, int levels, unsigned first, const std::string& csv_path) {
  const ufep::ProblemConfig cfg = ufep::load_config(config_path);
  ufep::RunLog log(&std::cerr);
  const auto recs = ufep::convergence_sweep(cfg, first, levels, &log);
  if (csv_path.empty()) {
    ufep::write_convergence_csv(std::cout, recs);
  } else {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw ufep::Error("cannot open " + csv_path);
    ufep::write_convergence_csv(os, recs);
  }
  if (recs.size() >= 2) {
    std::cerr << "slope sigma_rr " << ufep::loglog_slope(recs, &ufep::ConvergenceRecord::err_rr)
              << "  slope sigma_tt " << ufep::loglog_slope(recs, &ufep::ConvergenceRecord::err_tt) << "\n";
  }
  return 0;
}

int run_inspect(const std::string& config_path, const std::string& output) {
  const ufep::ProblemConfig cfg = ufep::load_config(config_path);
  const ufep::SimulationSetup setup = cfg.setup();
  auto mesh = ufep::initial_mesh(setup.length, setup.amr.initial_uniform_level, setup.amr.max_level,
                                 setup.level_set, setup.discretization.cut);
  auto disc = ufep::Discretization::build(std::move(mesh), setup.level_set, setup.discretization);
  std::string path = output;
  if (path.empty()) {
    const std::string dir = setup.output_dir.empty() ? "." : setup.output_dir;
    fs::create_directories(dir);
    path = (fs::path(dir) / "inspect.vtu").string();
  }
  ufep::write_vtk(path, *disc);
  const auto& g = disc->geometry();
  std::cout << "cells " << disc->mesh().size() << "\n"
            << "interior " << g.count(ufep::CellClass::interior) << "\n"
            << "cut " << g.count(ufep::CellClass::cut) << "\n"
            << "exterior " << g.count(ufep::CellClass::exterior) << "\n"
            << "free_dofs " << disc->space().free_count() << "\n"
            << "max_aggregate " << disc->aggregates().max_aggregate_size() << "\n"
            << "vtk " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unfitted adaptive finite elements for J2 plasticity"};
  app.require_subcommand(1);

  std::string config;
  std::string output;
  bool quiet = false;
  auto* solve = app.add_subcommand("solve", "Load stepping with adaptive refinement");
  solve->add_option("config", config, "Problem config (JSON)")->required();
  solve->add_option("-o,--output", output, "Output directory (overrides the config)");
  solve->add_flag("-q,--quiet", quiet, "Do not print the log and reports");

  int levels = 5;
  unsigned first = 2;
  std::string csv;
  auto* converge = app.add_subcommand("converge", "Uniform refinement sweep against the analytical solution");
  converge->add_option("config", config, "Problem config (JSON)")->required();
  converge->add_option("--levels", levels, "Number of meshes")->check(CLI::PositiveNumber);
  converge->add_option("--first-level", first, "Level of the coarsest mesh (2 is 4x4)");
  converge->add_option("--csv", csv, "Write the table here instead of stdout");

  std::string vtk;
  auto* inspect = app.add_subcommand("inspect", "Write the initial mesh with cell classes and aggregates");
  inspect->add_option("config", config, "Problem config (JSON)")->required();
  inspect->add_option("-o,--output", vtk, "VTK file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return run_solve(config, output, quiet);
    if (*converge) return run_converge(config, levels, first, csv);
    if (*inspect) return run_inspect(config, vtk);
  } catch (const ufep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
