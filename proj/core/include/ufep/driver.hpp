#pragma once

#include "ufep/assembler.hpp"
#include "ufep/discretization.hpp"
#include "ufep/newton.hpp"
#include "ufep/run_log.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ufep {

struct AmrConfig {
  int num_load_steps = 1;
  int amr_step_freq = 1;
  int num_amr_steps = 0;  ///< adaptation cycles allowed per adaptive load step
  double eta_g_max = std::numeric_limits<double>::infinity();
  double theta_r = 0.1;
  double theta_c = 0.05;
  unsigned max_level = 8;
  unsigned initial_uniform_level = 2;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct StepReport {
  int load_step = 0;
  int amr_cycles = 0;
  std::size_t free_dofs = 0;
  std::size_t total_cells = 0;
  std::size_t active_cells = 0;
  double active_fraction = 0.0;
  double eta_g = 0.0;  ///< NaN when the energy vanishes
  int newton_iters = 0;  ///< iterations of the last solve of the step
};

struct AdaptationEvent {
  int load_step = 0;
  int cycle = 0;  ///< 1-based within the load step
  double eta_before = 0.0;
  double eta_after = 0.0;
  std::size_t cells_before = 0;
  std::size_t cells_after = 0;
  std::size_t dofs_before = 0;
  std::size_t dofs_after = 0;
};

struct SimulationSetup {
  double length = 1.0;  ///< side of the background box [0, L]^2
  LevelSet level_set = LevelSet::half_plane(Vec2(-1.0, 0.0), 0.0, "");
  Problem problem;
  DiscretizationOptions discretization;
  AmrConfig amr;
  NewtonConfig newton;
  double load_scale = 1.0;  ///< load factor of step n is load_scale * n / N
  std::string output_dir;  ///< VTK snapshots go here; empty disables output
};

/// Converged state of one load step on one mesh.
struct SolverState {
  std::shared_ptr<const Discretization> disc;
  Eigen::VectorXd u_free;
  HistoryField history;
  double lambda = 0.0;
};

struct SimulationResult {
  std::vector<StepReport> reports;
  std::vector<AdaptationEvent> events;
  std::optional<SolverState> state;  ///< last converged state (checkpoint on failure)
  /// History the last solve started from; stresses of `state` are
  /// sigma(u, history_before).
  std::optional<HistoryField> history_before;
  bool failed = false;
  std::string failure;
  int vtk_files = 0;
};

/// Uniform mesh at `level` followed by sweeps that coarsen complete sibling
/// quadruples of exterior leaves until nothing changes.
QuadtreeMesh initial_mesh(double length, unsigned level, unsigned max_level, const LevelSet& ls,
                          const CutOptions& opts = {});

/// Load stepping with estimator-driven adaptation. Newton failures abort the
/// run: `failed` is set and the checkpoint of the last converged step is
/// returned (and written to `<output_dir>/checkpoint.vtu`).
SimulationResult run_simulation(const SimulationSetup& setup, RunLog& log);

/// RFC-4180 CSV of the step reports (CRLF line ends).
void write_reports_csv(std::ostream& os, const std::vector<StepReport>& reports);

}  // namespace ufep
