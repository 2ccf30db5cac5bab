#pragma once

#include "ufep/assembler.hpp"
#include "ufep/linear_solver.hpp"
#include "ufep/run_log.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ufep {

struct NewtonConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iters = 50;
  double armijo = 1e-4;
  double min_step = 1e-8;
  /// A full step that fails the sufficient-decrease test once ||r|| is below
  /// this fraction of ||r_0|| is taken as round-off stagnation: the iterate
  /// is accepted and a warning is logged. Zero disables the check.
  double stagnation_tol = 1e-9;
  /// Residual norm that rel_tol refers to when it exceeds ||r_0||, e.g. the
  /// initial residual of the solve that produced the starting state.
  double reference_residual = 0.0;
  CgOptions cg;
};

struct NewtonIteration {
  int iter = 0;
  double residual = 0.0;  ///< ||r|| after the update
  double omega = 1.0;
  long cg_iterations = 0;
  bool floor_accepted = false;
};

struct NewtonResult {
  Eigen::VectorXd u_free;
  std::optional<HistoryField> history;  ///< recomputed at history nodes on success
  std::vector<NewtonIteration> log;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  bool stagnated = false;  ///< accepted at the round-off floor above the tolerance
  std::string message;

  [[nodiscard]] int iterations() const { return static_cast<int>(log.size()); }
};

/// Newton iteration with cubic backtracking on 0.5 ||r||^2 for one load
/// step. `history` is the converged state of the previous step.
NewtonResult newton_solve(const Assembler& assembler, const Eigen::VectorXd& u_free, const HistoryField& history,
                          double lambda, const NewtonConfig& cfg = {}, RunLog* log = nullptr, int step = 0);

}  // namespace ufep
