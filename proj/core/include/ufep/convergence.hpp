#pragma once

#include "ufep/config.hpp"
#include "ufep/thick_cylinder.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ufep {

struct ConvergenceRecord {
  std::string label;
  unsigned level = 0;
  std::size_t free_dofs = 0;
  double err_rr = 0.0;  ///< relative L2 error of sigma_rr
  double err_tt = 0.0;  ///< relative L2 error of sigma_tt
  double energy_err = 0.0;  ///< relative error in the elastic complementary-energy norm
  double seconds = 0.0;
};

struct StressErrors {
  double err_rr = 0.0;
  double err_tt = 0.0;
  double energy_err = 0.0;
};

/// Stress errors against the thick-cylinder solution (centered at the
/// origin), integrated with quadrature raised by `extra` over the assembly
/// rule. `history` is the history the final solve started from.
StressErrors cylinder_stress_errors(const Assembler& assembler, const Eigen::VectorXd& u_full,
                                    const HistoryField& history, const ThickCylinderExact& exact, int extra = 2);

ThickCylinderExact reference_solution(const ProblemConfig& cfg);

/// Uniform sweep without adaptation: one full load-stepping run per level
/// in [first_level, first_level + levels). Requires cfg.reference.
std::vector<ConvergenceRecord> convergence_sweep(const ProblemConfig& cfg, unsigned first_level, int levels,
                                                 RunLog* log = nullptr);

/// Least-squares slope of log(err) against log(free DOFs) over records [begin, end).
double loglog_slope(const std::vector<ConvergenceRecord>& recs, double ConvergenceRecord::*err, std::size_t begin = 0,
                    std::size_t end = static_cast<std::size_t>(-1));

/// RFC-4180 CSV (CRLF line ends).
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& recs);

}  // namespace ufep
