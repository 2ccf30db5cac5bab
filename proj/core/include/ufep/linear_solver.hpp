#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace ufep {

struct CgOptions {
  double rel_tol = 1e-12;
  long max_iters = 0;  ///< 0 selects 10 n
  bool jacobi = true;
  bool throw_on_failure = true;  ///< otherwise return the last iterate
};

struct CgResult {
  Eigen::VectorXd x;
  long iterations = 0;
  double rel_residual = 0.0;  ///< true residual ||b - A x|| / ||b||
  bool converged = true;
};

/// Preconditioned conjugate gradients for symmetric positive definite A.
/// Throws SolverError on breakdown (p^T A p <= 0) or when the iteration
/// budget is exhausted.
CgResult cg_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, const CgOptions& opts = {},
                  const Eigen::VectorXd* x0 = nullptr);

struct ConditionEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double condition = 0.0;
  int power_iterations = 0;
  int inverse_iterations = 0;
};

/// Extreme eigenvalues of an SPD matrix by power iteration on A and on
/// A^{-1} (applied with CG).
ConditionEstimate estimate_condition(const Eigen::SparseMatrix<double>& a, int max_iters = 2000, double tol = 1e-10);

}  // namespace ufep
