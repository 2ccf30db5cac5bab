#include "ufep/linear_solver.hpp"

#include "ufep/types.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ufep {

CgResult cg_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, const CgOptions& opts,
                  const Eigen::VectorXd* x0) {
  const Eigen::Index n = b.size();
  if (a.rows() != n || a.cols() != n) throw SolverError("cg_solve: dimension mismatch");
  CgResult res;
  res.x = x0 != nullptr ? *x0 : Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    return res;
  }

  Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
  if (opts.jacobi) {
    const Eigen::VectorXd diag = a.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(diag[i] > 0.0)) throw SolverError("cg_solve: non-positive diagonal entry");
      inv_diag[i] = 1.0 / diag[i];
    }
  }
  const long max_iters = opts.max_iters > 0 ? opts.max_iters : 10 * static_cast<long>(n);
  const double target = opts.rel_tol * bnorm;

  Eigen::VectorXd r = b - a * res.x;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(n);
  double rz = r.dot(z);
  double rnorm = r.norm();

  while (rnorm > target) {
    if (res.iterations >= max_iters) {
      if (!opts.throw_on_failure) {
        res.converged = false;
        break;
      }
      std::ostringstream msg;
      msg << "cg_solve: no convergence after " << res.iterations << " iterations, relative residual "
          << rnorm / bnorm;
      throw SolverError(msg.str());
    }
    ap.noalias() = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      std::ostringstream msg;
      msg << "cg_solve: breakdown, p^T A p = " << pap << " at iteration " << res.iterations;
      throw SolverError(msg.str());
    }
    const double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    ++res.iterations;
    rnorm = r.norm();
    if (rnorm <= target) {
      // Confirm with the true residual; restart from it if they drifted apart.
      r = b - a * res.x;
      rnorm = r.norm();
      if (rnorm <= target) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.rel_residual = (b - a * res.x).norm() / bnorm;
  return res;
}

ConditionEstimate estimate_condition(const Eigen::SparseMatrix<double>& a, int max_iters, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) throw SolverError("estimate_condition: empty matrix");
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = dist(rng);
  start.normalize();

  ConditionEstimate est;
  Eigen::VectorXd x = start;
  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::VectorXd y = a * x;
    const double next = x.dot(y);
    x = y / y.norm();
    est.power_iterations = it;
    if (it > 1 && std::abs(next - lambda) <= tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  est.lambda_max = lambda;

  CgOptions inner;
  inner.rel_tol = 1e-13;
  inner.max_iters = 20 * n + 100;
  inner.throw_on_failure = false;
  x = start;
  double mu = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::VectorXd y = cg_solve(a, x, inner).x;
    const double next = x.dot(y);
    x = y / y.norm();
    est.inverse_iterations = it;
    if (it > 1 && std::abs(next - mu) <= tol * std::abs(next)) {
      mu = next;
      break;
    }
    mu = next;
  }
  est.lambda_min = 1.0 / mu;
  est.condition = est.lambda_max / est.lambda_min;
  return est;
}

}  // namespace ufep
