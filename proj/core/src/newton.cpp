#include "ufep/newton.hpp"

#include <algorithm>
#include <cmath>

namespace ufep {

NewtonResult newton_solve(const Assembler& assembler, const Eigen::VectorXd& u_free, const HistoryField& history,
                          double lambda, const NewtonConfig& cfg, RunLog* log, int step) {
  const Eigen::VectorXd g = assembler.dirichlet(lambda);
  const auto& space = assembler.discretization().space();
  auto residual_at = [&](const Eigen::VectorXd& free) {
    return assembler.residual(space.expand(free, g), history, lambda);
  };

  NewtonResult res;
  res.u_free = u_free;
  Eigen::VectorXd r = residual_at(res.u_free);
  double rnorm = r.norm();
  res.initial_residual = rnorm;
  const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::max(rnorm, cfg.reference_residual));
  Eigen::VectorXd best = res.u_free;
  double best_norm = rnorm;
  if (log != nullptr)
    log->event("newton", {{"step", RunLog::num(step)}, {"iter", "0"}, {"residual", RunLog::num(rnorm)}});

  try {
    for (int it = 1; it <= cfg.max_iters && rnorm > target; ++it) {
      const SparseSystem sys = assembler.jacobian(space.expand(res.u_free, g), history, lambda);
      const CgResult cg = cg_solve(sys.matrix, sys.rhs, cfg.cg);
      const Eigen::VectorXd& du = cg.x;

      const double f0 = 0.5 * rnorm * rnorm;
      const double slope = r.dot(sys.matrix * du);
      if (!(slope < 0.0)) throw SolverError("Newton direction is not a descent direction");

      NewtonIteration rec;
      rec.iter = it;
      rec.cg_iterations = cg.iterations;
      double omega = 1.0;
      double omega_prev = 0.0;
      double f_prev = 0.0;
      Eigen::VectorXd trial;
      Eigen::VectorXd r_trial;
      for (;;) {
        trial = res.u_free + omega * du;
        r_trial = residual_at(trial);
        const double f = 0.5 * r_trial.squaredNorm();
        if (f <= f0 + cfg.armijo * omega * slope) break;
        if (omega == 1.0 && rnorm <= cfg.stagnation_tol * res.initial_residual) {
          res.stagnated = true;
          break;
        }
        double next;
        if (omega == 1.0) {
          next = -slope / (2.0 * (f - f0 - slope));
        } else {
          const double t1 = f - f0 - omega * slope;
          const double t2 = f_prev - f0 - omega_prev * slope;
          const double denom = omega - omega_prev;
          const double a = (t1 / (omega * omega) - t2 / (omega_prev * omega_prev)) / denom;
          const double b = (-omega_prev * t1 / (omega * omega) + omega * t2 / (omega_prev * omega_prev)) / denom;
          if (a == 0.0) {
            next = -slope / (2.0 * b);
          } else {
            const double disc = std::max(b * b - 3.0 * a * slope, 0.0);
            next = (-b + std::sqrt(disc)) / (3.0 * a);
          }
          next = std::min(next, 0.5 * omega);
        }
        omega_prev = omega;
        f_prev = f;
        omega = std::max(next, 0.1 * omega);
        if (!(omega >= cfg.min_step)) {
          omega = cfg.min_step;
          trial = res.u_free + omega * du;
          r_trial = residual_at(trial);
          rec.floor_accepted = true;
          if (log != nullptr)
            log->warn("line_search_floor", "step accepted at the minimum relaxation",
                      {{"step", RunLog::num(step)}, {"iter", RunLog::num(it)}});
          break;
        }
      }
      if (res.stagnated) {
        if (log != nullptr)
          log->warn("newton_stagnation", "residual reached the round-off floor above the tolerance",
                    {{"step", RunLog::num(step)}, {"iter", RunLog::num(it)}, {"residual", RunLog::num(rnorm)}});
        break;
      }
      res.u_free = std::move(trial);
      r = std::move(r_trial);
      rnorm = r.norm();
      rec.omega = omega;
      rec.residual = rnorm;
      res.log.push_back(rec);
      if (rnorm < best_norm) {
        best_norm = rnorm;
        best = res.u_free;
      }
      if (log != nullptr)
        log->event("newton", {{"step", RunLog::num(step)},
                              {"iter", RunLog::num(it)},
                              {"residual", RunLog::num(rnorm)},
                              {"omega", RunLog::num(omega)},
                              {"cg_iters", RunLog::num(cg.iterations)}});
    }
  } catch (const Error& e) {
    res.message = e.what();
  }

  res.final_residual = rnorm;
  res.converged = res.message.empty() && (rnorm <= target || res.stagnated);
  if (!res.converged) {
    if (res.message.empty()) res.message = "Newton iteration budget exhausted";
    res.u_free = best;
    res.final_residual = best_norm;
    if (log != nullptr)
      log->warn("newton_failure", res.message, {{"step", RunLog::num(step)}, {"residual", RunLog::num(best_norm)}});
    return res;
  }
  res.history = assembler.update_history(space.expand(res.u_free, g), history);
  return res;
}

}  // namespace ufep
