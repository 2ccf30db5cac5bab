#pragma once

// Directional finite-difference check of the assembled Jacobian.

#include "ufep/assembler.hpp"

#include <Eigen/Core>

namespace oracle {

/// ||J w - (r(u + e w) - r(u - e w)) / 2e|| / ||J w|| with e = rel_step ||u|| / ||w||.
inline double jacobian_fd_error(const ufep::Assembler& a, const Eigen::VectorXd& u_free, const ufep::HistoryField& h,
                                double lambda, const Eigen::VectorXd& w, double rel_step = 1e-6) {
  const auto sys = a.jacobian(a.expand(u_free, lambda), h, lambda);
  const Eigen::VectorXd jw = sys.matrix * w;
  const double e = rel_step * std::max(u_free.norm(), 1e-30) / w.norm();
  const Eigen::VectorXd rp = a.residual(a.expand(u_free + e * w, lambda), h, lambda);
  const Eigen::VectorXd rm = a.residual(a.expand(u_free - e * w, lambda), h, lambda);
  return (jw - (rp - rm) / (2.0 * e)).norm() / jw.norm();
}

}  // namespace oracle
