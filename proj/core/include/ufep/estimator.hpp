#pragma once

#include "ufep/assembler.hpp"

#include <map>
#include <vector>

namespace ufep {

/// Jump indicator per leaf (zero on exterior leaves):
/// eta_T^2 = h_T / scale * sum over interior faces of 1/2 int |[sigma n]|^2,
/// faces clipped to the domain and integrated on the finer side.
/// The driver passes scale = 2G so that eta_G is dimensionless.
std::vector<double> kelly_estimator(const Assembler& assembler, const Eigen::VectorXd& u_full,
                                    const HistoryField& history, double scale = 1.0);

/// sqrt(sum eta_T^2 / energy). Throws SolverError if energy <= 0.
double global_error(const std::vector<double>& eta, double energy);

/// Sort active leaves by decreasing eta (ties by SFC order) and mark the
/// first ceil(theta_r N) for refinement and the last floor(theta_c N) for
/// coarsening. Leaves at max_level are not refined; the root is never
/// coarsened.
std::map<CellId, Mark> mark_cells(const QuadtreeMesh& mesh, const std::vector<double>& eta,
                                  const std::vector<CellClass>& classes, double theta_r, double theta_c);

}  // namespace ufep
