#pragma once

#include "ufep/discretization.hpp"
#include "ufep/history_space.hpp"

#include <Eigen/Core>

namespace ufep {

struct TransferResult {
  Eigen::VectorXd u_free;  ///< free DOFs of the new space
  HistoryField history;
  std::size_t clamped_alpha = 0;  ///< history DOFs with negative alpha reset to 0
};

/// Move displacement and history from an old discretization to an adapted
/// one. Leaves present in both meshes copy through, children of refined
/// leaves use nodal interpolation of the old parent field, and parents of
/// coarsened leaves use a cell-local L2 projection of the old children.
/// Only free DOFs of the new space are set; constrained values follow from
/// the constraints. Throws MeshError if the change log does not explain the
/// new mesh.
TransferResult transfer_fields(const Discretization& old_disc, const Discretization& new_disc, const ChangeLog& log,
                               const Eigen::VectorXd& u_old_full, const HistoryField& history_old);

/// Old leaves covered by `cell` (its descendants in SFC order).
std::vector<std::size_t> descendant_leaves(const QuadtreeMesh& mesh, const CellId& cell);

}  // namespace ufep
