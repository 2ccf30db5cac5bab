#pragma once

#include "ufep/cut_geometry.hpp"
#include "ufep/quadtree.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace ufep {

/// Assignment of every cut cell to one interior root cell.
///
/// Indices refer to positions in QuadtreeMesh::leaves(). Interior cells are
/// their own root; exterior cells have no root.
class AggregateMap {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  AggregateMap() = default;
  AggregateMap(std::vector<std::size_t> root, std::vector<int> distance, int sweeps);

  [[nodiscard]] std::size_t root_of(std::size_t leaf) const { return root_[leaf]; }
  [[nodiscard]] const std::vector<std::size_t>& roots() const { return root_; }
  /// Sweep in which the cell was attached (0 for interior, -1 exterior).
  [[nodiscard]] int distance(std::size_t leaf) const { return distance_[leaf]; }
  [[nodiscard]] int sweeps() const { return sweeps_; }

  /// Root followed by its members in leaf order.
  [[nodiscard]] std::vector<std::size_t> members_of(std::size_t root) const;
  [[nodiscard]] std::size_t max_aggregate_size() const;

 private:
  std::vector<std::size_t> root_;
  std::vector<int> distance_;
  int sweeps_ = 0;
};

/// Multi-source frontier sweeps from the interior cells over face
/// neighbors. In each sweep an unassigned cut cell touching assigned cells
/// takes the root of the lowest-ordered such neighbor. Throws GeometryError
/// when cut cells cannot reach any interior cell.
AggregateMap build_aggregates(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes);

}  // namespace ufep
