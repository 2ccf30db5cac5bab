#pragma once

#include "ufep/aggregation.hpp"
#include "ufep/cut_geometry.hpp"
#include "ufep/j2_plasticity.hpp"
#include "ufep/quadtree.hpp"

#include <array>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace ufep {

enum class HistoryFlavor : std::uint8_t { standard, aggregated };

const char* to_string(HistoryFlavor f);

/// Gauss abscissae on [0,1] of the 2-point rule.
std::array<double, 2> history_abscissae();

/// Lagrange basis on the 2x2 Gauss nodes of the unit square, lexicographic.
std::array<double, 4> history_basis(const Vec2& xi);

/// Discontinuous history DOFs: four Gauss nodes per active cell.
class HistoryLayout {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Row {
    std::size_t dof = 0;
    std::array<std::pair<std::size_t, double>, 4> masters;
  };

  HistoryLayout(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes, const AggregateMap& aggregates,
                HistoryFlavor flavor);

  [[nodiscard]] HistoryFlavor flavor() const { return flavor_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  /// First DOF of an active leaf, npos for exterior leaves.
  [[nodiscard]] std::size_t offset(std::size_t leaf) const { return offset_[leaf]; }
  [[nodiscard]] const Vec2& node(std::size_t dof) const { return nodes_[dof]; }
  [[nodiscard]] std::size_t leaf_of(std::size_t dof) const { return leaf_[dof]; }
  [[nodiscard]] bool is_constrained(std::size_t dof) const { return constrained_[dof]; }
  [[nodiscard]] const std::vector<Row>& constraints() const { return rows_; }
  [[nodiscard]] const QuadtreeMesh& mesh() const { return *mesh_; }

 private:
  const QuadtreeMesh* mesh_;
  HistoryFlavor flavor_;
  std::vector<std::size_t> offset_;
  std::vector<Vec2> nodes_;
  std::vector<std::size_t> leaf_;
  std::vector<bool> constrained_;
  std::vector<Row> rows_;
};

/// Values of (alpha, eps_p) at the history DOFs of a layout.
class HistoryField {
 public:
  explicit HistoryField(std::shared_ptr<const HistoryLayout> layout);

  [[nodiscard]] const HistoryLayout& layout() const { return *layout_; }
  [[nodiscard]] std::shared_ptr<const HistoryLayout> layout_ptr() const { return layout_; }
  [[nodiscard]] std::vector<PointHistory>& values() { return values_; }
  [[nodiscard]] const std::vector<PointHistory>& values() const { return values_; }

  /// Bilinear interpolation of the cell's four node values at x.
  [[nodiscard]] PointHistory interpolate(std::size_t leaf, const Vec2& x) const;

  /// Overwrite constrained DOFs from their root-cell masters.
  void apply_constraints();

  [[nodiscard]] double min_alpha() const;

 private:
  std::shared_ptr<const HistoryLayout> layout_;
  std::vector<PointHistory> values_;
};

}  // namespace ufep
