#pragma once

#include "ufep/aggregation.hpp"
#include "ufep/cut_geometry.hpp"
#include "ufep/quadtree.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ufep {

/// Strongly imposed displacement component on a face of the root box.
struct StrongDirichlet {
  Side face = Side::xmin;
  int component = 0;
};

struct SpaceOptions {
  bool aggregate = true;
  std::vector<StrongDirichlet> dirichlet;
};

enum class DofKind : std::uint8_t { free, dirichlet, constrained };
enum class ConstraintKind : std::uint8_t { hanging, ill_posed };

struct ConstraintRow {
  std::size_t dof = 0;
  ConstraintKind kind = ConstraintKind::hanging;
  /// Masters are free or Dirichlet DOFs after chain resolution.
  std::vector<std::pair<std::size_t, double>> masters;
};

struct FieldValue {
  Vec2 value = Vec2::Zero();
  Eigen::Matrix2d gradient = Eigen::Matrix2d::Zero();  ///< gradient(i, j) = d u_i / d x_j
  bool extrapolated = false;                           ///< point outside the cell square
};

/// Continuous Q1 vector space on the active cells with hanging-node and
/// aggregation constraints.
///
/// Nodes sit at corners of active leaves and are keyed by their position on
/// the kMaxDepth lattice. DOF d belongs to node d / 2, component d % 2.
class ContinuousSpace {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  ContinuousSpace(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes, const AggregateMap& aggregates,
                  const SpaceOptions& options = {});

  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::size_t dof_count() const { return 2 * nodes_.size(); }
  [[nodiscard]] std::size_t free_count() const { return free_dofs_.size(); }
  [[nodiscard]] const Vec2& node(std::size_t n) const { return nodes_[n]; }
  [[nodiscard]] std::optional<std::size_t> find_node(std::uint64_t ix, std::uint64_t iy) const;

  /// Global nodes of an active leaf in lexicographic corner order.
  [[nodiscard]] const std::array<std::size_t, 4>& cell_nodes(std::size_t leaf) const;
  [[nodiscard]] std::array<std::size_t, 8> cell_dofs(std::size_t leaf) const;
  [[nodiscard]] bool is_active(std::size_t leaf) const { return cell_nodes_[leaf][0] != npos; }

  [[nodiscard]] DofKind kind(std::size_t dof) const { return kind_[dof]; }
  [[nodiscard]] std::size_t free_index(std::size_t dof) const { return free_index_[dof]; }
  [[nodiscard]] const std::vector<std::size_t>& free_dofs() const { return free_dofs_; }
  [[nodiscard]] const std::vector<ConstraintRow>& constraints() const { return rows_; }
  /// Hanging DOFs left free because their constraint cycle was singular.
  [[nodiscard]] std::size_t released_hanging() const { return released_; }

  /// Contribution of a global DOF to the free unknowns: (free index, weight).
  [[nodiscard]] const std::vector<std::pair<std::size_t, double>>& expansion(std::size_t dof) const {
    return expansion_[dof];
  }

  /// Full DOF vector from free values and prescribed Dirichlet values
  /// (`dirichlet` is full-length; only its Dirichlet entries are read).
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free, const Eigen::VectorXd& dirichlet) const;
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  /// Free part of a full vector.
  [[nodiscard]] Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;

  /// Full vector holding g(x, component) at Dirichlet DOFs, zero elsewhere.
  [[nodiscard]] Eigen::VectorXd dirichlet_values(const std::function<double(const Vec2&, int)>& g) const;

  /// Nodal interpolant of g on every DOF (no constraints applied).
  [[nodiscard]] Eigen::VectorXd interpolate(const std::function<Vec2(const Vec2&)>& g) const;

  /// Value and gradient of the field with full coefficient vector `full` on
  /// leaf `leaf` at physical point x.
  [[nodiscard]] FieldValue evaluate(const Eigen::VectorXd& full, std::size_t leaf, const Vec2& x) const;

  [[nodiscard]] const QuadtreeMesh& mesh() const { return *mesh_; }

  /// CSV dump: dof,node_x,node_y,component,kind,master,coefficient
  void write_constraints_csv(std::ostream& os) const;

 private:
  const QuadtreeMesh* mesh_;
  std::vector<Vec2> nodes_;
  std::unordered_map<std::uint64_t, std::size_t> node_index_;
  std::vector<std::array<std::size_t, 4>> cell_nodes_;
  std::vector<DofKind> kind_;
  std::vector<std::size_t> free_index_;
  std::vector<std::size_t> free_dofs_;
  std::vector<ConstraintRow> rows_;
  std::vector<std::vector<std::pair<std::size_t, double>>> expansion_;
  std::size_t released_ = 0;
};

}  // namespace ufep
