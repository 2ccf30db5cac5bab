#pragma once

#include "ufep/aggregation.hpp"
#include "ufep/continuous_space.hpp"
#include "ufep/cut_geometry.hpp"
#include "ufep/history_space.hpp"
#include "ufep/level_set.hpp"
#include "ufep/quadrature.hpp"
#include "ufep/quadtree.hpp"

#include <memory>
#include <vector>

namespace ufep {

struct DiscretizationOptions {
  CutOptions cut;
  SpaceOptions space;
  HistoryFlavor history = HistoryFlavor::aggregated;
  int interior_points = 2;  ///< Gauss points per direction on interior cells
};

/// Everything built on one mesh: cut geometry, aggregates, the displacement
/// space, the history layout and per-cell volume quadratures.
class Discretization {
 public:
  static std::shared_ptr<const Discretization> build(QuadtreeMesh mesh, LevelSet ls, const DiscretizationOptions& opts);

  [[nodiscard]] const QuadtreeMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const LevelSet& level_set() const { return ls_; }
  [[nodiscard]] const EmbeddedGeometry& geometry() const { return geometry_; }
  [[nodiscard]] const AggregateMap& aggregates() const { return aggregates_; }
  [[nodiscard]] const ContinuousSpace& space() const { return *space_; }
  [[nodiscard]] const std::shared_ptr<const HistoryLayout>& history_layout() const { return history_; }
  [[nodiscard]] const DiscretizationOptions& options() const { return options_; }

  [[nodiscard]] const std::vector<std::size_t>& active_leaves() const { return active_; }
  [[nodiscard]] const Quadrature& volume_quadrature(std::size_t leaf) const { return volume_[leaf]; }
  [[nodiscard]] double cell_size(std::size_t leaf) const { return mesh_->cell_square(mesh_->leaves()[leaf]).size; }

  /// Quadrature over T intersected with the domain with `extra` more points
  /// per direction (interior) and `extra` more degrees (cut cells).
  [[nodiscard]] Quadrature raised_quadrature(std::size_t leaf, int extra) const;

  [[nodiscard]] double active_fraction() const {
    return static_cast<double>(active_.size()) / static_cast<double>(mesh_->size());
  }

 private:
  Discretization() = default;

  std::shared_ptr<const QuadtreeMesh> mesh_;
  LevelSet ls_ = LevelSet::circle(Vec2::Zero(), 1.0, "");
  EmbeddedGeometry geometry_;
  AggregateMap aggregates_;
  std::unique_ptr<ContinuousSpace> space_;
  std::shared_ptr<const HistoryLayout> history_;
  DiscretizationOptions options_;
  std::vector<std::size_t> active_;
  std::vector<Quadrature> volume_;
};

}  // namespace ufep
