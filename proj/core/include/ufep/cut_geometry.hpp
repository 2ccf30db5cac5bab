#pragma once

#include "ufep/level_set.hpp"
#include "ufep/quadrature.hpp"
#include "ufep/quadtree.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ufep {

enum class CellClass : std::uint8_t { interior = 0, cut = 1, exterior = 2 };

const char* to_string(CellClass c);

struct CutOptions {
  int volume_degree = 4;        ///< simplex rule degree for cut-cell volumes
  int boundary_points = 3;      ///< Gauss points per boundary segment
  int bisection_iterations = 30;
  int edge_samples = 8;         ///< interior samples per edge for classification
};

/// Straight piece of the approximated boundary inside one cut cell.
struct BoundarySegment {
  Vec2 a;
  Vec2 b;
  Vec2 normal;  ///< unit, pointing out of the domain
  std::string tag;
  Quadrature quadrature;

  [[nodiscard]] double length() const { return (b - a).norm(); }
  [[nodiscard]] Vec2 midpoint() const { return 0.5 * (a + b); }
};

/// Integration data of T intersected with the domain for a cut cell T.
struct CutCell {
  std::vector<std::array<Vec2, 3>> triangles;
  std::vector<BoundarySegment> segments;
  Quadrature volume;

  [[nodiscard]] double area() const;
};

/// Classify a single square from corner signs and sampled edge crossings.
/// `degenerate` is set when the level set vanishes at every sample.
CellClass classify_square(const Square& cell, const LevelSet& ls, const CutOptions& opts, bool* degenerate = nullptr);

/// Per-leaf classes, in leaf order. Degenerate cells (level set identically
/// zero on the samples) are classified cut and reported in `degenerate`.
std::vector<CellClass> classify_cells(const QuadtreeMesh& mesh, const LevelSet& ls, const CutOptions& opts = {},
                                      std::vector<CellId>* degenerate = nullptr);

/// Marching-squares reconstruction of T intersected with the domain.
CutCell triangulate_cut_cell(const Square& cell, const LevelSet& ls, const CutOptions& opts = {});

/// Zero of the level set on [inside, outside] (phi(inside) <= 0 < phi(outside)):
/// bisection followed by one linear interpolation in the final bracket.
Vec2 edge_root(const LevelSet& ls, Vec2 inside, Vec2 outside, int iterations);

/// Part of segment [a, b] inside the domain, using the same endpoint-sign
/// rule as the marching-squares reconstruction. Empty if outside.
std::optional<std::pair<Vec2, Vec2>> clip_segment(const Vec2& a, const Vec2& b, const LevelSet& ls, int iterations = 30);

/// Classification plus cut-cell integration data for a whole mesh.
class EmbeddedGeometry {
 public:
  static EmbeddedGeometry build(const QuadtreeMesh& mesh, const LevelSet& ls, const CutOptions& opts = {});

  [[nodiscard]] const std::vector<CellClass>& classes() const { return classes_; }
  [[nodiscard]] CellClass cell_class(std::size_t leaf) const { return classes_[leaf]; }
  [[nodiscard]] bool is_active(std::size_t leaf) const { return classes_[leaf] != CellClass::exterior; }
  [[nodiscard]] const CutCell& cut_cell(std::size_t leaf) const;
  [[nodiscard]] const std::vector<CellId>& degenerate_cells() const { return degenerate_; }
  [[nodiscard]] const CutOptions& options() const { return options_; }

  /// Sum of interior-cell areas and cut-cell sub-triangle areas.
  [[nodiscard]] double domain_area(const QuadtreeMesh& mesh) const;
  [[nodiscard]] std::size_t count(CellClass c) const;

 private:
  std::vector<CellClass> classes_;
  std::vector<std::optional<CutCell>> cut_;
  std::vector<CellId> degenerate_;
  CutOptions options_;
};

}  // namespace ufep
