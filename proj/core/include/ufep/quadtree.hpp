#pragma once

#include "ufep/types.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace ufep {

/// Deepest refinement level representable by a CellId.
inline constexpr unsigned kMaxDepth = 30;

/// Quadtree cell addressed by refinement level and Morton (Z-order) key.
///
/// Ordering is the space-filling-curve order: cells are compared by their
/// Morton key lifted to kMaxDepth, ancestors before descendants.
struct CellId {
  std::uint32_t level = 0;
  std::uint64_t morton = 0;

  [[nodiscard]] std::uint64_t sfc_key() const { return morton << (2 * (kMaxDepth - level)); }
  [[nodiscard]] CellId parent() const { return {level - 1, morton >> 2}; }
  [[nodiscard]] CellId child(unsigned k) const { return {level + 1, (morton << 2) | k}; }
  [[nodiscard]] unsigned child_position() const { return static_cast<unsigned>(morton & 3U); }

  friend bool operator==(const CellId&, const CellId&) = default;
  friend std::strong_ordering operator<=>(const CellId& a, const CellId& b) {
    if (auto c = a.sfc_key() <=> b.sfc_key(); c != 0) return c;
    return a.level <=> b.level;
  }
};

std::ostream& operator<<(std::ostream& os, const CellId& c);

struct CellIdHash {
  std::size_t operator()(const CellId& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.morton * 31U + c.level);
  }
};

std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy);
std::array<std::uint32_t, 2> morton_decode(std::uint64_t key);

/// Axis-aligned square cell.
struct Square {
  Vec2 anchor;
  double size = 0.0;

  [[nodiscard]] Vec2 corner(unsigned k) const {
    return anchor + size * Vec2(static_cast<double>(k & 1U), static_cast<double>((k >> 1) & 1U));
  }
  [[nodiscard]] Vec2 center() const { return anchor + Vec2::Constant(0.5 * size); }
  [[nodiscard]] double area() const { return size * size; }
  [[nodiscard]] Vec2 to_reference(const Vec2& x) const { return (x - anchor) / size; }
  [[nodiscard]] Vec2 to_physical(const Vec2& xi) const { return anchor + size * xi; }
};

/// Cell faces. The outward normal of side s is along axis s/2 with sign
/// (s % 2 == 0 ? -1 : +1).
enum class Side : std::uint8_t { xmin = 0, xmax = 1, ymin = 2, ymax = 3 };
inline constexpr std::array<Side, 4> kSides{Side::xmin, Side::xmax, Side::ymin, Side::ymax};

/// Endpoints of a cell side in local-corner numbering (lexicographic corners).
std::array<unsigned, 2> side_corners(Side s);
Vec2 side_normal(Side s);

enum class Mark : std::uint8_t { keep, refine, coarsen };

/// Single-root adaptive quadtree over the square [0, L]^2.
///
/// Leaves are kept sorted in space-filling-curve order. Instances are
/// immutable once built; adaptation produces a new mesh.
class QuadtreeMesh {
 public:
  QuadtreeMesh(double length, unsigned max_level);

  static QuadtreeMesh uniform(double length, unsigned level, unsigned max_level);
  static QuadtreeMesh from_leaves(double length, unsigned max_level, std::vector<CellId> leaves);

  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] unsigned max_level() const { return max_level_; }
  [[nodiscard]] const std::vector<CellId>& leaves() const { return leaves_; }
  [[nodiscard]] std::size_t size() const { return leaves_.size(); }

  [[nodiscard]] bool contains(const CellId& c) const { return index_.contains(c); }
  [[nodiscard]] std::optional<std::size_t> index_of(const CellId& c) const;
  [[nodiscard]] std::size_t checked_index(const CellId& c) const;

  /// Anchor and size of a leaf; throws MeshError for unknown cells.
  [[nodiscard]] Square cell_geometry(const CellId& c) const;
  /// Geometry of any cell in the tree, leaf or not.
  [[nodiscard]] Square cell_square(const CellId& c) const;

  /// Leaf covering the level-`level` cell at (ix, iy), if that region is not
  /// refined beyond `level`.
  [[nodiscard]] std::optional<CellId> covering_leaf(unsigned level, std::int64_t ix, std::int64_t iy) const;

  /// Leaves sharing a positive-length part of side `s` of leaf `c`.
  [[nodiscard]] std::vector<CellId> face_neighbors(const CellId& c, Side s) const;

  /// Leaves touching `c` across an edge or a corner.
  [[nodiscard]] std::vector<CellId> all_neighbors(const CellId& c) const;

  /// Full (edge and corner) 2:1 balance check by brute-force scan.
  [[nodiscard]] bool is_balanced() const;

  /// Integer vertex coordinates of a cell corner on the kMaxDepth lattice.
  [[nodiscard]] std::array<std::uint64_t, 2> vertex_lattice(const CellId& c, unsigned corner) const;
  [[nodiscard]] Vec2 lattice_point(std::uint64_t ix, std::uint64_t iy) const;

  void write_csv(std::ostream& os) const;

 private:
  void rebuild_index();
  void collect_face_leaves(const CellId& region, Side facing, std::vector<CellId>& out) const;

  double length_;
  unsigned max_level_;
  std::vector<CellId> leaves_;
  std::unordered_map<CellId, std::size_t, CellIdHash> index_;
};

/// Record of one adaptation, used for field transfer.
struct ChangeLog {
  /// Cells that were leaves and got split into four children. Cells created
  /// during the same adaptation and split again by balancing appear too.
  std::vector<CellId> refined;
  /// New leaves that replaced four coarsened children.
  std::vector<CellId> coarsened;
  /// Coarsen marks that were not honored (incomplete sibling set or balance).
  std::vector<CellId> dropped_coarsen;
};

struct AdaptResult {
  QuadtreeMesh mesh;
  ChangeLog log;
};

/// Refine marked leaves, coarsen complete sibling quadruples marked coarsen,
/// and restore full 2:1 balance. Throws MeshError if a refinement would go
/// beyond max_level or a marked cell is not a leaf.
AdaptResult refine_and_coarsen(const QuadtreeMesh& mesh, const std::map<CellId, Mark>& marks);

/// Refine until the mesh is 2:1 balanced across edges and corners.
QuadtreeMesh balance(const QuadtreeMesh& mesh);

struct HangingEntity {
  CellId coarse_cell;
  Side side;  ///< side of the coarse cell that holds the hanging midpoint
  std::array<CellId, 2> fine_cells;
};

/// Every coarse/fine edge interface, reported once from the coarse side.
std::vector<HangingEntity> collect_hanging_entities(const QuadtreeMesh& mesh);

}  // namespace ufep
