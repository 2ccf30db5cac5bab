#include "ufep/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ufep {

namespace {

std::uint64_t spread_bits(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFULL;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFULL;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0FULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

std::uint32_t compact_bits(std::uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0FULL;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFULL;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFULL;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFULL;
  return static_cast<std::uint32_t>(x);
}

std::string describe(const CellId& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

// Children of `region` touching the neighbor that lies in direction
// (dx, dy) from it.
bool child_faces(unsigned k, int dx, int dy) {
  const unsigned xbit = k & 1U;
  const unsigned ybit = (k >> 1) & 1U;
  const bool x_ok = dx == 0 || xbit == (dx > 0 ? 1U : 0U);
  const bool y_ok = dy == 0 || ybit == (dy > 0 ? 1U : 0U);
  return x_ok && y_ok;
}

constexpr std::array<std::array<int, 2>, 8> kDirections{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

}  // namespace

std::ostream& operator<<(std::ostream& os, const CellId& c) {
  return os << "(level " << c.level << ", morton " << c.morton << ")";
}

std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy) {
  return spread_bits(ix) | (spread_bits(iy) << 1);
}

std::array<std::uint32_t, 2> morton_decode(std::uint64_t key) {
  return {compact_bits(key), compact_bits(key >> 1)};
}

std::array<unsigned, 2> side_corners(Side s) {
  switch (s) {
    case Side::xmin: return {0, 2};
    case Side::xmax: return {1, 3};
    case Side::ymin: return {0, 1};
    case Side::ymax: return {2, 3};
  }
  return {0, 0};
}

Vec2 side_normal(Side s) {
  switch (s) {
    case Side::xmin: return {-1.0, 0.0};
    case Side::xmax: return {1.0, 0.0};
    case Side::ymin: return {0.0, -1.0};
    case Side::ymax: return {0.0, 1.0};
  }
  return Vec2::Zero();
}

QuadtreeMesh::QuadtreeMesh(double length, unsigned max_level)
    : length_(length), max_level_(max_level), leaves_{CellId{0, 0}} {
  if (!(length > 0.0)) throw MeshError("quadtree: box length must be positive");
  if (max_level > kMaxDepth) throw MeshError("quadtree: max_level exceeds supported depth");
  rebuild_index();
}

QuadtreeMesh QuadtreeMesh::uniform(double length, unsigned level, unsigned max_level) {
  if (level > max_level) throw MeshError("quadtree: uniform level exceeds max_level");
  std::vector<CellId> leaves;
  const std::uint64_t n = std::uint64_t{1} << (2 * level);
  leaves.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) leaves.push_back({level, k});
  return from_leaves(length, max_level, std::move(leaves));
}

QuadtreeMesh QuadtreeMesh::from_leaves(double length, unsigned max_level, std::vector<CellId> leaves) {
  QuadtreeMesh mesh(length, max_level);
  mesh.leaves_ = std::move(leaves);
  for (const auto& c : mesh.leaves_) {
    if (c.level > max_level) throw MeshError("quadtree: leaf " + describe(c) + " beyond max_level");
    if (c.morton >= (std::uint64_t{1} << (2 * c.level)))
      throw MeshError("quadtree: invalid morton key in " + describe(c));
  }
  mesh.rebuild_index();
  return mesh;
}

void QuadtreeMesh::rebuild_index() {
  std::sort(leaves_.begin(), leaves_.end());
  leaves_.erase(std::unique(leaves_.begin(), leaves_.end()), leaves_.end());
  index_.clear();
  index_.reserve(leaves_.size());
  for (std::size_t i = 0; i < leaves_.size(); ++i) index_.emplace(leaves_[i], i);
}

std::optional<std::size_t> QuadtreeMesh::index_of(const CellId& c) const {
  if (auto it = index_.find(c); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t QuadtreeMesh::checked_index(const CellId& c) const {
  if (auto i = index_of(c)) return *i;
  throw MeshError("quadtree: unknown cell " + describe(c));
}

Square QuadtreeMesh::cell_square(const CellId& c) const {
  const auto [ix, iy] = morton_decode(c.morton);
  const double h = length_ / static_cast<double>(std::uint64_t{1} << c.level);
  return Square{Vec2(ix * h, iy * h), h};
}

Square QuadtreeMesh::cell_geometry(const CellId& c) const {
  if (!contains(c)) throw MeshError("quadtree: unknown cell " + describe(c));
  return cell_square(c);
}

std::optional<CellId> QuadtreeMesh::covering_leaf(unsigned level, std::int64_t ix, std::int64_t iy) const {
  const std::int64_t n = std::int64_t{1} << level;
  if (ix < 0 || iy < 0 || ix >= n || iy >= n) return std::nullopt;
  for (int l = static_cast<int>(level); l >= 0; --l) {
    const unsigned shift = level - static_cast<unsigned>(l);
    const CellId candidate{static_cast<std::uint32_t>(l),
                           morton_encode(static_cast<std::uint32_t>(ix >> shift),
                                         static_cast<std::uint32_t>(iy >> shift))};
    if (contains(candidate)) return candidate;
  }
  return std::nullopt;
}

void QuadtreeMesh::collect_face_leaves(const CellId& region, Side facing, std::vector<CellId>& out) const {
  if (contains(region)) {
    out.push_back(region);
    return;
  }
  if (region.level >= kMaxDepth) return;
  for (unsigned k : side_corners(facing)) collect_face_leaves(region.child(k), facing, out);
}

std::vector<CellId> QuadtreeMesh::face_neighbors(const CellId& c, Side s) const {
  const auto [ux, uy] = morton_decode(c.morton);
  std::int64_t nx = ux;
  std::int64_t ny = uy;
  Side facing = s;
  switch (s) {
    case Side::xmin: nx -= 1; facing = Side::xmax; break;
    case Side::xmax: nx += 1; facing = Side::xmin; break;
    case Side::ymin: ny -= 1; facing = Side::ymax; break;
    case Side::ymax: ny += 1; facing = Side::ymin; break;
  }
  const std::int64_t n = std::int64_t{1} << c.level;
  if (nx < 0 || ny < 0 || nx >= n || ny >= n) return {};
  if (auto cov = covering_leaf(c.level, nx, ny)) return {*cov};
  std::vector<CellId> out;
  const CellId region{c.level, morton_encode(static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny))};
  collect_face_leaves(region, facing, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CellId> QuadtreeMesh::all_neighbors(const CellId& c) const {
  const auto [ux, uy] = morton_decode(c.morton);
  const std::int64_t n = std::int64_t{1} << c.level;
  std::vector<CellId> out;
  for (const auto& d : kDirections) {
    const std::int64_t nx = static_cast<std::int64_t>(ux) + d[0];
    const std::int64_t ny = static_cast<std::int64_t>(uy) + d[1];
    if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
    if (auto cov = covering_leaf(c.level, nx, ny)) {
      out.push_back(*cov);
      continue;
    }
    // Region refined further: descend towards c.
    std::vector<CellId> stack{CellId{c.level, morton_encode(static_cast<std::uint32_t>(nx),
                                                            static_cast<std::uint32_t>(ny))}};
    while (!stack.empty()) {
      const CellId r = stack.back();
      stack.pop_back();
      if (contains(r)) {
        out.push_back(r);
        continue;
      }
      if (r.level >= kMaxDepth) continue;
      for (unsigned k = 0; k < 4; ++k)
        if (child_faces(k, -d[0], -d[1])) stack.push_back(r.child(k));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool QuadtreeMesh::is_balanced() const {
  for (const auto& c : leaves_) {
    for (const auto& nb : all_neighbors(c)) {
      const int diff = static_cast<int>(c.level) - static_cast<int>(nb.level);
      if (diff > 1 || diff < -1) return false;
    }
  }
  return true;
}

std::array<std::uint64_t, 2> QuadtreeMesh::vertex_lattice(const CellId& c, unsigned corner) const {
  const auto [ix, iy] = morton_decode(c.morton);
  const std::uint64_t scale = std::uint64_t{1} << (kMaxDepth - c.level);
  return {(ix + (corner & 1U)) * scale, (iy + ((corner >> 1) & 1U)) * scale};
}

Vec2 QuadtreeMesh::lattice_point(std::uint64_t ix, std::uint64_t iy) const {
  const double scale = length_ / static_cast<double>(std::uint64_t{1} << kMaxDepth);
  return {static_cast<double>(ix) * scale, static_cast<double>(iy) * scale};
}

void QuadtreeMesh::write_csv(std::ostream& os) const {
  os << "morton,level,anchor_x,anchor_y,size\r\n";
  os << std::setprecision(17);
  for (const auto& c : leaves_) {
    const Square sq = cell_square(c);
    os << c.morton << ',' << c.level << ',' << sq.anchor.x() << ',' << sq.anchor.y() << ',' << sq.size << "\r\n";
  }
}

namespace {

// Mutable leaf set used while adapting.
class LeafSet {
 public:
  explicit LeafSet(const QuadtreeMesh& mesh) : length_(mesh.length()), max_level_(mesh.max_level()) {
    leaves_.insert(mesh.leaves().begin(), mesh.leaves().end());
  }

  bool contains(const CellId& c) const { return leaves_.contains(c); }

  std::optional<CellId> covering_leaf(unsigned level, std::int64_t ix, std::int64_t iy) const {
    const std::int64_t n = std::int64_t{1} << level;
    if (ix < 0 || iy < 0 || ix >= n || iy >= n) return std::nullopt;
    for (int l = static_cast<int>(level); l >= 0; --l) {
      const unsigned shift = level - static_cast<unsigned>(l);
      const CellId candidate{static_cast<std::uint32_t>(l),
                             morton_encode(static_cast<std::uint32_t>(ix >> shift),
                                           static_cast<std::uint32_t>(iy >> shift))};
      if (contains(candidate)) return candidate;
    }
    return std::nullopt;
  }

  void split(const CellId& c) {
    leaves_.erase(c);
    for (unsigned k = 0; k < 4; ++k) leaves_.insert(c.child(k));
  }

  void merge(const CellId& parent) {
    for (unsigned k = 0; k < 4; ++k) leaves_.erase(parent.child(k));
    leaves_.insert(parent);
  }

  // Leaves in direction-d neighbor regions of `c` that are coarser than
  // allowed (level < c.level - 1).
  void too_coarse_neighbors(const CellId& c, std::set<CellId>& out) const {
    if (c.level < 2) return;
    const auto [ux, uy] = morton_decode(c.morton);
    for (const auto& d : kDirections) {
      auto cov = covering_leaf(c.level, static_cast<std::int64_t>(ux) + d[0], static_cast<std::int64_t>(uy) + d[1]);
      if (cov && cov->level + 1 < c.level) out.insert(*cov);
    }
  }

  // Largest leaf level found in the neighborhood of `region` (edge and
  // corner neighbors); regions refined beyond region.level are scanned.
  unsigned finest_neighbor_level(const CellId& region) const {
    const auto [ux, uy] = morton_decode(region.morton);
    const std::int64_t n = std::int64_t{1} << region.level;
    unsigned finest = 0;
    for (const auto& d : kDirections) {
      const std::int64_t nx = static_cast<std::int64_t>(ux) + d[0];
      const std::int64_t ny = static_cast<std::int64_t>(uy) + d[1];
      if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
      if (auto cov = covering_leaf(region.level, nx, ny)) {
        finest = std::max(finest, cov->level);
        continue;
      }
      std::vector<CellId> stack{CellId{region.level, morton_encode(static_cast<std::uint32_t>(nx),
                                                                   static_cast<std::uint32_t>(ny))}};
      while (!stack.empty()) {
        const CellId r = stack.back();
        stack.pop_back();
        if (contains(r)) {
          finest = std::max(finest, r.level);
          continue;
        }
        if (r.level >= kMaxDepth) continue;
        for (unsigned k = 0; k < 4; ++k)
          if (child_faces(k, -d[0], -d[1])) stack.push_back(r.child(k));
      }
    }
    return finest;
  }

  // Refine until balanced; returns the cells split.
  std::vector<CellId> balance() {
    std::vector<CellId> split_cells;
    for (;;) {
      std::set<CellId> to_split;
      for (const auto& c : leaves_) too_coarse_neighbors(c, to_split);
      if (to_split.empty()) break;
      for (const auto& c : to_split) {
        split(c);
        split_cells.push_back(c);
      }
    }
    return split_cells;
  }

  QuadtreeMesh finish() const {
    return QuadtreeMesh::from_leaves(length_, max_level_, std::vector<CellId>(leaves_.begin(), leaves_.end()));
  }

 private:
  double length_;
  unsigned max_level_;
  std::unordered_set<CellId, CellIdHash> leaves_;
};

}  // namespace

QuadtreeMesh balance(const QuadtreeMesh& mesh) {
  LeafSet set(mesh);
  set.balance();
  return set.finish();
}

AdaptResult refine_and_coarsen(const QuadtreeMesh& mesh, const std::map<CellId, Mark>& marks) {
  ChangeLog log;
  std::map<CellId, std::vector<CellId>> coarsen_groups;
  for (const auto& [cell, mark] : marks) {
    if (!mesh.contains(cell)) throw MeshError("adapt: marked cell " + describe(cell) + " is not a leaf");
    if (mark == Mark::refine && cell.level >= mesh.max_level())
      throw MeshError("adapt: refining " + describe(cell) + " would exceed max_level " +
                      std::to_string(mesh.max_level()));
    if (mark == Mark::coarsen) {
      if (cell.level == 0)
        log.dropped_coarsen.push_back(cell);
      else
        coarsen_groups[cell.parent()].push_back(cell);
    }
  }

  LeafSet set(mesh);
  for (const auto& [cell, mark] : marks) {
    if (mark != Mark::refine) continue;
    set.split(cell);
    log.refined.push_back(cell);
  }
  for (const auto& c : set.balance()) log.refined.push_back(c);

  for (const auto& [parent, children] : coarsen_groups) {
    bool complete = children.size() == 4;
    for (unsigned k = 0; complete && k < 4; ++k) complete = set.contains(parent.child(k));
    // Merging is allowed only if no neighbor of the parent is finer than
    // the children being removed.
    if (complete && set.finest_neighbor_level(parent) <= parent.level + 1) {
      set.merge(parent);
      log.coarsened.push_back(parent);
    } else {
      log.dropped_coarsen.insert(log.dropped_coarsen.end(), children.begin(), children.end());
    }
  }

  std::sort(log.refined.begin(), log.refined.end());
  std::sort(log.dropped_coarsen.begin(), log.dropped_coarsen.end());
  AdaptResult result{set.finish(), std::move(log)};
  if (!result.mesh.is_balanced()) throw MeshError("adapt: internal error, result not 2:1 balanced");
  return result;
}

std::vector<HangingEntity> collect_hanging_entities(const QuadtreeMesh& mesh) {
  std::vector<HangingEntity> out;
  for (const auto& c : mesh.leaves()) {
    for (Side s : kSides) {
      const auto nb = mesh.face_neighbors(c, s);
      if (nb.size() == 2 && nb[0].level == c.level + 1 && nb[1].level == c.level + 1)
        out.push_back({c, s, {nb[0], nb[1]}});
    }
  }
  return out;
}

}  // namespace ufep
