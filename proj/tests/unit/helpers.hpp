#pragma once

#include "ufep/quadtree.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace ufep::test {

/// Closed lattice box [x0, x1] x [y0, y1] of a cell.
struct Box {
  std::uint64_t x0, y0, x1, y1;
};

inline Box lattice_box(const QuadtreeMesh& m, const CellId& c) {
  const auto lo = m.vertex_lattice(c, 0);
  const auto hi = m.vertex_lattice(c, 3);
  return {lo[0], lo[1], hi[0], hi[1]};
}

inline bool touches(const Box& a, const Box& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

/// Length of the shared edge, zero when the boxes only meet at a corner or not at all.
inline std::uint64_t shared_edge(const Box& a, const Box& b) {
  if (a.x1 == b.x0 || b.x1 == a.x0) {
    const auto lo = std::max(a.y0, b.y0);
    const auto hi = std::min(a.y1, b.y1);
    return hi > lo ? hi - lo : 0;
  }
  if (a.y1 == b.y0 || b.y1 == a.y0) {
    const auto lo = std::max(a.x0, b.x0);
    const auto hi = std::min(a.x1, b.x1);
    return hi > lo ? hi - lo : 0;
  }
  return 0;
}

/// Uniform mesh followed by `rounds` of random refinement.
inline QuadtreeMesh random_mesh(std::mt19937_64& rng, double length, unsigned base, unsigned max_level, int rounds,
                                double p = 0.15) {
  QuadtreeMesh m = QuadtreeMesh::uniform(length, base, max_level);
  std::bernoulli_distribution pick(p);
  for (int r = 0; r < rounds; ++r) {
    std::map<CellId, Mark> marks;
    for (const auto& c : m.leaves())
      if (c.level < max_level && pick(rng)) marks[c] = Mark::refine;
    m = refine_and_coarsen(m, marks).mesh;
  }
  return m;
}

}  // namespace ufep::test
