#include "ufep/cut_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ufep {

namespace {

// Corners of a square in counter-clockwise order, as lexicographic indices.
constexpr std::array<unsigned, 4> kCcw{0, 1, 3, 2};

enum class VertexKind { corner, exit, entry };

struct PolyVertex {
  Vec2 x;
  VertexKind kind;
};

using Polygon = std::vector<PolyVertex>;

void drop_duplicates(Polygon& poly, double tol) {
  Polygon out;
  for (const auto& v : poly) {
    if (!out.empty() && (out.back().x - v.x).norm() <= tol) {
      // Keep the interface role of merged vertices.
      if (v.kind != VertexKind::corner) out.back().kind = v.kind;
      continue;
    }
    out.push_back(v);
  }
  while (out.size() > 1 && (out.front().x - out.back().x).norm() <= tol) {
    if (out.back().kind != VertexKind::corner && out.front().kind == VertexKind::corner)
      out.front().kind = out.back().kind;
    out.pop_back();
  }
  poly = std::move(out);
}

}  // namespace

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::interior: return "interior";
    case CellClass::cut: return "cut";
    case CellClass::exterior: return "exterior";
  }
  return "?";
}

double CutCell::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += std::abs(triangle_area(t));
  return a;
}

Vec2 edge_root(const LevelSet& ls, Vec2 inside, Vec2 outside, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const Vec2 mid = 0.5 * (inside + outside);
    if (ls(mid) <= 0.0)
      inside = mid;
    else
      outside = mid;
  }
  const double fi = ls(inside);
  const double fo = ls(outside);
  if (fi == 0.0 || !(fo > fi)) return inside;
  const double t = std::clamp(fi / (fi - fo), 0.0, 1.0);
  return inside + t * (outside - inside);
}

std::optional<std::pair<Vec2, Vec2>> clip_segment(const Vec2& a, const Vec2& b, const LevelSet& ls, int iterations) {
  const bool in_a = ls(a) <= 0.0;
  const bool in_b = ls(b) <= 0.0;
  if (in_a && in_b) return std::make_pair(a, b);
  if (!in_a && !in_b) return std::nullopt;
  if (in_a) return std::make_pair(a, edge_root(ls, a, b, iterations));
  return std::make_pair(edge_root(ls, b, a, iterations), b);
}

CellClass classify_square(const Square& cell, const LevelSet& ls, const CutOptions& opts, bool* degenerate) {
  std::array<double, 4> phi{};
  int inside = 0;
  bool all_zero = true;
  for (unsigned k = 0; k < 4; ++k) {
    phi[k] = ls(cell.corner(k));
    if (phi[k] <= 0.0) ++inside;
    if (phi[k] != 0.0) all_zero = false;
  }
  if (degenerate != nullptr) *degenerate = false;
  if (inside != 0 && inside != 4) return CellClass::cut;

  // Same sign at all corners: look for the interface crossing an edge.
  for (unsigned e = 0; e < 4; ++e) {
    const Vec2 p = cell.corner(kCcw[e]);
    const Vec2 q = cell.corner(kCcw[(e + 1) % 4]);
    for (int s = 1; s <= opts.edge_samples; ++s) {
      const double t = static_cast<double>(s) / (opts.edge_samples + 1);
      const double v = ls(p + t * (q - p));
      if (v != 0.0) all_zero = false;
      if ((v <= 0.0) != (inside == 4)) return CellClass::cut;
    }
  }
  if (all_zero) {
    if (degenerate != nullptr) *degenerate = true;
    return CellClass::cut;
  }
  return inside == 4 ? CellClass::interior : CellClass::exterior;
}

std::vector<CellClass> classify_cells(const QuadtreeMesh& mesh, const LevelSet& ls, const CutOptions& opts,
                                      std::vector<CellId>* degenerate) {
  std::vector<CellClass> out;
  out.reserve(mesh.size());
  for (const auto& c : mesh.leaves()) {
    bool degen = false;
    out.push_back(classify_square(mesh.cell_square(c), ls, opts, &degen));
    if (degen && degenerate != nullptr) degenerate->push_back(c);
  }
  return out;
}

CutCell triangulate_cut_cell(const Square& cell, const LevelSet& ls, const CutOptions& opts) {
  std::array<Vec2, 4> p;
  std::array<bool, 4> in{};
  for (unsigned k = 0; k < 4; ++k) {
    p[k] = cell.corner(kCcw[k]);
    in[k] = ls(p[k]) <= 0.0;
  }
  auto root = [&](unsigned e) {
    const unsigned a = e;
    const unsigned b = (e + 1) % 4;
    return in[a] ? edge_root(ls, p[a], p[b], opts.bisection_iterations)
                 : edge_root(ls, p[b], p[a], opts.bisection_iterations);
  };

  std::vector<Polygon> polygons;
  const bool saddle = in[0] == in[2] && in[1] == in[3] && in[0] != in[1];
  if (saddle && !(ls(cell.center()) <= 0.0)) {
    // Two separate corner triangles.
    for (unsigned k = 0; k < 4; ++k) {
      if (!in[k]) continue;
      polygons.push_back({{p[k], VertexKind::corner},
                          {root(k), VertexKind::exit},
                          {root((k + 3) % 4), VertexKind::entry}});
    }
  } else {
    Polygon poly;
    for (unsigned e = 0; e < 4; ++e) {
      if (in[e]) poly.push_back({p[e], VertexKind::corner});
      if (in[e] != in[(e + 1) % 4]) poly.push_back({root(e), in[e] ? VertexKind::exit : VertexKind::entry});
    }
    polygons.push_back(std::move(poly));
  }

  CutCell out;
  const double tol = 1e-12 * cell.size;
  const double area_tol = 1e-14 * cell.area();
  for (auto& poly : polygons) {
    drop_duplicates(poly, tol);
    if (poly.size() < 3) continue;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      const std::array<Vec2, 3> tri{poly[0].x, poly[i].x, poly[i + 1].x};
      if (std::abs(triangle_area(tri)) <= area_tol) continue;
      out.triangles.push_back(tri);
      const Quadrature q = triangle_rule(tri, opts.volume_degree);
      out.volume.insert(out.volume.end(), q.begin(), q.end());
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& v = poly[i];
      const auto& w = poly[(i + 1) % poly.size()];
      if (v.kind != VertexKind::exit || w.kind != VertexKind::entry) continue;
      const Vec2 d = w.x - v.x;
      const double len = d.norm();
      if (len <= tol) continue;
      BoundarySegment seg;
      seg.a = v.x;
      seg.b = w.x;
      seg.normal = Vec2(d.y(), -d.x()) / len;
      seg.tag = ls.boundary_tag(seg.midpoint());
      seg.quadrature = segment_rule(seg.a, seg.b, opts.boundary_points);
      out.segments.push_back(std::move(seg));
    }
  }
  return out;
}

EmbeddedGeometry EmbeddedGeometry::build(const QuadtreeMesh& mesh, const LevelSet& ls, const CutOptions& opts) {
  EmbeddedGeometry g;
  g.options_ = opts;
  g.classes_ = classify_cells(mesh, ls, opts, &g.degenerate_);
  g.cut_.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (g.classes_[i] == CellClass::cut) g.cut_[i] = triangulate_cut_cell(mesh.cell_square(mesh.leaves()[i]), ls, opts);
  }
  return g;
}

const CutCell& EmbeddedGeometry::cut_cell(std::size_t leaf) const {
  if (leaf >= cut_.size() || !cut_[leaf]) throw GeometryError("cut_cell: leaf is not a cut cell");
  return *cut_[leaf];
}

double EmbeddedGeometry::domain_area(const QuadtreeMesh& mesh) const {
  double a = 0.0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == CellClass::interior)
      a += mesh.cell_square(mesh.leaves()[i]).area();
    else if (classes_[i] == CellClass::cut)
      a += cut_[i]->area();
  }
  return a;
}

std::size_t EmbeddedGeometry::count(CellClass c) const {
  return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), c));
}

}  // namespace ufep
