#include "ufep/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ufep {

namespace {

using NodePtr = std::shared_ptr<const LevelSet::Node>;

double eval(const LevelSet::Node& n, const Vec2& x) {
  switch (n.kind) {
    case LevelSet::Kind::circle: return (x - n.a).norm() - n.scalar;
    case LevelSet::Kind::half_plane: return n.a.dot(x) - n.scalar;
    case LevelSet::Kind::box:
      return std::max({n.a.x() - x.x(), x.x() - n.b.x(), n.a.y() - x.y(), x.y() - n.b.y()});
    case LevelSet::Kind::unite: return std::min(eval(*n.children[0], x), eval(*n.children[1], x));
    case LevelSet::Kind::intersect: return std::max(eval(*n.children[0], x), eval(*n.children[1], x));
    case LevelSet::Kind::complement: return -eval(*n.children[0], x);
  }
  return 0.0;
}

void closest_primitive(const LevelSet::Node& n, const Vec2& x, double& best, const std::string*& tag) {
  if (n.children.empty()) {
    const double d = std::abs(eval(n, x));
    if (d < best) {
      best = d;
      tag = &n.tag;
    }
    return;
  }
  for (const auto& c : n.children) closest_primitive(*c, x, best, tag);
}

void gather_tags(const LevelSet::Node& n, std::vector<std::string>& out) {
  if (n.children.empty()) {
    if (std::find(out.begin(), out.end(), n.tag) == out.end()) out.push_back(n.tag);
    return;
  }
  for (const auto& c : n.children) gather_tags(*c, out);
}

}  // namespace

LevelSet LevelSet::circle(const Vec2& center, double radius, std::string tag) {
  if (!(radius > 0.0)) throw GeometryError("circle level set needs a positive radius");
  auto n = std::make_shared<Node>();
  n->kind = Kind::circle;
  n->a = center;
  n->scalar = radius;
  n->tag = std::move(tag);
  return LevelSet(std::move(n));
}

LevelSet LevelSet::half_plane(const Vec2& normal, double offset, std::string tag) {
  const double len = normal.norm();
  if (!(len > 0.0)) throw GeometryError("half-plane level set needs a nonzero normal");
  auto n = std::make_shared<Node>();
  n->kind = Kind::half_plane;
  n->a = normal / len;
  n->scalar = offset / len;
  n->tag = std::move(tag);
  return LevelSet(std::move(n));
}

LevelSet LevelSet::box(const Vec2& lo, const Vec2& hi, std::string tag) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw GeometryError("box level set needs lo < hi");
  auto n = std::make_shared<Node>();
  n->kind = Kind::box;
  n->a = lo;
  n->b = hi;
  n->tag = std::move(tag);
  return LevelSet(std::move(n));
}

LevelSet LevelSet::unite(LevelSet a, LevelSet b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::unite;
  n->children = {std::move(a.node_), std::move(b.node_)};
  return LevelSet(std::move(n));
}

LevelSet LevelSet::intersect(LevelSet a, LevelSet b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::intersect;
  n->children = {std::move(a.node_), std::move(b.node_)};
  return LevelSet(std::move(n));
}

LevelSet LevelSet::complement(LevelSet a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::complement;
  n->children = {std::move(a.node_)};
  return LevelSet(std::move(n));
}

double LevelSet::operator()(const Vec2& x) const { return eval(*node_, x); }

Vec2 LevelSet::gradient(const Vec2& x, double step) const {
  const Vec2 ex(step, 0.0);
  const Vec2 ey(0.0, step);
  return {((*this)(x + ex) - (*this)(x - ex)) / (2 * step), ((*this)(x + ey) - (*this)(x - ey)) / (2 * step)};
}

const std::string& LevelSet::boundary_tag(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  const std::string* tag = nullptr;
  closest_primitive(*node_, x, best, tag);
  return *tag;
}

LevelSet::Kind LevelSet::kind() const { return node_->kind; }

std::vector<std::string> LevelSet::tags() const {
  std::vector<std::string> out;
  gather_tags(*node_, out);
  return out;
}

}  // namespace ufep
