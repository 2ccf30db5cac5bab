#pragma once

#include "ufep/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ufep {

/// Signed scalar description of the physical domain: phi(x) < 0 inside.
///
/// Built from primitives (circle, half-plane, box) combined with union
/// (min), intersection (max) and complement (negation). Every primitive
/// carries a tag used to attach boundary conditions to parts of the
/// unfitted boundary. Immutable and safe to share across threads.
class LevelSet {
 public:
  enum class Kind { circle, half_plane, box, unite, intersect, complement };

  /// phi = |x - center| - radius
  static LevelSet circle(const Vec2& center, double radius, std::string tag);
  /// phi = (n.x - offset) / |n|; the domain is {n.x < offset}.
  static LevelSet half_plane(const Vec2& normal, double offset, std::string tag);
  /// phi = max(lo - x, x - hi) componentwise.
  static LevelSet box(const Vec2& lo, const Vec2& hi, std::string tag);

  static LevelSet unite(LevelSet a, LevelSet b);
  static LevelSet intersect(LevelSet a, LevelSet b);
  static LevelSet complement(LevelSet a);

  [[nodiscard]] double operator()(const Vec2& x) const;
  [[nodiscard]] Vec2 gradient(const Vec2& x, double step) const;

  /// Tag of the primitive whose zero set is closest to x (smallest |phi_i|).
  [[nodiscard]] const std::string& boundary_tag(const Vec2& x) const;

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] std::vector<std::string> tags() const;

  struct Node;

 private:
  explicit LevelSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend struct LevelSetAccess;
};

struct LevelSet::Node {
  Kind kind;
  Vec2 a = Vec2::Zero();  // center / normal / lo
  Vec2 b = Vec2::Zero();  // hi
  double scalar = 0.0;    // radius / offset
  std::string tag;
  std::vector<std::shared_ptr<const Node>> children;
};

/// Read access to the composition tree for serialization.
struct LevelSetAccess {
  static const LevelSet::Node& root(const LevelSet& ls) { return *ls.node_; }
  static LevelSet wrap(std::shared_ptr<const LevelSet::Node> node) { return LevelSet(std::move(node)); }
};

}  // namespace ufep
