#pragma once

#include "ufep/types.hpp"

#include <array>

namespace ufep::q1 {

/// Bilinear shape functions on [0,1]^2, lexicographic corner order
/// (0,0), (1,0), (0,1), (1,1).
inline std::array<double, 4> shape(const Vec2& xi) {
  const double x = xi.x();
  const double y = xi.y();
  return {(1 - x) * (1 - y), x * (1 - y), (1 - x) * y, x * y};
}

/// Reference gradients, one row per shape function.
inline std::array<Vec2, 4> shape_grad(const Vec2& xi) {
  const double x = xi.x();
  const double y = xi.y();
  return {Vec2(-(1 - y), -(1 - x)), Vec2(1 - y, -x), Vec2(-y, 1 - x), Vec2(y, x)};
}

}  // namespace ufep::q1
