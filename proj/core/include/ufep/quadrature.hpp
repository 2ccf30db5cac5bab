#pragma once

#include "ufep/quadtree.hpp"
#include "ufep/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace ufep {

struct QuadraturePoint {
  Vec2 x;
  double weight = 0.0;
};

/// Points and positive weights in physical coordinates.
using Quadrature = std::vector<QuadraturePoint>;

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Tensor-product Gauss rule with n points per direction.
Quadrature square_rule(const Square& cell, int n);

/// Simplex rule exact for polynomials of total degree `degree`. Degrees up
/// to 5 use symmetric Dunavant-type rules; higher degrees fall back to a
/// collapsed (Duffy) Gauss product rule.
Quadrature triangle_rule(const std::array<Vec2, 3>& tri, int degree);

/// Gauss rule with n points on the segment [a, b].
Quadrature segment_rule(const Vec2& a, const Vec2& b, int n);

/// Sum of w_i f(x_i).
double integrate(const std::function<double(const Vec2&)>& f, const Quadrature& q);

double triangle_area(const std::array<Vec2, 3>& tri);

}  // namespace ufep
