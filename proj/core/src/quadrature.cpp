#include "ufep/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace ufep {

namespace {

struct BaryPoint {
  double l0, l1, l2, w;
};

// Area-normalized symmetric rules (weights sum to 1).
const std::vector<BaryPoint>& rule_degree1() {
  static const std::vector<BaryPoint> r{{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}};
  return r;
}

const std::vector<BaryPoint>& rule_degree2() {
  static const std::vector<BaryPoint> r{{2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
                                        {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
                                        {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3}};
  return r;
}

std::vector<BaryPoint> orbit3(double a, double b, double w) {
  return {{a, b, b, w}, {b, a, b, w}, {b, b, a, w}};
}

const std::vector<BaryPoint>& rule_degree4() {
  static const std::vector<BaryPoint> r = [] {
    std::vector<BaryPoint> v = orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011);
    auto o2 = orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322);
    v.insert(v.end(), o2.begin(), o2.end());
    return v;
  }();
  return r;
}

const std::vector<BaryPoint>& rule_degree5() {
  static const std::vector<BaryPoint> r = [] {
    std::vector<BaryPoint> v{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225}};
    auto o1 = orbit3(0.059715871789770, 0.470142064105115, 0.132394152788506);
    auto o2 = orbit3(0.797426985353087, 0.101286507323456, 0.125939180544827);
    v.insert(v.end(), o1.begin(), o1.end());
    v.insert(v.end(), o2.begin(), o2.end());
    return v;
  }();
  return r;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.points[n - 1 - i] = 0.5 * (z + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

Quadrature square_rule(const Square& cell, int n) {
  const GaussRule g = gauss_legendre(n);
  Quadrature q;
  q.reserve(static_cast<std::size_t>(n * n));
  const double area = cell.area();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      q.push_back({cell.to_physical(Vec2(g.points[i], g.points[j])), area * g.weights[i] * g.weights[j]});
  return q;
}

double triangle_area(const std::array<Vec2, 3>& t) {
  const Vec2 e1 = t[1] - t[0];
  const Vec2 e2 = t[2] - t[0];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Quadrature triangle_rule(const std::array<Vec2, 3>& tri, int degree) {
  const double area = std::abs(triangle_area(tri));
  Quadrature q;
  const std::vector<BaryPoint>* sym = nullptr;
  if (degree <= 1)
    sym = &rule_degree1();
  else if (degree == 2)
    sym = &rule_degree2();
  else if (degree <= 4)
    sym = &rule_degree4();
  else if (degree == 5)
    sym = &rule_degree5();

  if (sym != nullptr) {
    q.reserve(sym->size());
    for (const auto& p : *sym) q.push_back({p.l0 * tri[0] + p.l1 * tri[1] + p.l2 * tri[2], area * p.w});
    return q;
  }

  // Collapsed (Duffy) product rule; the map contributes a factor (1 - s).
  const int n = (degree + 3) / 2;
  const GaussRule g = gauss_legendre(n);
  q.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = g.points[i];
      const double t = g.points[j];
      const double l1 = s;
      const double l2 = (1.0 - s) * t;
      const double l0 = 1.0 - l1 - l2;
      const double w = 2.0 * area * g.weights[i] * g.weights[j] * (1.0 - s);
      q.push_back({l0 * tri[0] + l1 * tri[1] + l2 * tri[2], w});
    }
  }
  return q;
}

Quadrature segment_rule(const Vec2& a, const Vec2& b, int n) {
  const GaussRule g = gauss_legendre(n);
  const double len = (b - a).norm();
  Quadrature q;
  q.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q.push_back({a + g.points[i] * (b - a), len * g.weights[i]});
  return q;
}

double integrate(const std::function<double(const Vec2&)>& f, const Quadrature& q) {
  double sum = 0.0;
  for (const auto& p : q) sum += p.weight * f(p.x);
  return sum;
}

}  // namespace ufep
