#include "helpers.hpp"

#include "ufep/discretization.hpp"

#include <gtest/gtest.h>

#include <deque>

using namespace ufep;

namespace {

std::vector<std::vector<std::size_t>> face_graph(const QuadtreeMesh& m) {
  const auto& L = m.leaves();
  std::vector<std::vector<std::size_t>> adj(L.size());
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = 0; j < L.size(); ++j)
      if (i != j && test::shared_edge(test::lattice_box(m, L[i]), test::lattice_box(m, L[j])) > 0) adj[i].push_back(j);
  return adj;
}

// Shortest path to the interior over face-adjacent active cells; ties go to
// the lowest-ordered neighbor of the previous layer.
void aggregation_oracle(const QuadtreeMesh& m, const std::vector<CellClass>& cls, std::vector<int>& dist,
                        std::vector<std::size_t>& root) {
  const auto adj = face_graph(m);
  const std::size_t n = m.size();
  dist.assign(n, -1);
  root.assign(n, AggregateMap::npos);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == CellClass::interior) {
      dist[i] = 0;
      root[i] = i;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j : adj[i])
      if (cls[j] == CellClass::cut && dist[j] < 0) {
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      }
  }
  int maxd = 0;
  for (int d : dist) maxd = std::max(maxd, d);
  for (int d = 1; d <= maxd; ++d)
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] != d) continue;
      std::size_t best = AggregateMap::npos;
      for (std::size_t j : adj[i])
        if (dist[j] == d - 1 && (best == AggregateMap::npos || j < best)) best = j;
      root[i] = root[best];
    }
}

LevelSet sliver() {
  // Thin tilted strip joined to a disc that provides interior cells.
  const Vec2 n(1.0, 2.5);
  const double c = 0.5 * n.sum();
  const double w = 0.045 * n.norm();
  const LevelSet strip =
      LevelSet::intersect(LevelSet::half_plane(n, c + w, "s"), LevelSet::half_plane(-n, -(c - w), "s"));
  return LevelSet::unite(strip, LevelSet::circle(Vec2(0.2, 0.2), 0.12, "d"));
}

std::shared_ptr<const Discretization> half_plane_2x2(HistoryFlavor flavor = HistoryFlavor::aggregated) {
  DiscretizationOptions o;
  o.history = flavor;
  return Discretization::build(QuadtreeMesh::uniform(1.0, 1, 4), LevelSet::half_plane(Vec2(1, 0), 0.75, "r"), o);
}

}  // namespace

TEST(Aggregation, NoCutCellsGivesSingletons) {
  const QuadtreeMesh m = QuadtreeMesh::uniform(1.0, 3, 3);
  const auto cls = classify_cells(m, LevelSet::circle(Vec2(0.5, 0.5), 5.0, ""));
  const AggregateMap a = build_aggregates(m, cls);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(a.root_of(i), i);
  EXPECT_EQ(a.max_aggregate_size(), 1U);
}

TEST(Aggregation, SingleLayerTakesLowestTouchingInterior) {
  const QuadtreeMesh m = QuadtreeMesh::uniform(1.0, 3, 3);
  const auto cls = classify_cells(m, LevelSet::circle(Vec2(0.5, 0.5), 0.37, ""));
  const AggregateMap a = build_aggregates(m, cls);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (cls[i] != CellClass::cut || a.distance(i) != 1) continue;
    std::size_t best = AggregateMap::npos;
    for (Side s : kSides)
      for (const auto& nb : m.face_neighbors(m.leaves()[i], s)) {
        const std::size_t j = m.checked_index(nb);
        if (cls[j] == CellClass::interior) best = std::min(best, j);
      }
    EXPECT_EQ(a.root_of(i), best);
  }
}

TEST(Aggregation, SliverMatchesShortestPathOracle) {
  const QuadtreeMesh m = QuadtreeMesh::uniform(1.0, 5, 5);
  const auto cls = classify_cells(m, sliver());
  const AggregateMap a = build_aggregates(m, cls);
  std::vector<int> dist;
  std::vector<std::size_t> root;
  aggregation_oracle(m, cls, dist, root);
  EXPECT_GE(a.sweeps(), 2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (cls[i] == CellClass::exterior) continue;
    EXPECT_EQ(a.distance(i), dist[i]) << i;
    EXPECT_EQ(a.root_of(i), root[i]) << i;
    EXPECT_EQ(cls[a.root_of(i)], CellClass::interior);
  }
  // Aggregates are face-connected through their own members.
  const auto adj = face_graph(m);
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (cls[r] != CellClass::interior) continue;
    const auto members = a.members_of(r);
    std::vector<bool> in(m.size(), false), seen(m.size(), false);
    for (auto k : members) in[k] = true;
    std::vector<std::size_t> stack{r};
    seen[r] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      ++reached;
      for (auto j : adj[k])
        if (in[j] && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
    }
    EXPECT_EQ(reached, members.size());
  }
}

TEST(Aggregation, IsolatedIslandThrows) {
  // A small disc around a mesh vertex, far from the large one: its four cut
  // cells have no face path to an interior cell.
  const QuadtreeMesh m = QuadtreeMesh::uniform(1.0, 3, 3);
  const auto cls = classify_cells(m, LevelSet::unite(LevelSet::circle(Vec2(0.1, 0.1), 0.45, ""),
                                                     LevelSet::circle(Vec2(0.75, 0.75), 0.1, "")));
  EXPECT_THROW((void)build_aggregates(m, cls), GeometryError);
}

TEST(Space, ConformingInteriorMeshIsUnconstrained) {
  DiscretizationOptions o;
  const auto d = Discretization::build(QuadtreeMesh::uniform(1.0, 3, 3), LevelSet::circle(Vec2(0.5, 0.5), 5, ""), o);
  EXPECT_TRUE(d->space().constraints().empty());
  EXPECT_EQ(d->space().free_count(), d->space().dof_count());
  EXPECT_EQ(d->space().node_count(), 81U);
}

TEST(Space, HangingMidpointAveragesEdgeMasters) {
  const QuadtreeMesh base = QuadtreeMesh::uniform(1.0, 2, 4);
  DiscretizationOptions o;
  const auto d = Discretization::build(refine_and_coarsen(base, {{base.leaves()[3], Mark::refine}}).mesh,
                                       LevelSet::circle(Vec2(0.5, 0.5), 5, ""), o);
  const ContinuousSpace& s = d->space();
  ASSERT_EQ(s.constraints().size(), 8U);  // 4 hanging nodes x 2 components
  for (const auto& row : s.constraints()) {
    EXPECT_EQ(row.kind, ConstraintKind::hanging);
    ASSERT_EQ(row.masters.size(), 2U);
    EXPECT_EQ(row.masters[0].second, 0.5);
    EXPECT_EQ(row.masters[1].second, 0.5);
    const Vec2 mid = 0.5 * (s.node(row.masters[0].first / 2) + s.node(row.masters[1].first / 2));
    EXPECT_NEAR((mid - s.node(row.dof / 2)).norm(), 0.0, 1e-15);
  }
}

TEST(Space, IllPosedNodeUsesRootExtrapolation) {
  const auto d = half_plane_2x2();
  const ContinuousSpace& s = d->space();
  const QuadtreeMesh& m = d->mesh();
  const auto node = s.find_node(std::uint64_t{1} << kMaxDepth, 0);
  ASSERT_TRUE(node);
  const ConstraintRow* row = nullptr;
  for (const auto& r : s.constraints())
    if (r.dof == 2 * *node) row = &r;
  ASSERT_NE(row, nullptr);
  EXPECT_EQ(row->kind, ConstraintKind::ill_posed);
  // Root is the lower-left cell; its corners (0,0) and (0.5,0) carry -1 and 2.
  const std::size_t root = m.checked_index(CellId{1, 0});
  const auto& rn = s.cell_nodes(root);
  std::map<std::size_t, double> got(row->masters.begin(), row->masters.end());
  ASSERT_EQ(got.size(), 2U);
  EXPECT_DOUBLE_EQ(got.at(2 * rn[0]), -1.0);
  EXPECT_DOUBLE_EQ(got.at(2 * rn[1]), 2.0);
}

TEST(Space, LinearReproductionAndTraceContinuityOnRandomInstances) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int instances = 0;
  int attempts = 0;
  while (instances < 20 && attempts < 200) {
    ++attempts;
    const QuadtreeMesh m = test::random_mesh(rng, 1.0, 2, 6, 3, 0.2);
    const Vec2 c(0.2 + 0.6 * u01(rng), 0.2 + 0.6 * u01(rng));
    LevelSet ls = LevelSet::circle(c, 0.25 + 0.2 * u01(rng), "c");
    if (u01(rng) < 0.5) ls = LevelSet::intersect(LevelSet::circle(Vec2(0.5, 0.5), 0.7, "o"), LevelSet::complement(LevelSet::circle(c, 0.15, "h")));
    DiscretizationOptions o;
    if (u01(rng) < 0.5) o.space.dirichlet = {{Side::xmin, 0}, {Side::ymin, 1}};
    std::shared_ptr<const Discretization> d;
    try {
      d = Discretization::build(m, ls, o);
    } catch (const GeometryError&) {
      continue;  // isolated cut island
    }
    ++instances;
    const ContinuousSpace& s = d->space();
    const Eigen::Matrix2d B = Eigen::Matrix2d::Random();
    const Vec2 a = Vec2::Random();
    auto g = [&](const Vec2& x) -> Vec2 { return a + B * x; };
    const Eigen::VectorXd nodal = s.interpolate(g);
    const Eigen::VectorXd full = s.expand(s.restrict(nodal), nodal);
    const auto& active = d->active_leaves();
    std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
    for (int k = 0; k < 1000; ++k) {
      const std::size_t leaf = active[pick(rng)];
      const Square sq = m.cell_square(m.leaves()[leaf]);
      const Vec2 x = sq.to_physical(Vec2(u01(rng), u01(rng)));
      const FieldValue f = s.evaluate(full, leaf, x);
      ASSERT_LE((f.value - g(x)).norm(), 1e-12) << "instance " << instances;
      ASSERT_LE((f.gradient - B).norm(), 1e-10);
    }
    // Trace continuity of a random field.
    Eigen::VectorXd rnd = s.expand(Eigen::VectorXd::Random(static_cast<Eigen::Index>(s.free_count())),
                                   Eigen::VectorXd::Random(static_cast<Eigen::Index>(s.dof_count())));
    for (std::size_t leaf : active) {
      const CellId& cell = m.leaves()[leaf];
      const Square sq = m.cell_square(cell);
      for (Side side : kSides) {
        for (const auto& nb : m.face_neighbors(cell, side)) {
          const std::size_t j = m.checked_index(nb);
          if (!s.is_active(j)) continue;
          const Square sn = m.cell_square(nb);
          const Square& small = sn.size < sq.size ? sn : sq;
          const auto sc = side_corners(side);
          const Vec2 p0 = sq.corner(sc[0]);
          const Vec2 p1 = sq.corner(sc[1]);
          const Vec2 dir = (p1 - p0).normalized();
          // Parametrize over the shorter edge.
          const double start = (small.anchor - p0).dot(dir) < 0 ? 0.0 : (small.anchor - p0).dot(dir);
          for (int q = 0; q <= 4; ++q) {
            const Vec2 x = p0 + dir * (start + small.size * q / 4.0);
            const double diff = (s.evaluate(rnd, leaf, x).value - s.evaluate(rnd, j, x).value).norm();
            ASSERT_LE(diff, 1e-12) << "leaf " << m.leaves()[leaf] << " nb " << nb << " x " << x.transpose()
                                   << " classes " << int(d->geometry().cell_class(leaf)) << int(d->geometry().cell_class(j))
                                   << " released " << s.released_hanging();
          }
        }
      }
    }
  }
  EXPECT_EQ(instances, 20);
}

TEST(Space, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  DiscretizationOptions o;
  const auto d = Discretization::build(test::random_mesh(rng, 1.0, 2, 5, 2), LevelSet::circle(Vec2(0.5, 0.5), 0.4, ""), o);
  const ContinuousSpace& s = d->space();
  const Eigen::VectorXd full = s.expand(Eigen::VectorXd::Random(static_cast<Eigen::Index>(s.free_count())));
  for (std::size_t leaf : d->active_leaves()) {
    const Square sq = d->mesh().cell_square(d->mesh().leaves()[leaf]);
    const Vec2 x = sq.to_physical(Vec2(0.3, 0.6));
    const double h = 1e-6 * sq.size;
    const FieldValue f = s.evaluate(full, leaf, x);
    Eigen::Matrix2d fd;
    for (int j = 0; j < 2; ++j) {
      const Vec2 e = Vec2::Unit(j) * h;
      fd.col(j) = (s.evaluate(full, leaf, x + e).value - s.evaluate(full, leaf, x - e).value) / (2 * h);
    }
    EXPECT_LE((fd - f.gradient).norm(), 1e-7 * std::max(1.0, f.gradient.norm()));
  }
}

TEST(Space, ZeroCoefficientsGiveZero) {
  const auto d = half_plane_2x2();
  const Eigen::VectorXd z = d->space().expand(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->space().free_count())));
  for (std::size_t leaf : d->active_leaves()) EXPECT_EQ(d->space().evaluate(z, leaf, Vec2(0.6, 0.3)).value.norm(), 0.0);
}

TEST(Space, StrongDirichletOverridesOtherRows) {
  DiscretizationOptions o;
  o.space.dirichlet = {{Side::xmax, 0}};
  const auto d = Discretization::build(QuadtreeMesh::uniform(1.0, 1, 4), LevelSet::half_plane(Vec2(1, 0), 0.75, "r"), o);
  const ContinuousSpace& s = d->space();
  for (std::size_t n = 0; n < s.node_count(); ++n)
    if (s.node(n).x() == 1.0) EXPECT_EQ(s.kind(2 * n), DofKind::dirichlet);
}

TEST(History, InteriorCellGaussNodes) {
  DiscretizationOptions o;
  const auto d = Discretization::build(QuadtreeMesh(1.0, 2), LevelSet::circle(Vec2(0.5, 0.5), 5, ""), o);
  const HistoryLayout& h = *d->history_layout();
  ASSERT_EQ(h.size(), 4U);
  const double lo = 0.5 - 0.5 / std::sqrt(3.0);
  const double hi = 0.5 + 0.5 / std::sqrt(3.0);
  const std::array<Vec2, 4> expect{Vec2(lo, lo), Vec2(hi, lo), Vec2(lo, hi), Vec2(hi, hi)};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR((h.node(k) - expect[k]).norm(), 0.0, 1e-15);
}

TEST(History, StandardFlavorHasNoRows) {
  EXPECT_TRUE(half_plane_2x2(HistoryFlavor::standard)->history_layout()->constraints().empty());
}

TEST(History, AggregatedRowsReproduceRootPolynomial) {
  const auto d = half_plane_2x2();
  HistoryField f(d->history_layout());
  const HistoryLayout& h = f.layout();
  EXPECT_FALSE(h.constraints().empty());
  auto p = [](const Vec2& x) { return 0.3 + 1.7 * x.x() - 0.4 * x.y() + 2.2 * x.x() * x.y(); };
  for (std::size_t k = 0; k < h.size(); ++k) f.values()[k].alpha = h.is_constrained(k) ? -99.0 : p(h.node(k));
  f.apply_constraints();
  for (const auto& row : h.constraints()) {
    EXPECT_NEAR(f.values()[row.dof].alpha, p(h.node(row.dof)), 1e-14);
    EXPECT_EQ(d->geometry().cell_class(h.leaf_of(row.dof)), CellClass::cut);
  }
}
