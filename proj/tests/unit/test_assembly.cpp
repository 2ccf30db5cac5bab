#include "fd_check.hpp"
#include "ufep/assembler.hpp"
#include "ufep/config.hpp"
#include "ufep/driver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ufep;

namespace {

struct Fixture {
  std::shared_ptr<const Discretization> disc;
  std::unique_ptr<Assembler> assembler;
};

Fixture cylinder(int level) {
  const ProblemConfig cfg = load_config(std::string(UFEP_SOURCE_DIR) + "/configs/thick_cylinder.json");
  const SimulationSetup s = cfg.setup();
  Fixture f;
  f.disc = Discretization::build(initial_mesh(s.length, level, s.amr.max_level, s.level_set, s.discretization.cut),
                                 s.level_set, s.discretization);
  f.assembler = std::make_unique<Assembler>(f.disc, s.problem);
  return f;
}

MaterialParams unit_material() {
  MaterialParams m;
  m.E = 1000.0;
  m.nu = 0.25;
  m.sigma_y = 1e6;
  return m;
}

BcValue affine(const Eigen::Matrix2d& g, const Vec2& c) {
  return [g, c](const Vec2& x, const Vec2&, double lambda) -> Vec2 { return lambda * (c + g * x); };
}

}  // namespace

TEST(Assembly, ZeroStateGivesZeroResidual) {
  const Fixture f = cylinder(3);
  Problem p = f.assembler->problem();
  for (auto& bc : p.bcs) bc.value = [](const Vec2&, const Vec2&, double) { return Vec2::Zero(); };
  const Assembler a(f.disc, p);
  const HistoryField h(f.disc->history_layout());
  const Eigen::VectorXd r = a.residual(a.expand(Eigen::VectorXd::Zero(f.disc->space().free_count()), 1.0), h, 1.0);
  EXPECT_EQ(r.norm(), 0.0);
}

TEST(Assembly, FittedPatchWithStrongAffineData) {
  const LevelSet ls = LevelSet::box(Vec2(0, 0), Vec2(1, 1), "box");
  DiscretizationOptions o;
  o.space.dirichlet = {{Side::xmin, 0}, {Side::xmin, 1}, {Side::xmax, 0}, {Side::xmax, 1},
                       {Side::ymin, 0}, {Side::ymin, 1}, {Side::ymax, 0}, {Side::ymax, 1}};
  QuadtreeMesh m = QuadtreeMesh::uniform(1.0, 3, 6);
  m = refine_and_coarsen(m, {{m.leaves()[5], Mark::refine}}).mesh;
  const auto disc = Discretization::build(m, ls, o);
  ASSERT_EQ(disc->geometry().count(CellClass::cut), 0U);
  Eigen::Matrix2d g;
  g << 1e-3, 2e-3, -5e-4, 3e-3;
  Problem p;
  p.material = unit_material();
  for (const char* face : {"xmin", "xmax", "ymin", "ymax"})
    p.bcs.push_back({face, BcKind::dirichlet_strong, {true, true}, affine(g, Vec2(0.1, -0.2))});
  const Assembler a(disc, p);
  const HistoryField h(disc->history_layout());
  const Eigen::VectorXd nodal = disc->space().interpolate([&](const Vec2& x) -> Vec2 { return Vec2(0.1, -0.2) + g * x; });
  const Eigen::VectorXd r = a.residual(a.expand(disc->space().restrict(nodal), 1.0), h, 1.0);
  ASSERT_GT(r.size(), 0);
  EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Assembly, NitscheOnUnfittedDiscIsConsistentForLinearFields) {
  const LevelSet ls = LevelSet::circle(Vec2(0.5, 0.5), 0.37, "disc");
  Eigen::Matrix2d g;
  g << 2e-3, -1e-3, 4e-3, 1e-3;
  const Vec2 c(1e-3, 2e-3);
  Problem p;
  p.material = unit_material();
  p.bcs.push_back({"disc", BcKind::dirichlet_nitsche, {true, true}, affine(g, c)});
  for (int level : {3, 4}) {
    const auto disc = Discretization::build(QuadtreeMesh::uniform(1.0, level, 6), ls, {});
    const Assembler a(disc, p);
    const HistoryField h(disc->history_layout());
    const Eigen::VectorXd nodal = disc->space().interpolate([&](const Vec2& x) -> Vec2 { return c + g * x; });
    const Eigen::VectorXd u = a.expand(disc->space().restrict(nodal), 1.0);
    const Eigen::VectorXd r = a.residual(u, h, 1.0);
    // Scale: the internal force vector of the same field without boundary terms.
    Problem free_problem = p;
    free_problem.bcs.clear();
    const Eigen::VectorXd internal = Assembler(disc, free_problem).residual(u, h, 1.0);
    EXPECT_LE(r.norm(), 1e-10 * internal.norm()) << "level " << level;
  }
}

TEST(Assembly, ElasticJacobianIsTheLinearOperator) {
  const Fixture f = cylinder(3);
  const Assembler& a = *f.assembler;
  const HistoryField h(f.disc->history_layout());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1e-8);
  Eigen::VectorXd u(static_cast<Eigen::Index>(f.disc->space().free_count()));
  for (auto& v : u) v = n(rng);
  const auto sys = a.jacobian(a.expand(Eigen::VectorXd::Zero(u.size()), 0.0), h, 0.0);
  const Eigen::VectorXd ku = a.residual(a.expand(u, 0.0), h, 0.0);
  EXPECT_LE((sys.matrix * u - ku).norm(), 1e-10 * ku.norm());
}

TEST(Assembly, JacobianMatchesDirectionalDifferencesInPlasticStates) {
  const Fixture f = cylinder(3);
  const Assembler& a = *f.assembler;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto nf = static_cast<Eigen::Index>(f.disc->space().free_count());
  int plastic_states = 0;
  for (int k = 0; k < 5; ++k) {
    HistoryField h(f.disc->history_layout());
    for (auto& v : h.values()) {
      v.alpha = 1e-3 * std::abs(n(rng));
      v.eps_p = Voigt4(n(rng), n(rng), 0.0, n(rng)) * 1e-4;
      v.eps_p[2] = -v.eps_p[0] - v.eps_p[1];
    }
    h.apply_constraints();
    Eigen::VectorXd u(nf);
    for (auto& v : u) v = 2e-5 * n(rng);
    Eigen::VectorXd w(nf);
    for (auto& v : w) v = n(rng);
    const double lambda = 0.5 + 0.1 * k;
    const Eigen::VectorXd full = a.expand(u, lambda);
    const HistoryField next = a.update_history(full, h);
    for (std::size_t i = 0; i < h.values().size(); ++i)
      if (next.values()[i].alpha > h.values()[i].alpha) {
        ++plastic_states;
        break;
      }
    EXPECT_LE(oracle::jacobian_fd_error(a, u, h, lambda, w), 1e-5) << "state " << k;
  }
  EXPECT_GT(plastic_states, 0);
}

TEST(Assembly, ForeignHistoryLayoutIsRejected) {
  const Fixture f = cylinder(3);
  const Fixture g = cylinder(4);
  const HistoryField h(g.disc->history_layout());
  EXPECT_THROW((void)f.assembler->residual(Eigen::VectorXd::Zero(f.disc->space().dof_count()), h, 1.0), SolverError);
}
