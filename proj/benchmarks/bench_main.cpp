#include "ufep/config.hpp"
#include "ufep/driver.hpp"
#include "ufep/linear_solver.hpp"

#include <benchmark/benchmark.h>

using namespace ufep;

namespace {

struct Cylinder {
  std::shared_ptr<const Discretization> disc;
  std::unique_ptr<Assembler> assembler;
};

Cylinder cylinder(unsigned level) {
  const SimulationSetup s = load_config(std::string(UFEP_SOURCE_DIR) + "/configs/thick_cylinder.json").setup();
  Cylinder c;
  c.disc = Discretization::build(initial_mesh(s.length, level, 8, s.level_set, s.discretization.cut), s.level_set,
                                 s.discretization);
  c.assembler = std::make_unique<Assembler>(c.disc, s.problem);
  return c;
}

void BM_ReturnMapping(benchmark::State& state) {
  MaterialParams m;
  m.H = 0.2e9;
  if (state.range(0) != 0) {
    m.K_inf = 1e8;
    m.delta = 20.0;
  }
  const Voigt4 eps(2e-3, -1e-3, 0.0, 1.5e-3);
  PointHistory h;
  h.alpha = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(stress_update(eps, h, m));
}
BENCHMARK(BM_ReturnMapping)->Arg(0)->Arg(1);

void BM_Discretization(benchmark::State& state) {
  const SimulationSetup s = load_config(std::string(UFEP_SOURCE_DIR) + "/configs/thick_cylinder.json").setup();
  const QuadtreeMesh m = initial_mesh(s.length, static_cast<unsigned>(state.range(0)), 8, s.level_set, s.discretization.cut);
  for (auto _ : state) benchmark::DoNotOptimize(Discretization::build(m, s.level_set, s.discretization));
}
BENCHMARK(BM_Discretization)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
  const Cylinder c = cylinder(static_cast<unsigned>(state.range(0)));
  const HistoryField h(c.disc->history_layout());
  const Eigen::VectorXd u = c.assembler->expand(Eigen::VectorXd::Zero(c.disc->space().free_count()), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(c.assembler->jacobian(u, h, 1.0));
  state.counters["free_dofs"] = static_cast<double>(c.disc->space().free_count());
}
BENCHMARK(BM_Jacobian)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Cg(benchmark::State& state) {
  const Cylinder c = cylinder(static_cast<unsigned>(state.range(0)));
  const HistoryField h(c.disc->history_layout());
  const auto sys =
      c.assembler->jacobian(c.assembler->expand(Eigen::VectorXd::Zero(c.disc->space().free_count()), 1.0), h, 1.0);
  long iters = 0;
  for (auto _ : state) iters = cg_solve(sys.matrix, sys.rhs).iterations;
  state.counters["cg_iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_Cg)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
