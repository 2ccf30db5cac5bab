#include "ufep/config.hpp"
#include "ufep/driver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

using namespace ufep;

namespace {

SimulationSetup config_setup(const std::string& name) {
  return load_config(std::string(UFEP_SOURCE_DIR) + "/configs/" + name).setup();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / "ufep_tests" / name;
  std::filesystem::remove_all(p);
  return p;
}

std::size_t count_files(const std::filesystem::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ext) ++n;
  return n;
}

}  // namespace

TEST(Driver, InitialMeshHasNoExteriorSiblingQuadruple) {
  const SimulationSetup s = config_setup("thick_cylinder.json");
  const QuadtreeMesh m = initial_mesh(s.length, 4, 7, s.level_set, s.discretization.cut);
  EXPECT_TRUE(m.is_balanced());
  const auto cls = classify_cells(m, s.level_set, s.discretization.cut);
  std::map<CellId, int> exterior_children;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (cls[i] == CellClass::exterior && m.leaves()[i].level > 0) ++exterior_children[m.leaves()[i].parent()];
  for (const auto& [p, n] : exterior_children) {
    if (n < 4) continue;
    // Only balance may keep such a quadruple alive.
    std::map<CellId, Mark> marks;
    for (unsigned k = 0; k < 4; ++k) marks[p.child(k)] = Mark::coarsen;
    const AdaptResult a = refine_and_coarsen(m, marks);
    EXPECT_EQ(a.mesh.size(), m.size()) << p;
  }
  EXPECT_LT(m.size(), 256U);
}

TEST(Driver, SingleStepWithoutThresholdIsAPlainSolve) {
  SimulationSetup s = config_setup("thick_cylinder.json");
  s.amr.num_load_steps = 1;
  s.amr.eta_g_max = INFINITY;
  s.load_scale = 0.3;
  s.output_dir.clear();
  RunLog log;
  const SimulationResult r = run_simulation(s, log);
  ASSERT_FALSE(r.failed) << r.failure;
  ASSERT_EQ(r.reports.size(), 1U);
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.reports[0].amr_cycles, 0);
  EXPECT_EQ(r.reports[0].newton_iters, 1);
}

TEST(Driver, ElasticPatchNeverAdapts) {
  SimulationSetup s = config_setup("elastic_patch.json");
  s.output_dir.clear();
  RunLog log;
  const SimulationResult r = run_simulation(s, log);
  ASSERT_FALSE(r.failed) << r.failure;
  ASSERT_EQ(r.reports.size(), 1U);
  EXPECT_LE(r.reports[0].eta_g, 1e-10);
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(log.count("adapt"), 0U);
}

TEST(Driver, ThickCylinderRegression) {
  SimulationSetup s = config_setup("thick_cylinder.json");
  const auto dir = fresh_dir("cylinder");
  s.output_dir = dir.string();
  RunLog log;
  const SimulationResult r = run_simulation(s, log);
  ASSERT_FALSE(r.failed) << r.failure;
  ASSERT_EQ(r.reports.size(), 11U);
  int cycles = 0;
  for (const auto& rep : r.reports) {
    cycles += rep.amr_cycles;
    EXPECT_GE(rep.active_fraction, 0.8) << "step " << rep.load_step;
    EXPECT_LE(rep.amr_cycles, s.amr.num_amr_steps);
    if (rep.load_step % s.amr.amr_step_freq != 0) EXPECT_EQ(rep.amr_cycles, 0);
  }
  EXPECT_EQ(static_cast<std::size_t>(cycles), r.events.size());
  EXPECT_EQ(log.count("adapt"), r.events.size());
  const bool budget_warned = log.warning_count("amr_budget_exhausted") > 0;
  for (const auto& e : r.events) {
    EXPECT_TRUE(e.eta_after <= e.eta_before || budget_warned) << "step " << e.load_step << " cycle " << e.cycle;
    EXPECT_GE(e.cells_after, e.cells_before);
  }
  EXPECT_EQ(r.vtk_files, 11 + cycles);
  EXPECT_EQ(count_files(dir, ".vtu"), static_cast<std::size_t>(11 + cycles));

  // Same counts on a second run.
  s.output_dir.clear();
  RunLog log2;
  const SimulationResult again = run_simulation(s, log2);
  ASSERT_EQ(again.reports.size(), r.reports.size());
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    EXPECT_EQ(again.reports[i].total_cells, r.reports[i].total_cells);
    EXPECT_EQ(again.reports[i].free_dofs, r.reports[i].free_dofs);
    EXPECT_EQ(again.reports[i].eta_g, r.reports[i].eta_g);
  }
}

TEST(Driver, NewtonFailureReturnsCheckpoint) {
  SimulationSetup s = config_setup("thick_cylinder.json");
  s.amr.eta_g_max = INFINITY;
  s.newton.max_iters = 1;
  const auto dir = fresh_dir("failure");
  s.output_dir = dir.string();
  RunLog log;
  const SimulationResult r = run_simulation(s, log);
  ASSERT_TRUE(r.failed);
  ASSERT_FALSE(r.reports.empty());
  ASSERT_TRUE(r.state.has_value());
  EXPECT_DOUBLE_EQ(r.state->lambda, s.load_scale * r.reports.size() / s.amr.num_load_steps);
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoint.vtu"));
  EXPECT_GT(log.warning_count("newton_failure"), 0U);

  // The checkpoint equals the converged state of a run stopped at that step.
  SimulationSetup ok = s;
  ok.newton = config_setup("thick_cylinder.json").newton;
  ok.output_dir.clear();
  ok.amr.num_load_steps = s.amr.num_load_steps;
  RunLog log2;
  const SimulationResult full = run_simulation(ok, log2);
  ASSERT_FALSE(full.failed);
  EXPECT_EQ(full.reports[r.reports.size() - 1].free_dofs, r.reports.back().free_dofs);
  EXPECT_EQ(full.reports[r.reports.size() - 1].eta_g, r.reports.back().eta_g);
}

TEST(Driver, ReportsCsvHasHeaderAndCrlf) {
  std::ostringstream os;
  write_reports_csv(os, {StepReport{1, 0, 10, 16, 12, 0.75, 0.5, 1}});
  const std::string s = os.str();
  EXPECT_NE(s.find("\r\n"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
}

TEST(Driver, InvalidAmrConfigIsRejected) {
  AmrConfig a;
  a.theta_r = 1.5;
  EXPECT_THROW(a.validate(), ConfigError);
}
