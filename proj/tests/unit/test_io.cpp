#include "ufep/config.hpp"
#include "ufep/vtk.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ufep;

namespace {

std::string source(const std::string& rel) { return std::string(UFEP_SOURCE_DIR) + "/" + rel; }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / "ufep_tests";
  std::filesystem::create_directories(p);
  return p / name;
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, RoundTripIsIdentityOnCanonicalForm) {
  for (const char* f : {"configs/thick_cylinder.json", "configs/elastic_patch.json", "configs/small_cut.json"}) {
    const std::string once = serialize_config(load_config(source(f)));
    EXPECT_EQ(serialize_config(parse_config(once)), once) << f;
  }
}

TEST(Config, ThickCylinderValues) {
  const ProblemConfig c = load_config(source("configs/thick_cylinder.json"));
  EXPECT_EQ(c.amr.num_load_steps, 11);
  EXPECT_EQ(c.amr.amr_step_freq, 2);
  EXPECT_EQ(c.amr.num_amr_steps, 2);
  EXPECT_DOUBLE_EQ(c.amr.eta_g_max, 0.1);
  // Textbook yield stress converted to the half-norm yield function.
  EXPECT_DOUBLE_EQ(c.effective_material().sigma_y, 120e6);
  ASSERT_TRUE(c.reference.has_value());
}

TEST(Config, UnknownKeyIsReportedWithPointer) {
  const std::string err = config_error(R"({"geometry": {"length": 1, "level_set": {"type": "circle", "center": [0.5, 0.5], "radius": 0.3, "tag": "c"}, "size": 2}})");
  EXPECT_NE(err.find("/geometry/size"), std::string::npos) << err;
}

TEST(Config, BadValuesAreReportedWithPointer) {
  const std::string base = R"({"geometry": {"length": 1, "level_set": {"type": "circle", "center": [0.5, 0.5], "radius": 0.3, "tag": "c"}},)";
  EXPECT_NE(config_error(base + R"("material": {"E": -1}})").find("/material"), std::string::npos);
  EXPECT_NE(config_error(base + R"("material": {"E": 1, "nu": 0.3, "sigma_y": 1}, "boundary_conditions": [{"region": "nowhere", "kind": "neumann", "value": {"type": "constant", "value": [0, 0]}}]})")
                .find("/boundary_conditions/0"),
            std::string::npos);
  EXPECT_NE(config_error("{not json").find("invalid JSON"), std::string::npos);
  EXPECT_THROW((void)load_config(scratch("does_not_exist.json").string()), ConfigError);
}

TEST(Vtk, GeometryOnlyFile) {
  const ProblemConfig c = load_config(source("configs/thick_cylinder.json"));
  const SimulationSetup s = c.setup();
  const auto d = Discretization::build(QuadtreeMesh::uniform(s.length, 3, 6), s.level_set, s.discretization);
  const auto path = scratch("geometry.vtu");
  write_vtk(path.string(), *d);
  const VtuData v = read_vtu(path.string());
  std::size_t expected_cells = d->geometry().count(CellClass::interior);
  for (std::size_t leaf : d->active_leaves())
    if (d->geometry().cell_class(leaf) == CellClass::cut) expected_cells += d->geometry().cut_cell(leaf).triangles.size();
  EXPECT_EQ(v.cells, expected_cells);
  EXPECT_EQ(v.coordinates.size(), 3 * v.points);
  EXPECT_TRUE(v.point_data.empty());
  EXPECT_TRUE(v.cell_data.contains("cell_class"));
  EXPECT_TRUE(v.cell_data.contains("aggregate_root"));
  std::ifstream in(path);
  std::string head;
  std::getline(in, head);
  EXPECT_EQ(head.rfind("<?xml", 0), 0U);
}

TEST(Vtk, LinearFieldRoundTrips) {
  const LevelSet ls = LevelSet::circle(Vec2(0.5, 0.5), 0.4, "c");
  const auto d = Discretization::build(QuadtreeMesh::uniform(1.0, 3, 6), ls, {});
  auto g = [](const Vec2& x) { return Vec2(1.0 + 2.0 * x.x(), 3.0 * x.y() - x.x()); };
  const Eigen::VectorXd u = d->space().expand(d->space().restrict(d->space().interpolate(g)));
  VtkFields f;
  f.displacement = &u;
  const auto path = scratch("linear.vtu");
  write_vtk(path.string(), *d, f);
  const VtuData v = read_vtu(path.string());
  const auto& disp = v.point_data.at("displacement");
  ASSERT_EQ(disp.size(), 3 * v.points);
  for (std::size_t p = 0; p < v.points; ++p) {
    const Vec2 x(v.coordinates[3 * p], v.coordinates[3 * p + 1]);
    const Vec2 e = g(x);
    EXPECT_NEAR(disp[3 * p], e.x(), 1e-10);
    EXPECT_NEAR(disp[3 * p + 1], e.y(), 1e-10);
    EXPECT_EQ(disp[3 * p + 2], 0.0);
  }
}
