#pragma once

#include "ufep/driver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ufep {

/// Level-set expression. Types: circle, half_plane, box, union,
/// intersection, complement.
struct LevelSetExpr {
  std::string type = "circle";
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  Vec2 normal = Vec2(1.0, 0.0);
  double offset = 0.0;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  std::string tag;
  std::vector<LevelSetExpr> operands;

  [[nodiscard]] LevelSet build() const;
};

/// Boundary value scaled by the load factor. Types:
///   constant: lambda * value
///   pressure: -lambda * pressure * n
///   affine:   lambda * (value + gradient x)
struct BcValueSpec {
  std::string type = "constant";
  Vec2 value = Vec2::Zero();
  Eigen::Matrix2d gradient = Eigen::Matrix2d::Zero();
  double pressure = 0.0;

  [[nodiscard]] BcValue build() const;
};

struct BcSpec {
  std::string region;
  BcKind kind = BcKind::neumann;
  std::array<bool, 2> components{true, true};
  BcValueSpec value;
};

/// Analytical reference for the convergence study.
struct ThickCylinderReference {
  double inner_radius = 0.1;
  double outer_radius = 0.2;
  double pressure = 0.19e9;
};

struct ProblemConfig {
  double length = 1.0;
  LevelSetExpr geometry;
  MaterialParams material;  ///< as given, before normalization
  std::string yield_normalization = "deviatoric_norm";  ///< "deviatoric_norm" or "von_mises"
  std::vector<BcSpec> boundary_conditions;
  Vec2 body_force = Vec2::Zero();  ///< scaled by the load factor
  double beta0 = 25.0;
  double load_scale = 1.0;
  AmrConfig amr;
  DiscretizationOptions discretization;  ///< dirichlet faces are derived
  NewtonConfig newton;
  std::string output_dir;
  std::optional<ThickCylinderReference> reference;

  /// Material after applying yield_normalization.
  [[nodiscard]] MaterialParams effective_material() const;
  [[nodiscard]] Problem problem() const;
  [[nodiscard]] SimulationSetup setup() const;
};

/// Parse and validate a JSON config. Unknown keys, wrong types and invalid
/// values raise ConfigError with a JSON pointer to the offending entry.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Canonical JSON (all fields, sorted keys, 2-space indent).
std::string serialize_config(const ProblemConfig& cfg);

}  // namespace ufep
