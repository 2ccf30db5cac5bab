#pragma once

#include "ufep/types.hpp"

namespace ufep {

/// Isotropic J2 material with linear plus saturation hardening.
struct MaterialParams {
  double E = 210e9;
  double nu = 0.3;
  double sigma_y = 240e6;
  double H = 0.0;
  double theta = 1.0;  ///< activation of the linear hardening term
  double K_inf = 0.0;
  double K_0 = 0.0;
  double delta = 0.0;

  void validate() const;
  [[nodiscard]] double shear() const { return E / (2.0 * (1.0 + nu)); }
  [[nodiscard]] double bulk() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
  [[nodiscard]] bool linear_hardening() const { return K_inf == K_0 || delta == 0.0; }

  /// Parameters of the half-norm yield function that reproduce the textbook
  /// criterion ||s|| = sqrt(2/3) (sigma_y + ...) of the given parameters.
  [[nodiscard]] MaterialParams from_von_mises() const;
};

/// Plastic state at a point: equivalent plastic strain and plastic strain
/// (Voigt, tensor shear component).
struct PointHistory {
  double alpha = 0.0;
  Voigt4 eps_p = Voigt4::Zero();
};

struct StressResult {
  Voigt4 stress = Voigt4::Zero();
  PointHistory history;
  Tangent4 tangent = Tangent4::Zero();  ///< d stress / d strain (engineering shear)
  bool plastic = false;
  double dgamma = 0.0;
};

/// q(alpha) = -theta H alpha - (K_inf - K_0)(1 - exp(-delta alpha))
double hardening_q(double alpha, const MaterialParams& m);
double hardening_q_prime(double alpha, const MaterialParams& m);

/// Norm of a symmetric tensor in Voigt layout with tensor shear.
double voigt_norm(const Voigt4& s);
Voigt4 deviator(const Voigt4& t);

/// phi = 1/2 ||s|| - sqrt(2/3) (sigma_y - q(alpha))
double yield_function(const Voigt4& s_dev, double alpha, const MaterialParams& m);

Tangent4 elastic_tangent(const MaterialParams& m);

/// Radial return. `strain` has engineering shear and eps_zz = 0 for plane
/// strain. Throws MaterialError if the scalar Newton iteration fails.
StressResult stress_update(const Voigt4& strain, const PointHistory& history, const MaterialParams& m);

/// Max |C - C_fd| / max |C| with central differences of step h.
double tangent_vs_fd(const Voigt4& strain, const PointHistory& history, const MaterialParams& m, double h = 1e-7);

}  // namespace ufep
