#pragma once

#include "ufep/types.hpp"

namespace ufep {

struct CylinderPoint {
  double u_r = 0.0;
  double sigma_rr = 0.0;
  double sigma_tt = 0.0;
};

/// Plane-strain elastic-perfectly plastic thick cylinder a <= r <= b under
/// inner pressure P (Hill). The plastic zone a <= r <= c uses k = sigma_y /
/// sqrt(3); radial displacement in the plastic zone integrates the elastic
/// volume change with sigma_zz = (sigma_rr + sigma_tt) / 2.
class ThickCylinderExact {
 public:
  ThickCylinderExact(double a, double b, double E, double nu, double sigma_y, double pressure);

  [[nodiscard]] CylinderPoint at(double r) const;
  /// Radius of the elastic-plastic front (a when fully elastic).
  [[nodiscard]] double plastic_radius() const { return c_; }
  [[nodiscard]] double first_yield_pressure() const;
  [[nodiscard]] double limit_pressure() const;
  /// P(c) = 2k ln(c/a) + k (1 - c^2/b^2)
  [[nodiscard]] double pressure_relation(double c) const;

 private:
  double a_, b_, E_, nu_, k_, p_, c_;
};

}  // namespace ufep
