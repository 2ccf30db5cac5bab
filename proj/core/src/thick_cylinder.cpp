#include "ufep/thick_cylinder.hpp"

#include "ufep/types.hpp"

#include <cmath>

namespace ufep {

ThickCylinderExact::ThickCylinderExact(double a, double b, double E, double nu, double sigma_y, double pressure)
    : a_(a), b_(b), E_(E), nu_(nu), k_(sigma_y / std::sqrt(3.0)), p_(pressure), c_(a) {
  if (!(a > 0.0 && b > a)) throw Error("thick cylinder needs 0 < a < b");
  if (!(pressure < limit_pressure())) throw Error("pressure at or beyond the limit load");
  if (pressure <= first_yield_pressure()) return;
  double lo = a;
  double hi = b;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * b; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pressure_relation(mid) < pressure)
      lo = mid;
    else
      hi = mid;
  }
  c_ = 0.5 * (lo + hi);
}

double ThickCylinderExact::first_yield_pressure() const { return k_ * (1.0 - a_ * a_ / (b_ * b_)); }

double ThickCylinderExact::limit_pressure() const { return 2.0 * k_ * std::log(b_ / a_); }

double ThickCylinderExact::pressure_relation(double c) const {
  return 2.0 * k_ * std::log(c / a_) + k_ * (1.0 - c * c / (b_ * b_));
}

CylinderPoint ThickCylinderExact::at(double r) const {
  const double G = E_ / (2.0 * (1.0 + nu_));
  const double lam = E_ * nu_ / ((1.0 + nu_) * (1.0 - 2.0 * nu_));
  const double K = E_ / (3.0 * (1.0 - 2.0 * nu_));

  // Elastic zone: sigma_rr = A - B / r^2, sigma_tt = A + B / r^2.
  double A;
  double B;
  if (c_ <= a_) {
    A = p_ * a_ * a_ / (b_ * b_ - a_ * a_);
    B = A * b_ * b_;
  } else {
    A = k_ * c_ * c_ / (b_ * b_);
    B = k_ * c_ * c_;
  }
  auto elastic_u = [&](double s) { return A * s / (2.0 * (lam + G)) + B / (2.0 * G * s); };

  CylinderPoint out;
  if (r >= c_) {
    out.sigma_rr = A - B / (r * r);
    out.sigma_tt = A + B / (r * r);
    out.u_r = elastic_u(r);
    return out;
  }
  out.sigma_rr = -p_ + 2.0 * k_ * std::log(r / a_);
  out.sigma_tt = out.sigma_rr + 2.0 * k_;
  // r u(r) = c u(c) - int_r^c s (sigma_rr + sigma_tt) / (2K) ds with
  // sigma_rr + sigma_tt = alpha + beta ln(s / a).
  const double alpha = -2.0 * p_ + 2.0 * k_;
  const double beta = 4.0 * k_;
  auto primitive = [&](double s) {
    return alpha * s * s / 2.0 + beta * (s * s / 2.0 * std::log(s / a_) - s * s / 4.0);
  };
  out.u_r = (c_ * elastic_u(c_) - (primitive(c_) - primitive(r)) / (2.0 * K)) / r;
  return out;
}

}  // namespace ufep
