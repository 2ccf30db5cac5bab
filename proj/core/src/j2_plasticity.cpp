#include "ufep/j2_plasticity.hpp"

#include <cmath>
#include <sstream>

namespace ufep {

namespace {

const double kSqrt23 = std::sqrt(2.0 / 3.0);

Tangent4 deviatoric_projector() {
  Tangent4 p = Tangent4::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / 3.0;
  p(3, 3) = 0.5;
  return p;
}

Tangent4 volumetric_projector() {
  Tangent4 p = Tangent4::Zero();
  p.topLeftCorner<3, 3>().setOnes();
  return p;
}

}  // namespace

void MaterialParams::validate() const {
  std::ostringstream err;
  if (!(E > 0.0)) err << "E must be positive; ";
  if (!(nu >= 0.0 && nu < 0.5)) err << "nu must lie in [0, 0.5); ";
  if (!(sigma_y > 0.0)) err << "sigma_y must be positive; ";
  if (!(H >= 0.0)) err << "H must be non-negative; ";
  if (!(delta >= 0.0)) err << "delta must be non-negative; ";
  if (!(theta == 0.0 || theta == 1.0)) err << "theta must be 0 or 1; ";
  if (!err.str().empty()) throw MaterialError("invalid material: " + err.str());
}

MaterialParams MaterialParams::from_von_mises() const {
  MaterialParams p = *this;
  p.sigma_y *= 0.5;
  p.H *= 0.5;
  p.K_inf *= 0.5;
  p.K_0 *= 0.5;
  return p;
}

double hardening_q(double alpha, const MaterialParams& m) {
  return -m.theta * m.H * alpha - (m.K_inf - m.K_0) * (1.0 - std::exp(-m.delta * alpha));
}

double hardening_q_prime(double alpha, const MaterialParams& m) {
  return -m.theta * m.H - (m.K_inf - m.K_0) * m.delta * std::exp(-m.delta * alpha);
}

double voigt_norm(const Voigt4& s) {
  return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + 2.0 * s[3] * s[3]);
}

Voigt4 deviator(const Voigt4& t) {
  Voigt4 d = t;
  const double p = (t[0] + t[1] + t[2]) / 3.0;
  d[0] -= p;
  d[1] -= p;
  d[2] -= p;
  return d;
}

double yield_function(const Voigt4& s_dev, double alpha, const MaterialParams& m) {
  return 0.5 * voigt_norm(s_dev) - kSqrt23 * (m.sigma_y - hardening_q(alpha, m));
}

Tangent4 elastic_tangent(const MaterialParams& m) {
  return m.bulk() * volumetric_projector() + 2.0 * m.shear() * deviatoric_projector();
}

StressResult stress_update(const Voigt4& strain, const PointHistory& history, const MaterialParams& m) {
  const double G = m.shear();
  const double K = m.bulk();

  Voigt4 eps = strain;
  eps[3] *= 0.5;
  const Voigt4 eps_e = eps - history.eps_p;
  const double tr = eps_e[0] + eps_e[1] + eps_e[2];
  const Voigt4 s_trial = 2.0 * G * deviator(eps_e);
  const double phi_trial = yield_function(s_trial, history.alpha, m);

  StressResult out;
  out.history = history;
  Voigt4 vol = Voigt4::Zero();
  vol.head<3>().setConstant(K * tr);

  if (phi_trial <= 0.0) {
    out.stress = vol + s_trial;
    out.tangent = elastic_tangent(m);
    return out;
  }

  const double norm_trial = voigt_norm(s_trial);
  double dg = 0.0;
  if (m.linear_hardening()) {
    dg = phi_trial / (G + 2.0 / 3.0 * m.theta * m.H);
  } else {
    auto residual = [&](double x) {
      return 0.5 * (norm_trial - 2.0 * G * x) - kSqrt23 * (m.sigma_y - hardening_q(history.alpha + kSqrt23 * x, m));
    };
    const double tol = 1e-12 * m.sigma_y;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const double r = residual(dg);
      if (std::abs(r) <= tol) {
        converged = true;
        break;
      }
      const double dr = -G + 2.0 / 3.0 * hardening_q_prime(history.alpha + kSqrt23 * dg, m);
      dg -= r / dr;
    }
    if (!converged) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "return mapping did not converge: trial |s| = " << norm_trial << ", alpha = " << history.alpha
          << ", phi_trial = " << phi_trial;
      throw MaterialError(msg.str());
    }
  }

  const Voigt4 n = s_trial / norm_trial;
  out.plastic = true;
  out.dgamma = dg;
  out.stress = vol + s_trial - 2.0 * G * dg * n;
  out.history.eps_p = history.eps_p + dg * n;
  out.history.alpha = history.alpha + kSqrt23 * dg;

  const double qp = hardening_q_prime(out.history.alpha, m);
  const double a = 1.0 - 2.0 * G * dg / norm_trial;
  const double b = -(4.0 / 3.0) * qp / (2.0 * G - (4.0 / 3.0) * qp);
  out.tangent = K * volumetric_projector() + 2.0 * G * a * deviatoric_projector() + 2.0 * G * (b - a) * n * n.transpose();
  return out;
}

double tangent_vs_fd(const Voigt4& strain, const PointHistory& history, const MaterialParams& m, double h) {
  const Tangent4 c = stress_update(strain, history, m).tangent;
  Tangent4 fd = Tangent4::Zero();
  for (int j = 0; j < 4; ++j) {
    Voigt4 ep = strain;
    Voigt4 em = strain;
    ep[j] += h;
    em[j] -= h;
    fd.col(j) = (stress_update(ep, history, m).stress - stress_update(em, history, m).stress) / (2.0 * h);
  }
  return (c - fd).cwiseAbs().maxCoeff() / c.cwiseAbs().maxCoeff();
}

}  // namespace ufep
