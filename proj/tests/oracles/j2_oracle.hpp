#pragma once

// Independent long-double radial return used as a reference for the
// material routines. Bisection on the consistency condition, no Newton.

#include "ufep/j2_plasticity.hpp"

#include <array>
#include <cmath>
#include <random>

namespace oracle {

struct J2State {
  std::array<long double, 4> eps_p{};  // tensor shear
  long double alpha = 0;
};

struct J2Out {
  std::array<long double, 4> stress{};
  J2State state;
  bool plastic = false;
};

inline long double q_of(long double a, const ufep::MaterialParams& m) {
  return -static_cast<long double>(m.theta) * m.H * a -
         static_cast<long double>(m.K_inf - m.K_0) * (1.0L - std::exp(-static_cast<long double>(m.delta) * a));
}

inline J2Out j2_step(const std::array<long double, 4>& strain_eng, const J2State& st, const ufep::MaterialParams& m) {
  const long double G = m.E / (2.0L * (1.0L + m.nu));
  const long double K = m.E / (3.0L * (1.0L - 2.0L * m.nu));
  const long double r23 = std::sqrt(2.0L / 3.0L);
  std::array<long double, 4> ee{};
  for (int i = 0; i < 4; ++i) ee[i] = (i == 3 ? strain_eng[3] / 2 : strain_eng[i]) - st.eps_p[i];
  const long double tr = ee[0] + ee[1] + ee[2];
  std::array<long double, 4> s{};
  for (int i = 0; i < 4; ++i) s[i] = 2 * G * (ee[i] - (i < 3 ? tr / 3 : 0.0L));
  const long double ns = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + 2 * s[3] * s[3]);
  auto g = [&](long double dg) { return 0.5L * (ns - 2 * G * dg) - r23 * (m.sigma_y - q_of(st.alpha + r23 * dg, m)); };
  J2Out out;
  out.state = st;
  long double dg = 0;
  if (g(0) > 0) {
    long double lo = 0;
    long double hi = ns / (2 * G);
    for (int it = 0; it < 200; ++it) {
      const long double mid = 0.5L * (lo + hi);
      (g(mid) > 0 ? lo : hi) = mid;
    }
    dg = 0.5L * (lo + hi);
    out.plastic = true;
  }
  for (int i = 0; i < 4; ++i) {
    const long double n = ns > 0 ? s[i] / ns : 0;
    out.stress[i] = s[i] - 2 * G * dg * n + (i < 3 ? K * tr : 0.0L);
    out.state.eps_p[i] = st.eps_p[i] + dg * n;
  }
  out.state.alpha = st.alpha + r23 * dg;
  return out;
}

/// Random material with optional saturation hardening.
inline ufep::MaterialParams random_material(std::mt19937_64& rng, bool saturation) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ufep::MaterialParams m;
  m.E = 100e9 + 150e9 * u(rng);
  m.nu = 0.2 + 0.2 * u(rng);
  m.sigma_y = 100e6 + 300e6 * u(rng);
  m.H = 1e9 * u(rng);
  m.theta = 1.0;
  if (saturation) {
    m.K_0 = 0.0;
    m.K_inf = 1e8 * u(rng);
    m.delta = 50.0 * u(rng);
  }
  return m;
}

}  // namespace oracle
