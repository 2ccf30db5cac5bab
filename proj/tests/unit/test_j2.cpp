#include "j2_oracle.hpp"
#include "ufep/j2_plasticity.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ufep;

namespace {

MaterialParams linear_material() {
  MaterialParams m;
  m.E = 210e9;
  m.nu = 0.3;
  m.sigma_y = 240e6;
  m.H = 0.2e9;
  return m;
}

Voigt4 random_strain(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return Voigt4(n(rng), n(rng), 0.0, n(rng));
}

}  // namespace

TEST(Hardening, ZeroAlphaGivesZero) {
  MaterialParams m = linear_material();
  m.K_inf = 3e8;
  m.delta = 7.0;
  EXPECT_EQ(hardening_q(0.0, m), 0.0);
}

TEST(Hardening, LinearTerm) {
  MaterialParams m;
  m.theta = 1.0;
  m.H = 0.2e9;
  EXPECT_NEAR(hardening_q(0.01, m), -2e6, 1e-6);
}

TEST(Hardening, SaturationAgainstExtendedPrecision) {
  MaterialParams m;
  m.theta = 1.0;
  m.H = 0.2e9;
  m.K_0 = 1e8;
  m.K_inf = 1.5e8;
  m.delta = 10.0;
  const long double ref = -0.2e9L * 0.05L - 5e7L * (1.0L - std::exp(-0.5L));
  EXPECT_NEAR(hardening_q(0.05, m), static_cast<double>(ref), 1e-15 * std::abs(static_cast<double>(ref)));
  // Derivative against a central difference.
  const double h = 1e-6;
  EXPECT_NEAR(hardening_q_prime(0.05, m), (hardening_q(0.05 + h, m) - hardening_q(0.05 - h, m)) / (2 * h), 1e-1);
}

TEST(Yield, ZeroDeviator) {
  const MaterialParams m = linear_material();
  EXPECT_DOUBLE_EQ(yield_function(Voigt4::Zero(), 0.0, m), -std::sqrt(2.0 / 3.0) * m.sigma_y);
}

TEST(Yield, OnsetOfUniaxialDeviator) {
  const MaterialParams m = linear_material();
  // diag(2, -1, -1) scaled to norm 2 sqrt(2/3) sigma_y.
  Voigt4 s(2.0, -1.0, -1.0, 0.0);
  s *= 2.0 * std::sqrt(2.0 / 3.0) * m.sigma_y / std::sqrt(6.0);
  EXPECT_NEAR(yield_function(s, 0.0, m), 0.0, 1e-9 * m.sigma_y);
}

TEST(Yield, RandomTracelessTensorMatchesFullMatrixNorm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1e8);
  const MaterialParams m = linear_material();
  for (int k = 0; k < 100; ++k) {
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    t(0, 0) = n(rng);
    t(1, 1) = n(rng);
    t(2, 2) = -t(0, 0) - t(1, 1);
    t(0, 1) = t(1, 0) = n(rng);
    const double alpha = 0.01 * std::abs(n(rng)) / 1e8;
    const double ref = 0.5 * std::sqrt((t.array() * t.array()).sum()) -
                       std::sqrt(2.0 / 3.0) * (m.sigma_y + m.H * alpha);
    const Voigt4 v(t(0, 0), t(1, 1), t(2, 2), t(0, 1));
    EXPECT_NEAR(yield_function(v, alpha, m), ref, 1e-6);
  }
}

TEST(ReturnMap, ElasticStepIsHooke) {
  const MaterialParams m = linear_material();
  const Voigt4 eps(1e-5, -2e-5, 0.0, 3e-5);
  const StressResult r = stress_update(eps, {}, m);
  EXPECT_FALSE(r.plastic);
  EXPECT_LE((r.stress - elastic_tangent(m) * eps).norm(), 1e-12 * r.stress.norm());
  EXPECT_EQ(r.history.alpha, 0.0);
}

TEST(ReturnMap, UniaxialStretchHistoryMatchesOracle) {
  const MaterialParams m = linear_material();
  PointHistory h;
  oracle::J2State st;
  for (int step = 1; step <= 20; ++step) {
    const Voigt4 eps(2e-4 * step, 0.0, 0.0, 0.0);
    const StressResult r = stress_update(eps, h, m);
    const auto o = oracle::j2_step({eps[0], eps[1], eps[2], eps[3]}, st, m);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.stress[i], static_cast<double>(o.stress[i]), 1e-9 * m.sigma_y);
    EXPECT_NEAR(r.history.alpha, static_cast<double>(o.state.alpha), 1e-12);
    EXPECT_EQ(r.plastic, o.plastic);
    h = r.history;
    st = o.state;
  }
  EXPECT_GT(h.alpha, 0.0);
}

TEST(ReturnMap, RandomHistoriesWithSaturationMatchOracle) {
  std::mt19937_64 rng(11);
  for (int hist = 0; hist < 50; ++hist) {
    const MaterialParams m = oracle::random_material(rng, hist % 2 == 1);
    const double scale = 2.0 * m.sigma_y / m.E;
    PointHistory h;
    oracle::J2State st;
    Voigt4 eps = Voigt4::Zero();
    for (int step = 0; step < 20; ++step) {
      eps += random_strain(rng, scale);
      const StressResult r = stress_update(eps, h, m);
      const auto o = oracle::j2_step({eps[0], eps[1], eps[2], eps[3]}, st, m);
      double smax = 0.0;
      for (int i = 0; i < 4; ++i) smax = std::max(smax, std::abs(static_cast<double>(o.stress[i])));
      for (int i = 0; i < 4; ++i) ASSERT_NEAR(r.stress[i], static_cast<double>(o.stress[i]), 1e-8 * smax);
      ASSERT_NEAR(r.history.alpha, static_cast<double>(o.state.alpha), 1e-8 * std::max(1e-12, static_cast<double>(o.state.alpha)));
      ASSERT_GE(r.history.alpha, h.alpha);
      ASSERT_LE(std::abs(r.history.eps_p.head<3>().sum()), 1e-12);
      h = r.history;
      st = o.state;
    }
  }
}

TEST(Tangent, ElasticPointIsExact) {
  const MaterialParams m = linear_material();
  EXPECT_LE(tangent_vs_fd(Voigt4(1e-5, 2e-5, 0.0, -1e-5), {}, m), 1e-9);
}

TEST(Tangent, PlasticPointsMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int k = 0; k < 200; ++k) {
    const MaterialParams m = oracle::random_material(rng, k % 2 == 1);
    PointHistory h;
    h.alpha = 0.01 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Voigt4 eps = random_strain(rng, 3.0 * m.sigma_y / m.E);
    Voigt4 e = eps;
    e[3] *= 0.5;
    const double phi = yield_function(2.0 * m.shear() * deviator(e), h.alpha, m);
    if (std::abs(phi) < 1e-6 * m.sigma_y) continue;
    ++tested;
    EXPECT_LE(tangent_vs_fd(eps, h, m), phi > 0 ? 1e-6 : 1e-9) << "state " << k;
  }
  EXPECT_GT(tested, 150);
}

TEST(Tangent, MaterialValidation) {
  MaterialParams m;
  m.nu = 0.5;
  EXPECT_THROW(m.validate(), MaterialError);
  EXPECT_NO_THROW(linear_material().validate());
}

TEST(Material, VonMisesConversionHalvesStressLikeParameters) {
  MaterialParams m = linear_material();
  m.K_inf = 4.0;
  m.K_0 = 2.0;
  const MaterialParams p = m.from_von_mises();
  EXPECT_EQ(p.sigma_y, 120e6);
  EXPECT_EQ(p.H, 0.1e9);
  EXPECT_EQ(p.K_inf, 2.0);
  EXPECT_EQ(p.K_0, 1.0);
  EXPECT_EQ(p.E, m.E);
}
