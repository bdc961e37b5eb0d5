#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "conekernel/spectrum.hpp"

using namespace conekernel;

TEST(ConeParams, DerivedQuantities) {
  const ConeParams p(0.5, 5, 1.0);
  EXPECT_EQ(p.d(), 1.5);
  EXPECT_EQ(p.n(), 5);
  EXPECT_DOUBLE_EQ(p.nu0(), std::sqrt(3.25));
  EXPECT_NEAR(p.nu0() * p.nu0(), p.d() * p.d() + p.c(), 1e-15);
  EXPECT_DOUBLE_EQ(p.small_x_exponent(), std::sqrt(3.25) - 1.5);
}

TEST(ConeParams, SubcriticalityGate) {
  EXPECT_NO_THROW(ConeParams(1.0, 3, -0.2499));
  EXPECT_THROW(ConeParams(1.0, 3, -0.25), DomainError);
  EXPECT_THROW(ConeParams(1.0, 3, -0.3), DomainError);
  EXPECT_THROW(ConeParams(1.0, 4, -1.0), DomainError);
  try {
    ConeParams(1.0, 3, -0.3);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("c > -(n-2)^2/4"), std::string::npos);
  }
}

TEST(ConeParams, RejectsBadRhoAndDimension) {
  EXPECT_THROW(ConeParams(0.0, 3, 0.0), DomainError);
  EXPECT_THROW(ConeParams(-1.0, 3, 0.0), DomainError);
  EXPECT_THROW(ConeParams(NAN, 3, 0.0), DomainError);
  EXPECT_THROW(ConeParams(1.0, 2, 0.0), DomainError);
  EXPECT_THROW(ConeParams(1.0, 3, INFINITY), DomainError);
}

TEST(ConeParams, RealHalfDimension) {
  const ConeParams p = ConeParams::with_real_d(0.8, 0.73, 0.1);
  EXPECT_EQ(p.d(), 0.73);
  EXPECT_FALSE(p.has_dimension());
  EXPECT_THROW(p.n(), DomainError);
  EXPECT_THROW(ConeParams::with_real_d(1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(ConeParams::with_real_d(1.0, 0.5, -0.3), DomainError);
}

TEST(ConeParams, JsonRoundTrip) {
  const ConeParams p(2.0 / 3.0, 4, -0.75);
  const nlohmann::json j = p;
  EXPECT_EQ(j.size(), 3u);
  EXPECT_TRUE(j.contains("rho") && j.contains("n") && j.contains("c"));
  EXPECT_EQ(cone_params_from_json(nlohmann::json::parse(j.dump())), p);
  EXPECT_THROW(cone_params_from_json(nlohmann::json{{"rho", 1.0}, {"n", 3}}), InputError);
  EXPECT_THROW(cone_params_from_json(nlohmann::json{{"rho", 1.0}, {"n", 3.5}, {"c", 0.0}}), InputError);
  EXPECT_THROW(cone_params_from_json(nlohmann::json{{"rho", 1.0}, {"n", 3}, {"c", -1.0}}), DomainError);
}

TEST(Nu, KnownValues) {
  EXPECT_DOUBLE_EQ(nu(ConeParams(1.0, 4, 0.0), 5), 6.0);
  EXPECT_DOUBLE_EQ(nu(ConeParams(1.0, 3, 0.0), 2), 2.5);
  EXPECT_NEAR(nu(ConeParams(0.5, 3, 0.0), 1), 2.8722813233, 1e-10);
  EXPECT_EQ(nu(ConeParams(0.3, 5, 2.0), 0), ConeParams(0.3, 5, 2.0).nu0());
  EXPECT_THROW(nu(ConeParams(1.0, 3, 0.0), -1), DomainError);
}

TEST(Nu, ExactAtUnitRhoZeroCoupling) {
  for (int n : {3, 4, 7}) {
    const ConeParams p(1.0, n, 0.0);
    for (long m = 0; m <= 1000000; m += (m < 1000 ? 1 : 997)) {
      const double expect = static_cast<double>(m) + p.d();
      ASSERT_LE(std::fabs(nu(p, m) - expect), 1e-13 * expect) << n << ' ' << m;
    }
  }
}

TEST(Nu, StrictlyIncreasing) {
  for (const ConeParams& p : {ConeParams(1.0 / 3.0, 3, 0.0), ConeParams(2.0, 4, -0.99), ConeParams(0.7, 6, 50.0)}) {
    double prev = nu(p, 0);
    for (long m = 1; m <= 1000000; ++m) {
      const double v = nu(p, m);
      ASSERT_GT(v, prev) << m;
      prev = v;
    }
  }
}

TEST(NuAsymptoticGap, KnownValues) {
  EXPECT_EQ(nu_asymptotic_gap(ConeParams(1.0, 3, 0.0), 100), 0.0);
  // nu_10 = sqrt(10*12 + 1 + 3) = sqrt(124), linear profile 11.
  EXPECT_NEAR(nu_asymptotic_gap(ConeParams(1.0, 4, 3.0), 10), std::sqrt(124.0) - 11.0, 1e-14);
  EXPECT_NEAR(nu_asymptotic_gap(ConeParams(1.0, 4, 3.0), 10), 0.1355287, 1e-7);
  EXPECT_LE(10.0 * nu_asymptotic_gap(ConeParams(1.0, 4, 3.0), 10), 2.0 * 3.0 * 1.0 / 2.0);
  EXPECT_THROW(nu_asymptotic_gap(ConeParams(1.0, 3, 0.0), 0), DomainError);
}

TEST(NuAsymptoticGap, DecaysLikeInverseDegree) {
  for (const ConeParams& p : {ConeParams(2.0, 3, 0.0), ConeParams(0.3, 5, -2.0), ConeParams(1.0, 4, 3.0)}) {
    double k = 0.0;
    for (long m = 1; m <= 1000; ++m) k = std::max(k, m * std::fabs(nu_asymptotic_gap(p, m)));
    EXPECT_GT(k, 0.0);
    for (long m : {10000L, 100000L, 1000000L, 100000000L}) {
      EXPECT_LE(m * std::fabs(nu_asymptotic_gap(p, m)), 1.01 * k) << m;
    }
    // Direct difference loses digits at large m; the gap formula agrees where both are reliable.
    const long m = 50;
    const double direct = nu(p, m) - (m + p.d()) / p.rho();
    EXPECT_NEAR(nu_asymptotic_gap(p, m), direct, 1e-12);
  }
  const ConeParams p(2.0, 3, 0.0);
  double k = 0.0;
  for (long m = 1; m <= 1000; ++m) k = std::max(k, m * std::fabs(nu_asymptotic_gap(p, m)));
  EXPECT_LE(std::fabs(nu_asymptotic_gap(p, 1000000)), 1.01e-6 * k);
}
