#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "divrbf/error.hpp"
#include "divrbf/kernels.hpp"
#include "support/expansions.hpp"
#include "support/oracles.hpp"

using namespace divrbf;

namespace {

constexpr KernelKind kAll[] = {KernelKind::MQ, KernelKind::IMQ, KernelKind::IQ, KernelKind::GA};

oracle::Radial radial(KernelKind k) {
  switch (k) {
    case KernelKind::MQ: return oracle::Radial::MQ;
    case KernelKind::IMQ: return oracle::Radial::IMQ;
    case KernelKind::IQ: return oracle::Radial::IQ;
    case KernelKind::GA: return oracle::Radial::GA;
  }
  return oracle::Radial::GA;
}

}  // namespace

TEST(KernelConfig, RejectsBadEpsilon) {
  EXPECT_THROW(KernelConfig(KernelKind::GA, 0.0), Error);
  EXPECT_THROW(KernelConfig(KernelKind::GA, -1.0), Error);
  EXPECT_THROW(KernelConfig(KernelKind::GA, INFINITY), Error);
  EXPECT_NO_THROW(KernelConfig(KernelKind::GA, 1e-10));
}

TEST(KernelKind, ParseRoundTrip) {
  for (const auto k : kAll) EXPECT_EQ(parse_kernel_kind(kernel_name(k)), k);
  EXPECT_THROW(parse_kernel_kind("tps"), Error);
}

TEST(Phi, KnownValues) {
  EXPECT_EQ(phi({KernelKind::GA, 3.0}, 0.0), 1.0);
  EXPECT_NEAR(phi({KernelKind::MQ, 1.0}, 1.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(phi({KernelKind::IQ, 2.0}, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(phi({KernelKind::IMQ, 1.0}, 1.0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(RadialFactors, LimitsAtZero) {
  const auto ga = radial_factors({KernelKind::GA, 1.0}, 0.0);
  EXPECT_EQ(ga.F, -2.0);
  EXPECT_EQ(ga.G2, 4.0);
  const auto mq = radial_factors({KernelKind::MQ, 1.0}, 0.0);
  EXPECT_EQ(mq.F, 1.0);
  EXPECT_EQ(mq.G2, -1.0);
}

TEST(RadialFactors, FiniteDifferenceConsistency) {
  // F r = phi'(r) and F + G2 r^2 = phi''(r).
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  for (const auto k : kAll)
    for (const double eps : {0.5, 1.0, 2.0}) {
      const KernelConfig c(k, eps);
      std::vector<double> rs{0.7};
      for (int i = 0; i < 20; ++i) rs.push_back(unif(rng));
      for (const double r : rs) {
        const double h = 1e-4;
        const double d1 = (phi(c, r + h) - phi(c, r - h)) / (2 * h);
        const double d2 = (phi(c, r + h) - 2 * phi(c, r) + phi(c, r - h)) / (h * h);
        const auto [F, G2] = radial_factors(c, r);
        EXPECT_NEAR(F * r, d1, 1e-6 * std::max(1.0, std::abs(d1)));
        EXPECT_NEAR(F + G2 * r * r, d2, 1e-5 * std::max(1.0, std::abs(d2)));
      }
    }
}

TEST(ExpansionCoeff, FlatLimits) {
  EXPECT_NEAR(expansion_coeff({KernelKind::IMQ, 1e-8}, 1), 8 * std::numbers::pi / 3, 1e-7);
  EXPECT_NEAR(scaled_expansion_coeff({KernelKind::GA, 1e-8}, 0), 8 * std::numbers::pi, 1e-7);
}

TEST(ExpansionCoeff, FunkHeckeOracle) {
  for (const auto k : kAll)
    for (const double eps : {0.5, 1.0}) {
      const KernelConfig c(k, eps);
      const auto proj = oracle::funk_hecke(radial(k), eps, 20);
      const double k0 = scaled_expansion_coeff(c, 0) / static_cast<double>(proj[0]);
      const double k1 = scaled_expansion_coeff(c, 1) / static_cast<double>(proj[1]);
      EXPECT_NEAR(k0, k1, 1e-12 * k0);
      EXPECT_NEAR(k0, 4 * std::numbers::pi, 1e-12);
      for (int mu = 0; mu <= 20; ++mu) {
        const double ref = k0 * static_cast<double>(proj[static_cast<std::size_t>(mu)]);
        EXPECT_NEAR(scaled_expansion_coeff(c, mu), ref, 1e-10 * std::abs(ref))
            << kernel_name(k) << " eps=" << eps << " mu=" << mu;
      }
    }
}

TEST(ExpansionCoeff, ScalarMercerSum) {
  const auto xs = oracle::random_unit_vectors(20, 32);
  const auto ys = oracle::random_unit_vectors(20, 33);
  for (const auto k : kAll)
    for (const double eps : {0.5, 1.0, 2.0}) {
      const KernelConfig c(k, eps);
      const int mu = expansion::degree_for(c, 1e-18);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const SpherePoint x(xs[i]), y(ys[i]);
        const double exact = phi(c, (xs[i] - ys[i]).norm());
        // GA at eps=2 sums O(0.1) terms down to ~1e-7, so allow a few ulps of phi(0) = 1.
        EXPECT_NEAR(expansion::scalar_kernel(c, x, y, mu), exact, 1e-10 * std::abs(exact) + 1e-15)
            << kernel_name(k) << " eps=" << eps;
      }
    }
}

TEST(ExpansionCoeff, SignsAndFiniteness) {
  // The multiquadric's coefficients are negative for mu >= 1; every kernel's
  // definiteness_sign makes them positive.
  for (const auto k : kAll)
    for (const double eps : {1e-10, 1e-4, 0.1, 1.0, 3.0, 10.0}) {
      const KernelConfig c(k, eps);
      for (int mu = 0; mu <= 300; ++mu) {
        const double v = log_abs_expansion_coeff(c, mu);
        ASSERT_TRUE(std::isfinite(v)) << kernel_name(k) << " " << eps << " " << mu;
        if (mu >= 1) EXPECT_GT(definiteness_sign(k) * expansion_coeff_sign(k, mu), 0);
      }
      EXPECT_GT(expansion_coeff(c, 0), 0.0);
    }
  EXPECT_LT(expansion_coeff({KernelKind::MQ, 1.0}, 1), 0.0);
}

TEST(ExpansionCoeff, IqSeriesCap) {
  EXPECT_THROW(expansion_coeff({KernelKind::IQ, 1e4}, 3), Error);
  try {
    expansion_coeff({KernelKind::IQ, 1e4}, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeriesNonconvergence);
  }
}

TEST(CoefficientTable, ScaledMatchesValues) {
  for (const auto k : kAll) {
    const KernelConfig c(k, 0.7);
    const CoefficientTable t(c, 40);
    ASSERT_EQ(t.mu_max(), 40);
    for (int mu = 0; mu <= 40; ++mu)
      EXPECT_NEAR(t.scaled(mu), t.value(mu) * std::pow(0.7, 2 * mu), 4e-16 * std::abs(t.scaled(mu)));
  }
}

TEST(TruncationPlan, LeadingDegree) {
  EXPECT_EQ(leading_degree(924), 42);
  EXPECT_EQ(leading_degree(4), 2);
  EXPECT_EQ(leading_degree(5), 3);
  for (std::size_t n = 1; n < 2000; n += 37)
    EXPECT_EQ(leading_degree(n), static_cast<int>(std::ceil(std::sqrt(2.0 * n + 1.0) - 1.0 - 1e-12)));
}

TEST(TruncationPlan, GlobalMaxRuleFlatLimit) {
  TruncationOptions o;
  o.rule = TruncationRule::GlobalMax;
  const auto plan = build_truncation_plan({KernelKind::GA, 1e-6}, 4, o);
  EXPECT_EQ(plan.mu0, 2);
  EXPECT_EQ(plan.mu_trunc, 2);
  EXPECT_EQ(plan.m, 8u);
}

TEST(TruncationPlan, LeadingBlockRule) {
  // Tail measured against the degree-mu0 term: one extra degree at eps=1e-6.
  const auto plan = build_truncation_plan({KernelKind::GA, 1e-6}, 4);
  EXPECT_EQ(plan.mu_trunc, 3);
  // At moderate eps the tail keeps degrees beyond mu0 even for large n.
  const auto big = build_truncation_plan({KernelKind::MQ, 1.0}, 924);
  EXPECT_EQ(big.mu0, 42);
  EXPECT_GT(big.mu_trunc, big.mu0);
  EXPECT_EQ(big.m, vector_harmonic_count(big.mu_trunc));
  EXPECT_GE(big.m, 2u * 924u);
}

TEST(TruncationPlan, Invariants) {
  for (const auto k : kAll)
    for (const double eps : {1e-10, 1e-3, 0.3, 2.0})
      for (const std::size_t n : {1u, 4u, 5u, 60u, 240u}) {
        const auto p = build_truncation_plan({k, eps}, n);
        EXPECT_EQ(p.mu_trunc, std::max(p.mu0, p.mu_eps));
        EXPECT_EQ(p.m, vector_harmonic_count(p.mu_trunc));
        EXPECT_GE(p.m, 2 * n);
        ASSERT_EQ(p.degree_of_column.size(), p.m);
        EXPECT_TRUE(std::is_sorted(p.degree_of_column.begin(), p.degree_of_column.end()));
      }
}

TEST(TruncationPlan, Errors) {
  TruncationOptions o;
  o.mu_max = 20;
  EXPECT_THROW(build_truncation_plan({KernelKind::MQ, 5.0}, 4, o), Error);
  o.tol = 1e-6;
  EXPECT_THROW(build_truncation_plan({KernelKind::MQ, 1.0}, 4, o), Error);
  EXPECT_THROW(build_truncation_plan({KernelKind::MQ, 1.0}, 0), Error);
}
