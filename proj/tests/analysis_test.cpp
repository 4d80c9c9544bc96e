#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vidde/analysis.hpp"

namespace vidde {
namespace {

struct Case {
  const char* name;
  double tau1, tau2;
};

ReproductionNumbers numbers(const Case& c, R0Mode mode) {
  const auto& sc = scenario(c.name);
  const auto k = dirac_kernels(c.tau1, c.tau2);
  return reproduction_numbers(sc.params, survival_factors(sc.params, k.infection, k.production), mode);
}

EquilibriumSet equilibria_of(const Case& c) {
  const auto& sc = scenario(c.name);
  const auto k = dirac_kernels(c.tau1, c.tau2);
  return equilibria(sc.params, survival_factors(sc.params, k.infection, k.production));
}

TEST(SurvivalFactor, DiracIsExponential) {
  EXPECT_DOUBLE_EQ(survival_factor(DelayKernel::dirac(5.0), 0.3), std::exp(-1.5));
  EXPECT_DOUBLE_EQ(survival_factor(DelayKernel::dirac(0.0), 0.3), 1.0);
}

TEST(SurvivalFactor, TabulatedWeightedSum) {
  const auto k = DelayKernel::tabulated({1.0, 2.0, 4.0}, {0.2, 0.3, 0.4}, 0.1);
  const double expected = 0.2 * std::exp(-0.5) + 0.3 * std::exp(-1.0) + 0.4 * std::exp(-2.0);
  EXPECT_NEAR(survival_factor(k, 0.5), expected, 1e-15);
}

// Printed values for the CTL-inactive and CTL-active rows.
TEST(ReproductionNumbers, PrintedModeMatchesPublishedValues) {
  const auto e1 = numbers({"E1", 5, 3}, R0Mode::PaperPrinted);
  EXPECT_NEAR(e1.r0, 2.2648, 5e-4);
  EXPECT_NEAR(e1.r1, 0.7121, 5e-4);
  const auto e2 = numbers({"E2", 5, 4}, R0Mode::PaperPrinted);
  EXPECT_NEAR(e2.r0, 1.7274, 5e-4);
  EXPECT_NEAR(e2.r1, 5.3690, 5e-4);
}

// Extended-precision oracle, 40 digits.
TEST(ReproductionNumbers, OracleValues) {
  EXPECT_NEAR(numbers({"E1", 5, 3}, R0Mode::PaperPrinted).r0, 2.264807641028083, 1e-13);
  EXPECT_NEAR(numbers({"E1", 5, 3}, R0Mode::PaperPrinted).r1, 0.7120547493420927, 1e-13);
  EXPECT_NEAR(numbers({"E1", 5, 3}, R0Mode::Derivation).r0, 9.059230564112331, 1e-12);
  EXPECT_NEAR(numbers({"E1", 5, 3}, R0Mode::Derivation).r1, 4.537143209029461, 1e-12);
  EXPECT_NEAR(numbers({"E2", 5, 4}, R0Mode::Derivation).r0, 6.9095217138574522, 1e-12);
  EXPECT_NEAR(numbers({"E2", 5, 4}, R0Mode::Derivation).r1, 43.619890051363988, 1e-11);
  EXPECT_NEAR(numbers({"E2", 5, 4}, R0Mode::PaperPrinted).r0, 1.727380428464363, 1e-13);
  EXPECT_NEAR(numbers({"E0", 5, 3}, R0Mode::Derivation).r0, 0.17225940487630942, 1e-14);
}

TEST(ReproductionNumbers, InfectionFreeRowBelowOneInBothModes) {
  for (auto [t1, t2] : scenario("E0").lag_pairs) {
    EXPECT_LT(numbers({"E0", t1, t2}, R0Mode::Derivation).r0, 1.0);
    EXPECT_LT(numbers({"E0", t1, t2}, R0Mode::PaperPrinted).r0, 1.0);
  }
}

TEST(Equilibria, CtlInactiveOracle) {
  const auto eqs = equilibria_of({"E1", 5, 3});
  ASSERT_TRUE(eqs.e1);
  const State expected = testing::state(11.038465054211644, 11.342858022573653, 27.222859254176768,
                                        368.9329541378956, 0.0);
  EXPECT_LT((*eqs.e1 - expected).cwiseAbs().maxCoeff(), 1e-12 * 368.93);
  EXPECT_TRUE(eqs.residuals_ok);
}

TEST(Equilibria, CtlActiveOracle) {
  const auto eqs = equilibria_of({"E2", 5, 4});
  ASSERT_TRUE(eqs.e1);
  ASSERT_TRUE(eqs.e2);
  const State e1 = testing::state(14.472781784511093, 10.904972512840997, 26.171934030818392,
                                  262.76116815434962, 0.0);
  const State e2 = testing::state(15.450155202805454, 10.098391665367459, 24.2361399968819,
                                  243.32616953848814, 1.181806999844095);
  EXPECT_LT((*eqs.e1 - e1).cwiseAbs().maxCoeff(), 1e-12 * 262.8);
  EXPECT_LT((*eqs.e2 - e2).cwiseAbs().maxCoeff(), 1e-12 * 243.4);
  EXPECT_TRUE(eqs.residuals_ok);
}

TEST(Equilibria, InfectionFreeOnly) {
  const auto eqs = equilibria_of({"E0", 5, 3});
  EXPECT_EQ(eqs.e0, testing::state(5, 0, 0, 0, 0));
  EXPECT_FALSE(eqs.e1);
  EXPECT_FALSE(eqs.e2);
  EXPECT_TRUE(std::isnan(eqs.delta));
}

TEST(Equilibria, ExtendedPrecisionAgrees) {
  const auto& sc = scenario("E2");
  const auto k = dirac_kernels(5, 4);
  const auto f = survival_factors(sc.params, k.infection, k.production);
  const auto wide = equilibria(sc.params.cast<long double>(), f.cast<long double>());
  const auto narrow = equilibria(sc.params, f);
  ASSERT_TRUE(wide.e2 && narrow.e2);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(static_cast<double>((*wide.e2)[i]), (*narrow.e2)[i], 1e-12 * 250);
}

TEST(Z2Quadratic, PositiveRootIsZ2) {
  const auto& sc = scenario("E2");
  const auto k = dirac_kernels(5, 4);
  const auto f = survival_factors(sc.params, k.infection, k.production);
  const auto [a, b, c] = z2_quadratic(sc.params, f);
  const double z2 = (*equilibria(sc.params, f).e2)[kZ];
  EXPECT_NEAR(a * z2 * z2 + b * z2 - c, 0.0, 1e-12 * std::abs(c));
  EXPECT_GT(z2, 0.0);
}

class RandomParameters : public ::testing::TestWithParam<Attractor> {};

// Existence, thresholds and residuals over random parameter sets.
TEST_P(RandomParameters, Invariants) {
  std::mt19937_64 rng(7 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testing::draw_in_regime(rng, GetParam());
    const auto der = reproduction_numbers(d.params, d.factors, R0Mode::Derivation);
    const auto pap = reproduction_numbers(d.params, d.factors, R0Mode::PaperPrinted);
    EXPECT_NEAR(pap.r0, der.r0 * d.params.d4, 1e-12 * pap.r0);
    EXPECT_EQ(der.r1 > 0.0, der.r0 > 1.0);

    const auto eqs = equilibria(d.params, d.factors);
    EXPECT_TRUE(eqs.residuals_ok) << "trial " << trial;
    EXPECT_EQ(eqs.e1.has_value(), der.r0 > 1.0);
    EXPECT_EQ(eqs.e2.has_value(), der.r1 > 1.0);
    EXPECT_TRUE(residual_within_tolerance(eqs.e0, eqs.residual_e0));
    if (eqs.e1) {
      EXPECT_TRUE(residual_within_tolerance(*eqs.e1, eqs.residual_e1));
      EXPECT_GT((*eqs.e1).head<4>().minCoeff(), 0.0);
      EXPECT_EQ((*eqs.e1)[kZ], 0.0);
    }
    if (eqs.e2) {
      EXPECT_TRUE(residual_within_tolerance(*eqs.e2, eqs.residual_e2));
      EXPECT_GT((*eqs.e2).minCoeff(), 0.0);
      EXPECT_GE(eqs.delta, 0.0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, RandomParameters,
                         ::testing::Values(Attractor::E0, Attractor::E1, Attractor::E2),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace vidde
