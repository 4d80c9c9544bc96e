#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vidde/certificates.hpp"

namespace vidde {
namespace {

struct Run {
  const Scenario* sc;
  KernelPair kernels;
  SurvivalFactors f;
  EquilibriumSet eqs;
  Trajectory traj;
};

Run simulate(const char* name, std::size_t phi, double tau1, double tau2, double t_end) {
  const auto& sc = scenario(name);
  auto kernels = dirac_kernels(tau1, tau2);
  const auto f = survival_factors(sc.params, kernels.infection, kernels.production);
  IntegrationConfig cfg;
  cfg.t_end = t_end;
  auto traj = integrate(sc.params, kernels, InitialHistory::constant(sc.histories[phi]), cfg);
  return Run{&sc, kernels, f, equilibria(sc.params, f), std::move(traj)};
}

TEST(G, Values) {
  EXPECT_EQ(g(1.0), 0.0);
  EXPECT_NEAR(g(std::exp(1.0)), std::exp(1.0) - 2.0, 1e-15);
  EXPECT_NEAR(g(0.5), std::log(2.0) - 0.5, 1e-15);
  EXPECT_THROW(g(0.0), Error);
  EXPECT_THROW(g(-1.0), Error);
}

TEST(G, NonnegativeWithUniqueZero) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double s = testing::log_uniform(rng, 1e-6, 1e6);
    EXPECT_GE(g(s), 0.0);
  }
  EXPECT_GT(g(1.0 + 1e-4), 0.0);
  EXPECT_GT(g(1.0 - 1e-4), 0.0);
}

TEST(Cone, BoundaryStatesPointInward) {
  const auto& sc = scenario("E2");
  const auto kernels = dirac_kernels(5, 4);
  const auto history = InitialHistory::constant(testing::state(1, 2, 3, 4, 5));
  for (int k = 0; k < 5; ++k) {
    State s = testing::state(2, 3, 4, 5, 6);
    s[k] = 0.0;
    const auto report = check_cone_invariance(sc.params, kernels, s, history);
    EXPECT_TRUE(report.passed) << k;
  }
  try {
    check_cone_invariance(sc.params, kernels, State::Ones(), history);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotOnBoundary);
  }
}

TEST(Cone, SampledBoundaryStates) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = testing::random_parameters(rng);
    const auto report = check_cone_sampled(p, testing::random_dirac_kernels(rng), 200, 1000 + trial);
    EXPECT_TRUE(report.passed) << report.notes;
  }
}

TEST(Boundedness, HoldsAlongRun) {
  const auto run = simulate("E2", 0, 5, 4, 100);
  const auto report = check_boundedness(run.sc->params, run.f, run.kernels, run.traj);
  EXPECT_TRUE(report.passed) << report.worst_violation;
}

// The same trajectory measured against a tenfold smaller inflow must violate the envelope.
TEST(Boundedness, DetectsScaledViolation) {
  const auto run = simulate("E2", 0, 5, 4, 100);
  auto scaled = run.sc->params;
  scaled.lambda /= 10.0;
  const auto report = check_boundedness(scaled, run.f, run.kernels, run.traj);
  EXPECT_FALSE(report.passed);
  EXPECT_GT(report.worst_violation, 1.0);
}

TEST(Boundedness, FunctionalAtZero) {
  const auto run = simulate("E0", 0, 5, 3, 10);
  const State phi = run.sc->histories[0];
  EXPECT_NEAR(boundedness_functional(run.sc->params, run.kernels, run.traj, 0.0), run.f.a1 * phi[kX] + phi[kY],
              1e-14);
}

TEST(Lyapunov, VanishesAtEquilibria) {
  const auto& sc = scenario("E2");
  const auto kernels = dirac_kernels(5, 4);
  const auto f = survival_factors(sc.params, kernels.infection, kernels.production);
  const auto eqs = equilibria(sc.params, f);
  const auto at_e1 = testing::constant_trajectory(*eqs.e1, 0.01, 1000);
  const auto at_e2 = testing::constant_trajectory(*eqs.e2, 0.01, 1000);
  EXPECT_NEAR(lyapunov_L1(sc.params, f, kernels, at_e1, 8.0, *eqs.e1).value, 0.0, 1e-9);
  EXPECT_NEAR(lyapunov_L2(sc.params, f, kernels, at_e2, 8.0, *eqs.e2).value, 0.0, 1e-9);

  const auto& s0 = scenario("E0");
  const auto f0 = survival_factors(s0.params, kernels.infection, kernels.production);
  const auto at_e0 = testing::constant_trajectory(testing::state(5, 0, 0, 0, 0), 0.01, 1000);
  EXPECT_NEAR(lyapunov_L0(s0.params, f0, kernels, at_e0, 8.0).value, 0.0, 1e-12);
}

TEST(Lyapunov, PositiveAwayFromEquilibrium) {
  const auto& sc = scenario("E2");
  const auto kernels = dirac_kernels(5, 4);
  const auto f = survival_factors(sc.params, kernels.infection, kernels.production);
  const auto eqs = equilibria(sc.params, f);
  const State off = *eqs.e2 + testing::state(1, -1, 2, 10, 0.1);
  const auto traj = testing::constant_trajectory(off, 0.01, 1000);
  const auto value = lyapunov_L2(sc.params, f, kernels, traj, 8.0, *eqs.e2);
  EXPECT_GT(value.value, 0.0);
  double total = 0.0;
  for (const auto& [name, part] : value.components) total += part;
  EXPECT_NEAR(total, value.value, 1e-12 * std::abs(value.value));
}

TEST(Lyapunov, NotEvaluableOffTheOpenCone) {
  const auto& sc = scenario("E2");
  const auto kernels = dirac_kernels(5, 4);
  const auto f = survival_factors(sc.params, kernels.infection, kernels.production);
  const auto eqs = equilibria(sc.params, f);
  const auto traj = testing::constant_trajectory(testing::state(1, 0, 1, 1, 1), 0.01, 1000);
  try {
    lyapunov_L2(sc.params, f, kernels, traj, 8.0, *eqs.e2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEvaluable);
  }
}

class SeriesMatchesSingleTime : public ::testing::TestWithParam<const char*> {};

TEST_P(SeriesMatchesSingleTime, AtSampledNodes) {
  const std::string name = GetParam();
  const auto run = simulate(name.c_str(), 1, 5, 2, 60);
  const auto kind = *lyapunov_for_regime(run.eqs);
  const auto series = lyapunov_series(kind, run.sc->params, run.f, run.kernels, run.traj, run.eqs, 250);
  ASSERT_GT(series.values.size(), 5u);
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double t = series.times[i];
    double single = 0.0;
    switch (kind) {
      case LyapunovKind::L0: single = lyapunov_L0(run.sc->params, run.f, run.kernels, run.traj, t).value; break;
      case LyapunovKind::L1: single = lyapunov_L1(run.sc->params, run.f, run.kernels, run.traj, t, *run.eqs.e1).value; break;
      case LyapunovKind::L2: single = lyapunov_L2(run.sc->params, run.f, run.kernels, run.traj, t, *run.eqs.e2).value; break;
    }
    EXPECT_NEAR(series.values[i], single, 1e-9 * std::max(1.0, std::abs(single))) << "t = " << t;
  }
}

INSTANTIATE_TEST_SUITE_P(Scenarios, SeriesMatchesSingleTime, ::testing::Values("E0", "E2"));

TEST(Monotone, DecreasingPassesIncreasingFails) {
  const std::vector<double> t{0, 1, 2, 3};
  EXPECT_TRUE(check_monotone_decrease(t, {4, 3, 3, 1}).passed);
  const auto bad = check_monotone_decrease(t, {4, 3, 3.5, 1});
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.worst_time, 2.0);
  EXPECT_NEAR(bad.worst_violation, 0.5, 1e-15);
}

TEST(Monotone, DecreasesAlongInfectionFreeRun) {
  const auto run = simulate("E0", 0, 5, 3, 200);
  const auto series = lyapunov_series(LyapunovKind::L0, run.sc->params, run.f, run.kernels, run.traj, run.eqs);
  EXPECT_EQ(series.not_evaluable, 0u);
  EXPECT_TRUE(check_monotone_decrease(series.times, series.values).passed);
}

TEST(Regime, FunctionalSelection) {
  EquilibriumSet eqs;
  eqs.r0 = 0.5;
  EXPECT_EQ(lyapunov_for_regime(eqs), LyapunovKind::L0);
  eqs.r0 = 2.0;
  eqs.r1 = 0.5;
  EXPECT_EQ(lyapunov_for_regime(eqs), LyapunovKind::L1);
  eqs.r1 = 3.0;
  EXPECT_EQ(lyapunov_for_regime(eqs), LyapunovKind::L2);
  eqs.r0 = 1.0;
  EXPECT_FALSE(lyapunov_for_regime(eqs));
}

}  // namespace
}  // namespace vidde
