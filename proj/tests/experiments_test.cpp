#include <gtest/gtest.h>

#include "support.hpp"
#include "vidde/experiments.hpp"

namespace vidde {
namespace {

TEST(Registry, ScenarioRows) {
  for (const char* name : {"E0", "E1", "E2"}) {
    const auto& sc = scenario(name);
    EXPECT_EQ(sc.name, name);
    EXPECT_EQ(sc.histories.size(), 3u);
    EXPECT_EQ(sc.lag_pairs.size(), 3u);
    EXPECT_NO_THROW(validate_parameters(to_field_map(sc.params)));
  }
  EXPECT_EQ(scenario("E2").params.c_ctl, 0.03);
  EXPECT_EQ(scenario("E1").params.c_ctl, 0.003);
  EXPECT_EQ(scenario("E0").params.lambda, 1.0);
  EXPECT_EQ(scenario("E2").lag_pairs[0], std::make_pair(5.0, 4.0));
  try {
    scenario("E3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownScenario);
  }
}

TEST(Regime, Prediction) {
  EXPECT_EQ(predict_regime(0.5, -3.0), Attractor::E0);
  EXPECT_EQ(predict_regime(2.0, 0.5), Attractor::E1);
  EXPECT_EQ(predict_regime(2.0, 1.5), Attractor::E2);
  EXPECT_EQ(predict_regime(1.0, 0.0), Attractor::Boundary);
  EXPECT_EQ(predict_regime(2.0, 1.0 + 1e-12), Attractor::Boundary);
}

TEST(Classify, ConstantTrajectories) {
  const auto& sc = scenario("E2");
  const auto k = dirac_kernels(5, 4);
  const auto eqs = equilibria(sc.params, survival_factors(sc.params, k.infection, k.production));
  EXPECT_EQ(classify(testing::constant_trajectory(*eqs.e2, 0.1, 100), eqs).attractor, Attractor::E2);
  EXPECT_EQ(classify(testing::constant_trajectory(*eqs.e1, 0.1, 100), eqs).attractor, Attractor::E1);
  EXPECT_EQ(classify(testing::constant_trajectory(eqs.e0, 0.1, 100), eqs).attractor, Attractor::E0);
  const auto off = classify(testing::constant_trajectory(*eqs.e2 + State::Constant(0.01), 0.1, 100), eqs);
  EXPECT_EQ(off.attractor, Attractor::NotConverged);
  EXPECT_NEAR(off.distance, 0.01, 1e-12);
}

TEST(Classify, MovingWindowIsNotConverged) {
  const auto& sc = scenario("E2");
  const auto k = dirac_kernels(5, 4);
  const auto eqs = equilibria(sc.params, survival_factors(sc.params, k.infection, k.production));
  IntegrationConfig cfg;
  cfg.t_end = 20.0;
  const auto traj = integrate(sc.params, k, InitialHistory::constant(sc.histories[0]), cfg);
  const auto c = classify(traj, eqs);
  EXPECT_EQ(c.attractor, Attractor::NotConverged);
  EXPECT_GT(c.oscillation, 1e-3);
}

TEST(Grid, Inclusive) {
  EXPECT_EQ(make_grid(0.0, 1.0, 0.25), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(make_grid(2.0, 2.0, 1.0), (std::vector<double>{2.0}));
  EXPECT_EQ(make_grid(0.0, 0.3, 0.1).size(), 4u);
  EXPECT_THROW(make_grid(1.0, 0.0, 0.1), Error);
  EXPECT_THROW(make_grid(0.0, 1.0, 0.0), Error);
}

TEST(Sweep, PredictionsMatchThresholds) {
  const auto& sc = scenario("E1");
  const auto cells = sweep(sc.params, make_grid(0, 10, 2.5), make_grid(0, 8, 4), SweepOptions{});
  ASSERT_EQ(cells.size(), 15u);
  EXPECT_EQ(cells[0].tau1, 0.0);
  EXPECT_EQ(cells[1].tau2, 4.0);
  for (const auto& c : cells) {
    const auto k = dirac_kernels(c.tau1, c.tau2);
    const auto f = survival_factors(sc.params, k.infection, k.production);
    const auto rn = reproduction_numbers(sc.params, f, R0Mode::Derivation);
    EXPECT_EQ(c.derivation.r0, rn.r0);
    EXPECT_EQ(c.predicted, predict_regime(rn.r0, rn.r1));
    EXPECT_EQ(c.predicted_paper, predict_regime(c.paper.r0, c.paper.r1));
    EXPECT_FALSE(c.observed);
  }
}

TEST(Sweep, SimulatedCellsAgreeWithPrediction) {
  const auto& sc = scenario("E0");
  SweepOptions options;
  options.simulate = true;
  options.history = sc.histories[0];
  options.integration.t_end = 1000.0;
  options.integration.dt = 0.02;
  options.threads = 2;
  const auto cells = sweep(sc.params, {1.0, 4.0}, {2.0}, options);
  for (const auto& c : cells) {
    ASSERT_TRUE(c.observed) << c.error;
    EXPECT_EQ(*c.observed, c.predicted);
  }
}

TEST(Sweep, SerialAndParallelAgree) {
  const auto& sc = scenario("E2");
  SweepOptions a;
  a.simulate = true;
  a.history = sc.histories[1];
  a.integration.t_end = 5.0;
  a.threads = 1;
  SweepOptions b = a;
  b.threads = 3;
  const auto x = sweep(sc.params, {1.0, 2.0, 3.0}, {1.0, 4.0}, a);
  const auto y = sweep(sc.params, {1.0, 2.0, 3.0}, {1.0, 4.0}, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].tau1, y[i].tau1);
    EXPECT_EQ(x[i].observed, y[i].observed);
  }
}

}  // namespace
}  // namespace vidde
