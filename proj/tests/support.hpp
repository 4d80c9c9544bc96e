#ifndef VIDDE_TESTS_SUPPORT_HPP
#define VIDDE_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include "vidde/analysis.hpp"
#include "vidde/experiments.hpp"
#include "vidde/integrator.hpp"

namespace vidde::testing {

// Log-uniform on [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline ModelParameters random_parameters(std::mt19937_64& rng, double lo = 0.01, double hi = 10.0) {
  ModelParameters p;
  for (const auto& [name, member] : parameter_fields<double>()) p.*member = log_uniform(rng, lo, hi);
  return p;
}

inline KernelPair random_dirac_kernels(std::mt19937_64& rng, double max_tau = 10.0) {
  std::uniform_real_distribution<double> u(0.0, max_tau);
  return dirac_kernels(u(rng), u(rng));
}

// Draws until the derivation-mode regime equals `target` (E0, E1 or E2).
struct Draw {
  ModelParameters params;
  KernelPair kernels;
  SurvivalFactors factors;
};

inline Draw draw_in_regime(std::mt19937_64& rng, Attractor target) {
  for (;;) {
    Draw d{random_parameters(rng), random_dirac_kernels(rng), {}};
    d.factors = survival_factors(d.params, d.kernels.infection, d.kernels.production);
    const auto rn = reproduction_numbers(d.params, d.factors, R0Mode::Derivation);
    if (predict_regime(rn.r0, rn.r1) == target) return d;
  }
}

// A trajectory that sits at `point` on [0, t_end] with the same constant history.
inline Trajectory constant_trajectory(const State& point, double dt, std::size_t steps) {
  std::vector<State> states(steps + 1, point), derivatives(steps + 1, State::Zero());
  return Trajectory::from_samples(dt, states, derivatives, InitialHistory::constant(point));
}

inline State state(double x, double y, double c, double v, double z) {
  State s;
  s << x, y, c, v, z;
  return s;
}

}  // namespace vidde::testing

#endif  // VIDDE_TESTS_SUPPORT_HPP
