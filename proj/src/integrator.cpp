#include "vidde/integrator.hpp"

namespace vidde {

Trajectory::Trajectory(UniformDenseOutput<5> dense, InitialHistory history, IntegrationConfig config,
                       std::string fingerprint, double truncated_mass)
    : dense_(std::move(dense)),
      history_(std::move(history)),
      config_(config),
      fingerprint_(std::move(fingerprint)),
      truncated_mass_(truncated_mass) {
  if (dense_.empty()) throw Error(ErrorKind::ConfigError, "trajectory needs at least one sample");
}

Trajectory Trajectory::from_samples(double dt, const std::vector<State>& states, const std::vector<State>& derivatives,
                                    InitialHistory history, Interpolation interpolation) {
  if (states.size() != derivatives.size() || states.empty())
    throw Error(ErrorKind::ConfigError, "samples need matching, non-empty states and derivatives");
  if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
  UniformDenseOutput<5> dense(dt, interpolation);
  dense.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) dense.push_back(states[i], derivatives[i]);
  IntegrationConfig config;
  config.dt = dt;
  config.t_end = dense.t_end();
  config.interpolation = interpolation;
  return Trajectory(std::move(dense), std::move(history), config);
}

double delayed_term(const ModelParameters& p, const DelayKernel& kernel, double m, const Trajectory& traj, double t,
                    Delayed q) {
  return delayed_term(p, kernel, m, traj, t, traj.at(t), q);
}

Trajectory integrate(const ModelParameters& p, const KernelPair& kernels, const InitialHistory& history,
                     const IntegrationConfig& config) {
  const std::size_t steps = step_count(config.dt, config.t_end);
  auto field = [&](double t, const State& y, const auto& past) { return rhs(p, kernels, past, t, y); };
  auto initial = [&](double theta) { return history.at(theta); };
  auto dense = solve_method_of_steps<5>(field, initial, config.dt, steps, config.interpolation, kBlowUpThreshold);
  return Trajectory(std::move(dense), history, config, parameter_fingerprint(p),
                    kernels.infection.tail_mass() + kernels.production.tail_mass());
}

State interpolate(const Trajectory& traj, double t) {
  if (t < 0.0 || t > traj.t_end() * (1.0 + 1e-12))
    throw Error(ErrorKind::OutOfRange, "interpolation outside [0, t_end]");
  return traj.dense().at(std::min(t, traj.t_end()));
}

}  // namespace vidde
