#ifndef VIDDE_INTEGRATOR_HPP
#define VIDDE_INTEGRATOR_HPP

#include <string>

#include "vidde/analysis.hpp"
#include "vidde/dde.hpp"
#include "vidde/model.hpp"

namespace vidde {

struct IntegrationConfig {
  double dt = 0.01;
  double t_end = 1000.0;
  double kernel_truncation_eps = 1e-8;  // tail bound used when discretizing infinite-support kernels
  Interpolation interpolation = Interpolation::CubicHermite;
};

/// Blow-up threshold on any state component.
inline constexpr double kBlowUpThreshold = 1e12;

/// The two delay kernels of the model, f1 (infection) and f2 (virion production).
struct KernelPair {
  DelayKernel infection;
  DelayKernel production;
};

/// Dense solution on a uniform grid together with its history, so that the
/// state is available at every t <= t_end.
class Trajectory {
 public:
  Trajectory(UniformDenseOutput<5> dense, InitialHistory history, IntegrationConfig config,
             std::string fingerprint = {}, double truncated_mass = 0.0);

  /// Builds a trajectory from externally produced samples (t_i = i dt).
  static Trajectory from_samples(double dt, const std::vector<State>& states, const std::vector<State>& derivatives,
                                 InitialHistory history, Interpolation interpolation = Interpolation::CubicHermite);

  std::size_t size() const { return dense_.size(); }
  double dt() const { return dense_.dt(); }
  double t_end() const { return dense_.t_end(); }
  double time(std::size_t i) const { return dense_.time(i); }
  const State& state(std::size_t i) const { return dense_.state(i); }
  const State& derivative(std::size_t i) const { return dense_.derivative(i); }
  const std::vector<State>& states() const { return dense_.states(); }

  /// History for t < 0, interpolated solution on [0, t_end].
  State at(double t) const {
    if (t < 0.0) return history_.at(t);
    return dense_.at(t);
  }
  State operator()(double t) const { return at(t); }

  const UniformDenseOutput<5>& dense() const { return dense_; }
  const InitialHistory& history() const { return history_; }
  const IntegrationConfig& config() const { return config_; }
  const std::string& parameter_fingerprint() const { return fingerprint_; }
  double truncated_mass() const { return truncated_mass_; }

 private:
  UniformDenseOutput<5> dense_;
  InitialHistory history_;
  IntegrationConfig config_;
  std::string fingerprint_;
  double truncated_mass_ = 0.0;
};

/// Quantity integrated against a delay kernel.
enum class Delayed { XV, XC, Y, X, Infection };

inline double delayed_quantity(const ModelParameters& p, const State& s, Delayed q) {
  switch (q) {
    case Delayed::XV: return s[kX] * s[kV];
    case Delayed::XC: return s[kX] * s[kC];
    case Delayed::Y: return s[kY];
    case Delayed::X: return s[kX];
    case Delayed::Infection: return infection_integrand(p, s);
  }
  return 0.0;
}

/// sum_j w_j e^{-m s_j} phi(t - s_j). A zero-length delay uses `current`
/// directly, so Dirac(0) reduces to the instantaneous term.
template <typename Past>
double delayed_term(const ModelParameters& p, const DelayKernel& kernel, double m, const Past& past, double t,
                    const State& current, Delayed q) {
  double sum = 0.0;
  const auto nodes = kernel.nodes();
  const auto weights = kernel.weights();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double s = nodes[j];
    const State value = s == 0.0 ? current : State(past(t - s));
    sum += weights[j] * std::exp(-m * s) * delayed_quantity(p, value, q);
  }
  return sum;
}

/// Completed-trajectory form: the current state is the trajectory value at t.
double delayed_term(const ModelParameters& p, const DelayKernel& kernel, double m, const Trajectory& traj, double t,
                    Delayed q);

/// Right-hand side of the delayed model. Throws NonFiniteState when the input
/// or the result has a non-finite component.
template <typename Past>
State rhs(const ModelParameters& p, const KernelPair& kernels, const Past& past, double t, const State& current) {
  if (!all_finite(current)) throw Error(ErrorKind::NonFiniteState, "non-finite state at t = " + std::to_string(t));
  const double infection = delayed_term(p, kernels.infection, p.m1, past, t, current, Delayed::Infection);
  const double production = delayed_term(p, kernels.production, p.m2, past, t, current, Delayed::Y);
  State out = vector_field(p, current, infection, production);
  if (!all_finite(out)) throw Error(ErrorKind::NonFiniteState, "non-finite derivative at t = " + std::to_string(t));
  return out;
}

/// RK4 method-of-steps integration over [0, config.t_end]. Bitwise
/// deterministic for identical inputs.
Trajectory integrate(const ModelParameters& p, const KernelPair& kernels, const InitialHistory& history,
                     const IntegrationConfig& config);

/// Dense interpolation on [0, t_end]; OutOfRange elsewhere.
State interpolate(const Trajectory& traj, double t);

}  // namespace vidde

#endif  // VIDDE_INTEGRATOR_HPP
