#ifndef VIDDE_CERTIFICATES_HPP
#define VIDDE_CERTIFICATES_HPP

// Runtime checks of the model's qualitative guarantees along computed
// trajectories: boundary behavior of the nonnegative cone, the boundedness
// envelope, and monotone decrease of the Lyapunov functionals.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vidde/analysis.hpp"
#include "vidde/integrator.hpp"

namespace vidde {

struct CertificateReport {
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;
  double worst_time = 0.0;
  double tolerance = 0.0;
  std::string notes;
};

/// Sets `passed` from worst_violation <= tolerance.
CertificateReport finalize(CertificateReport report);

/// g(s) = s - 1 - ln s, for s > 0.
double g(double s);

enum class LyapunovKind { L0, L1, L2 };
std::string_view to_string(LyapunovKind kind);

struct LyapunovValue {
  double t = 0.0;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

/// Evaluates rhs at a state on the cone boundary, with the nonnegative
/// history as past, and requires every derivative component whose state
/// component is zero to be >= 0.
CertificateReport check_cone_invariance(const ModelParameters& p, const KernelPair& kernels,
                                        const State& boundary_state, const InitialHistory& history);

/// B(t) = int e^{-m1 s} f1(s) x(t - s) ds + y(t), on the trajectory grid.
double boundedness_functional(const ModelParameters& p, const KernelPair& kernels, const Trajectory& traj,
                              double t);

/// B(t) <= lambda A1/r + (r B0 - lambda A1)/(r e^{rt}) and y(t) <= C1 at every
/// node, r = min(d1, alpha1 + d2), tolerance relative to the envelope.
CertificateReport check_boundedness(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                                    const Trajectory& traj, double rel_tol = 1e-8);

/// Single-time Lyapunov functionals. The double integrals use the kernel
/// nodes in s and the trapezoidal rule on the trajectory grid in eta.
/// NotEvaluable when a logarithm argument is not positive on the window.
LyapunovValue lyapunov_L0(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t);
LyapunovValue lyapunov_L1(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t, const State& e1);
LyapunovValue lyapunov_L2(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t, const State& e2);

/// Functional values at grid nodes 0, stride, 2 stride, ... Uses running
/// trapezoidal sums, so a whole series costs one pass over the grid. Nodes
/// where the functional is not evaluable are skipped and counted.
struct LyapunovSeries {
  LyapunovKind kind = LyapunovKind::L0;
  std::vector<std::size_t> indices;  // grid node of each value
  std::vector<double> times;
  std::vector<double> values;
  std::size_t not_evaluable = 0;
};

LyapunovSeries lyapunov_series(LyapunovKind kind, const ModelParameters& p, const SurvivalFactors& f,
                               const KernelPair& kernels, const Trajectory& traj, const EquilibriumSet& eqs,
                               std::size_t stride = 1);

/// Passes iff every forward difference is <= rel_tol * max|value|.
CertificateReport check_monotone_decrease(const std::vector<double>& times, const std::vector<double>& values,
                                          double rel_tol = 1e-6);

/// Cone check over `samples` random boundary states (random nonempty zero
/// pattern, other components and the constant history uniform on
/// [0, scale]). Deterministic for a given seed.
CertificateReport check_cone_sampled(const ModelParameters& p, const KernelPair& kernels, std::size_t samples,
                                     std::uint64_t seed = 20240601, double scale = 100.0);

/// Functional matching the derivation-mode regime: L0 when R0 < 1, L1 when
/// R1 < 1 < R0, L2 when R1 > 1. Empty when on a boundary.
std::optional<LyapunovKind> lyapunov_for_regime(const EquilibriumSet& eqs);

}  // namespace vidde

#endif  // VIDDE_CERTIFICATES_HPP
