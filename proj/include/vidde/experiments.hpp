#ifndef VIDDE_EXPERIMENTS_HPP
#define VIDDE_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vidde/analysis.hpp"
#include "vidde/integrator.hpp"

namespace vidde {

/// One row of the published parameter table with its initial values and
/// delay pairs.
struct Scenario {
  std::string name;
  ModelParameters params;
  std::vector<State> histories;                   // constant initial values Phi_1..Phi_3
  std::vector<std::pair<double, double>> lag_pairs;  // (tau1', tau2')
  double default_t_end = 0.0;
};

/// "E0", "E1" or "E2"; UnknownScenario otherwise.
const Scenario& scenario(std::string_view name);

KernelPair dirac_kernels(double tau1, double tau2);

enum class Attractor { E0, E1, E2, NotConverged, Boundary };
std::string_view to_string(Attractor a);

inline constexpr double kConvergenceTol = 1e-3;
inline constexpr double kTrailingWindow = 0.1;

/// Distance of the trailing part of a trajectory to each equilibrium.
struct Classification {
  Attractor attractor = Attractor::NotConverged;
  double distance = 0.0;     // sup-norm to the selected equilibrium (or the nearest one)
  double oscillation = 0.0;  // max over components of (max - min) on the window
};

/// The equilibrium within `tol` (sup-norm) of every node in the trailing
/// `window` fraction of the horizon. NotConverged if the window still moves by
/// more than `tol`, or no equilibrium is close enough.
Classification classify(const Trajectory& traj, const EquilibriumSet& eqs, double window = kTrailingWindow,
                        double tol = kConvergenceTol);

/// Predicted attractor from a pair of thresholds; Boundary within 1e-9 of 1.
Attractor predict_regime(double r0, double r1);

struct RegimeCell {
  double tau1 = 0.0, tau2 = 0.0;
  ReproductionNumbers derivation, paper;
  Attractor predicted = Attractor::Boundary;        // from the derivation-mode thresholds
  Attractor predicted_paper = Attractor::Boundary;  // from the printed formulas
  std::optional<Attractor> observed;
  std::string error;  // integration failure for this cell, if any
};

struct SweepOptions {
  bool simulate = false;
  State history = State::Constant(1.0);
  IntegrationConfig integration;
  unsigned threads = 0;  // 0 selects hardware concurrency
};

/// Row-major over (tau1, tau2). Cells are independent and run concurrently;
/// an integration failure is recorded in the cell, not propagated.
std::vector<RegimeCell> sweep(const ModelParameters& params, const std::vector<double>& tau1_grid,
                              const std::vector<double>& tau2_grid, const SweepOptions& options);

/// Inclusive grid lo, lo + step, ..., hi.
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace vidde

#endif  // VIDDE_EXPERIMENTS_HPP
