#include "vidde/experiments.hpp"

#include <cmath>

#include "parallel.hpp"

namespace vidde {

namespace {

State phi(double x, double y, double c, double v, double z) {
  State s;
  s << x, y, c, v, z;
  return s;
}

ModelParameters table_row(double lambda, double p, double alpha2, double k, double c_ctl, double h) {
  ModelParameters m;
  m.lambda = lambda;
  m.beta1 = 0.004;
  m.beta2 = 0.005;
  m.d1 = 0.2;
  m.m1 = 0.3;
  m.alpha1 = 0.1;
  m.d2 = 0.25;
  m.p = p;
  m.alpha2 = alpha2;
  m.d3 = 0.25;
  m.k = k;
  m.m2 = 0.3;
  m.d4 = 0.25;
  m.c_ctl = c_ctl;
  m.h = h;
  m.d5 = 0.25;
  return m;
}

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> scenarios = {
      {"E0",
       table_row(1, 0.2, 0.1, 8, 0.3, 0.01),
       {phi(5, 5, 6, 3, 3.5), phi(6, 2, 7, 2, 4.5), phi(4, 3, 8, 4, 4)},
       {{5, 3}, {5, 2}, {2, 3}},
       1000.0},
      {"E1",
       table_row(20, 0.02, 0.6, 20, 0.003, 0.03),
       {phi(5, 5, 6, 3, 35), phi(6, 2, 7, 2, 45), phi(4, 3, 8, 4, 25)},
       {{5, 3}, {5, 2}, {4, 7}},
       2000.0},
      {"E2",
       table_row(20, 0.02, 0.6, 20, 0.03, 0.03),
       {phi(12, 4, 35, 1, 10), phi(25, 3, 40, 2, 15), phi(40, 10, 25, 4, 13)},
       {{5, 4}, {5, 2}, {2, 4}},
       2000.0},
  };
  return scenarios;
}

}  // namespace

const Scenario& scenario(std::string_view name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + std::string(name) + "' (expected E0, E1 or E2)");
}

KernelPair dirac_kernels(double tau1, double tau2) { return {DelayKernel::dirac(tau1), DelayKernel::dirac(tau2)}; }

std::string_view to_string(Attractor a) {
  switch (a) {
    case Attractor::E0: return "E0";
    case Attractor::E1: return "E1";
    case Attractor::E2: return "E2";
    case Attractor::NotConverged: return "NotConverged";
    case Attractor::Boundary: return "Boundary";
  }
  return "?";
}

Classification classify(const Trajectory& traj, const EquilibriumSet& eqs, double window, double tol) {
  const std::size_t n = traj.size();
  const double t_start = traj.t_end() * (1.0 - window);
  auto first = static_cast<std::size_t>(std::ceil(t_start / traj.dt() - 1e-9));
  first = std::min(first, n - 1);

  State lo = traj.state(first), hi = lo;
  std::vector<std::pair<Attractor, const State*>> candidates{{Attractor::E0, &eqs.e0}};
  if (eqs.e1) candidates.emplace_back(Attractor::E1, &*eqs.e1);
  if (eqs.e2) candidates.emplace_back(Attractor::E2, &*eqs.e2);
  std::vector<double> distance(candidates.size(), 0.0);

  for (std::size_t i = first; i < n; ++i) {
    const State& s = traj.state(i);
    lo = lo.cwiseMin(s);
    hi = hi.cwiseMax(s);
    for (std::size_t k = 0; k < candidates.size(); ++k)
      distance[k] = std::max(distance[k], (s - *candidates[k].second).cwiseAbs().maxCoeff());
  }

  Classification out;
  out.oscillation = (hi - lo).maxCoeff();
  const auto best = std::min_element(distance.begin(), distance.end()) - distance.begin();
  out.distance = distance[static_cast<std::size_t>(best)];
  if (out.oscillation <= tol && out.distance < tol) out.attractor = candidates[static_cast<std::size_t>(best)].first;
  return out;
}

Attractor predict_regime(double r0, double r1) {
  constexpr double kBoundary = 1e-9;
  if (!std::isfinite(r0) || !std::isfinite(r1)) return Attractor::Boundary;
  if (std::abs(r0 - 1.0) < kBoundary) return Attractor::Boundary;
  if (r0 < 1.0) return Attractor::E0;
  if (std::abs(r1 - 1.0) < kBoundary) return Attractor::Boundary;
  return r1 < 1.0 ? Attractor::E1 : Attractor::E2;
}

std::vector<RegimeCell> sweep(const ModelParameters& params, const std::vector<double>& tau1_grid,
                              const std::vector<double>& tau2_grid, const SweepOptions& options) {
  for (double t : tau1_grid)
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorKind::ConfigError, "tau1 grid must be finite and >= 0");
  for (double t : tau2_grid)
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorKind::ConfigError, "tau2 grid must be finite and >= 0");
  if (options.simulate) step_count(options.integration.dt, options.integration.t_end);

  std::vector<RegimeCell> cells(tau1_grid.size() * tau2_grid.size());
  detail::parallel_for(cells.size(), options.threads, [&](std::size_t idx) {
    RegimeCell& cell = cells[idx];
    cell.tau1 = tau1_grid[idx / tau2_grid.size()];
    cell.tau2 = tau2_grid[idx % tau2_grid.size()];
    const KernelPair kernels = dirac_kernels(cell.tau1, cell.tau2);
    const SurvivalFactors f = survival_factors(params, kernels.infection, kernels.production);
    cell.derivation = reproduction_numbers(params, f, R0Mode::Derivation);
    cell.paper = reproduction_numbers(params, f, R0Mode::PaperPrinted);
    cell.predicted = predict_regime(cell.derivation.r0, cell.derivation.r1);
    cell.predicted_paper = predict_regime(cell.paper.r0, cell.paper.r1);
    if (!options.simulate) return;
    try {
      const auto traj = integrate(params, kernels, InitialHistory::constant(options.history), options.integration);
      cell.observed = classify(traj, equilibria(params, f)).attractor;
    } catch (const Error& e) {
      cell.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  return cells;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || lo < 0.0 || hi < lo)
    throw Error(ErrorKind::ConfigError, "grid needs finite 0 <= lo <= hi");
  if (!(step > 0.0)) {
    if (hi == lo) return {lo};
    throw Error(ErrorKind::ConfigError, "grid step must be positive");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace vidde
