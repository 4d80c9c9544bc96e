#include "vidde/analysis.hpp"

namespace vidde {

ReproductionNumbers reproduction_numbers(const ModelParameters& p, const SurvivalFactors& f, R0Mode mode) {
  const auto wide = reproduction_numbers(p.cast<long double>(), f.cast<long double>(), mode);
  return {static_cast<double>(wide.r0), static_cast<double>(wide.r1), mode};
}

EquilibriumSet equilibria(const ModelParameters& p, const SurvivalFactors& f) {
  const auto wide = equilibria(p.cast<long double>(), f.cast<long double>());
  EquilibriumSet out;
  out.e0 << p.lambda / p.d1, 0, 0, 0, 0;
  if (wide.e1) out.e1 = wide.e1->cast<double>();
  if (wide.e2) out.e2 = wide.e2->cast<double>();
  out.r0 = static_cast<double>(wide.r0);
  out.r1 = static_cast<double>(wide.r1);
  out.delta = static_cast<double>(wide.delta);

  out.residual_e0 = steady_state_residual(p, f, out.e0).cwiseAbs().maxCoeff();
  out.residuals_ok = residual_within_tolerance(out.e0, out.residual_e0);
  if (out.e1) {
    out.residual_e1 = steady_state_residual(p, f, *out.e1).cwiseAbs().maxCoeff();
    out.residuals_ok = out.residuals_ok && residual_within_tolerance(*out.e1, out.residual_e1);
  }
  if (out.e2) {
    out.residual_e2 = steady_state_residual(p, f, *out.e2).cwiseAbs().maxCoeff();
    out.residuals_ok = out.residuals_ok && residual_within_tolerance(*out.e2, out.residual_e2);
  }
  return out;
}

}  // namespace vidde
