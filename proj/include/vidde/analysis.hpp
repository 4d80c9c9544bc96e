#ifndef VIDDE_ANALYSIS_HPP
#define VIDDE_ANALYSIS_HPP

#include <cmath>
#include <limits>
#include <optional>

#include "vidde/model.hpp"

namespace vidde {

/// A_i = int f_i(s) e^{-m_i s} ds, the fraction surviving the delay period.
template <typename Scalar>
struct SurvivalFactorsT {
  Scalar a1{1}, a2{1};

  template <typename T>
  SurvivalFactorsT<T> cast() const {
    return {T(a1), T(a2)};
  }
};
using SurvivalFactors = SurvivalFactorsT<double>;

enum class R0Mode {
  Derivation,    // denominator d3 d4 (alpha1 + d2); consistent with the fixed points
  PaperPrinted,  // denominator d3 (alpha1 + d2); reproduces the printed scenario values
};

template <typename Scalar>
struct ReproductionNumbersT {
  Scalar r0{};
  Scalar r1{};
  R0Mode mode = R0Mode::Derivation;
};
using ReproductionNumbers = ReproductionNumbersT<double>;

template <typename Scalar>
Scalar survival_factor(const DelayKernel& kernel, Scalar m) {
  using std::exp;
  if (kernel.is_dirac()) return exp(-m * Scalar(kernel.tau()));
  // Kahan-compensated sum; kernels may carry many small weights.
  Scalar sum(0), comp(0);
  for (std::size_t j = 0; j < kernel.nodes().size(); ++j) {
    const Scalar term = Scalar(kernel.weights()[j]) * exp(-m * Scalar(kernel.nodes()[j]));
    const Scalar y = term - comp;
    const Scalar t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <typename Scalar>
SurvivalFactorsT<Scalar> survival_factors(const ModelParametersT<Scalar>& p, const DelayKernel& kernel1,
                                          const DelayKernel& kernel2) {
  return {survival_factor(kernel1, p.m1), survival_factor(kernel2, p.m2)};
}

/// beta1 k A2 d3 + beta2 alpha2 d4: the common infection gain appearing in
/// every threshold and equilibrium expression.
template <typename Scalar>
Scalar infection_gain(const ModelParametersT<Scalar>& p, const SurvivalFactorsT<Scalar>& f) {
  return p.beta1 * p.k * f.a2 * p.d3 + p.beta2 * p.alpha2 * p.d4;
}

template <typename Scalar>
ReproductionNumbersT<Scalar> reproduction_numbers(const ModelParametersT<Scalar>& p,
                                                  const SurvivalFactorsT<Scalar>& f, R0Mode mode) {
  const Scalar x0 = p.lambda / p.d1;
  const Scalar gain = infection_gain(p, f);
  Scalar denom = p.d3 * (p.alpha1 + p.d2);
  if (mode == R0Mode::Derivation) denom *= p.d4;
  const Scalar r0 = f.a1 * x0 * gain / denom;
  const Scalar r1 = p.c_ctl * p.d1 * p.d3 * p.d4 * (r0 - Scalar(1)) / (p.h * p.d5 * gain);
  return {r0, r1, mode};
}

/// Double-precision entry point; evaluated in extended precision and rounded.
ReproductionNumbers reproduction_numbers(const ModelParameters& p, const SurvivalFactors& f, R0Mode mode);

/// Right-hand side at a constant history equal to `point` (delayed terms
/// collapse to A_i-weighted instantaneous ones). Zero exactly at fixed points.
template <typename Scalar>
State5<Scalar> steady_state_residual(const ModelParametersT<Scalar>& p, const SurvivalFactorsT<Scalar>& f,
                                     const State5<Scalar>& point) {
  return vector_field(p, point, f.a1 * infection_integrand(p, point), f.a2 * point[kY]);
}

/// Existence requires the threshold to exceed 1 by this margin.
inline constexpr double kExistenceMargin = 1e-12;

template <typename Scalar>
struct EquilibriumSetT {
  State5<Scalar> e0 = State5<Scalar>::Zero();
  std::optional<State5<Scalar>> e1;
  std::optional<State5<Scalar>> e2;
  Scalar r0{};  // derivation mode
  Scalar r1{};  // derivation mode
  Scalar delta = std::numeric_limits<Scalar>::quiet_NaN();
  // max-abs steady-state residual per equilibrium; NaN when absent
  Scalar residual_e0{};
  Scalar residual_e1 = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar residual_e2 = std::numeric_limits<Scalar>::quiet_NaN();
  bool residuals_ok = false;
};
using EquilibriumSet = EquilibriumSetT<double>;

/// Residual tolerance relative to the largest component magnitude (floored at 1).
inline constexpr double kResidualRelTol = 1e-9;

template <typename Scalar>
bool residual_within_tolerance(const State5<Scalar>& point, Scalar residual) {
  using std::max;
  const Scalar scale = max(Scalar(1), point.cwiseAbs().maxCoeff());
  return residual < Scalar(kResidualRelTol) * scale;
}

/// Closed-form E0, E1 and E2. Always uses the derivation-mode thresholds since
/// only those produce true fixed points of the delayed system.
template <typename Scalar>
EquilibriumSetT<Scalar> equilibria(const ModelParametersT<Scalar>& p, const SurvivalFactorsT<Scalar>& f) {
  using std::sqrt;
  EquilibriumSetT<Scalar> out;
  const Scalar x0 = p.lambda / p.d1;
  out.e0 << x0, 0, 0, 0, 0;

  const auto rn = reproduction_numbers(p, f, R0Mode::Derivation);
  out.r0 = rn.r0;
  out.r1 = rn.r1;
  const Scalar gain = infection_gain(p, f);

  if (rn.r0 > Scalar(1 + kExistenceMargin)) {
    const Scalar y1 = p.d1 * p.d3 * p.d4 * (rn.r0 - Scalar(1)) / gain;
    State5<Scalar> e1;
    e1 << x0 / rn.r0, y1, p.alpha2 / p.d3 * y1, p.k * f.a2 / p.d4 * y1, Scalar(0);
    out.e1 = e1;
  }

  if (rn.r1 > Scalar(1 + kExistenceMargin)) {
    // z2 is the positive root of  a z^2 + b z - c = 0  with discriminant
    // delta = b^2 + 4 a c.
    const Scalar kill = p.alpha1 + p.d2;
    const Scalar a = p.p * p.d5 * gain;
    const Scalar b = p.d5 * (kill + p.p * p.h) * gain + p.d1 * p.d3 * p.d4 * p.p * p.c_ctl;
    const Scalar c = gain * p.h * kill * p.d5 * (rn.r1 - Scalar(1));
    out.delta = b * b + Scalar(4) * a * c;
    if (out.delta < Scalar(0))
      throw Error(ErrorKind::NegativeDiscriminant, "negative discriminant although R1 > 1");
    // (-b + sqrt(delta)) / (2a), rewritten without cancellation
    const Scalar z2 = Scalar(2) * c / (b + sqrt(out.delta));
    const Scalar hz = p.d5 * (p.h + z2);
    State5<Scalar> e2;
    e2 << (kill + p.p * z2) * p.d3 * p.d4 / (f.a1 * gain), hz / p.c_ctl, p.alpha2 * hz / (p.c_ctl * p.d3),
        p.k * f.a2 * hz / (p.c_ctl * p.d4), z2;
    out.e2 = e2;
  }

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

/// Double-precision entry point: closed forms in extended precision, points
/// rounded to double, residuals re-evaluated on the rounded points.
EquilibriumSet equilibria(const ModelParameters& p, const SurvivalFactors& f);

/// Coefficients (a, b, c) of a z^2 + b z - c = 0 whose positive root is z2.
template <typename Scalar>
std::array<Scalar, 3> z2_quadratic(const ModelParametersT<Scalar>& p, const SurvivalFactorsT<Scalar>& f) {
  const Scalar gain = infection_gain(p, f);
  const auto rn = reproduction_numbers(p, f, R0Mode::Derivation);
  const Scalar kill = p.alpha1 + p.d2;
  return {p.p * p.d5 * gain, p.d5 * (kill + p.p * p.h) * gain + p.d1 * p.d3 * p.d4 * p.p * p.c_ctl,
          gain * p.h * kill * p.d5 * (rn.r1 - Scalar(1))};
}

}  // namespace vidde

#endif  // VIDDE_ANALYSIS_HPP
