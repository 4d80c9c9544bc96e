#ifndef VIDDE_MODEL_HPP
#define VIDDE_MODEL_HPP

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vidde/error.hpp"

namespace vidde {

/// State (x, y, c, v, z): uninfected cells, infected cells, cytokines,
/// free virus, CTLs.
template <typename Scalar>
using State5 = Eigen::Matrix<Scalar, 5, 1>;
using State = State5<double>;

enum Component : Eigen::Index { kX = 0, kY = 1, kC = 2, kV = 3, kZ = 4 };

inline constexpr std::array<std::string_view, 5> kComponentNames = {"x", "y", "c", "v", "z"};

/// Rate constants of the distributed-delay model. All strictly positive once
/// validated.
template <typename Scalar>
struct ModelParametersT {
  Scalar lambda{};  // recruitment of uninfected cells
  Scalar beta1{};   // virus-to-cell infection
  Scalar beta2{};   // cytokine-enhanced infection
  Scalar d1{}, d2{}, d3{}, d4{}, d5{};
  Scalar alpha1{};  // pyroptosis
  Scalar alpha2{};  // cytokine production
  Scalar k{};       // virion burst rate
  Scalar c_ctl{};   // CTL proliferation
  Scalar p{};       // CTL killing
  Scalar h{};       // CTL saturation constant
  Scalar m1{}, m2{};

  template <typename T>
  ModelParametersT<T> cast() const {
    return {T(lambda), T(beta1), T(beta2), T(d1), T(d2), T(d3), T(d4), T(d5),
            T(alpha1), T(alpha2), T(k),     T(c_ctl), T(p), T(h), T(m1), T(m2)};
  }

  bool operator==(const ModelParametersT&) const = default;
};

using ModelParameters = ModelParametersT<double>;

/// Configuration-file names of the 16 fields, paired with the members.
template <typename Scalar>
constexpr std::array<std::pair<std::string_view, Scalar ModelParametersT<Scalar>::*>, 16>
parameter_fields() {
  using P = ModelParametersT<Scalar>;
  return {{{"lambda", &P::lambda}, {"beta1", &P::beta1}, {"beta2", &P::beta2},
           {"d1", &P::d1},         {"d2", &P::d2},       {"d3", &P::d3},
           {"d4", &P::d4},         {"d5", &P::d5},       {"alpha1", &P::alpha1},
           {"alpha2", &P::alpha2}, {"k", &P::k},         {"c", &P::c_ctl},
           {"p", &P::p},           {"h", &P::h},         {"m1", &P::m1},
           {"m2", &P::m2}}};
}

using FieldMap = std::map<std::string, double, std::less<>>;

/// Builds validated parameters from named values. Every violated constraint is
/// collected before throwing, so the diagnostic lists all of them at once.
/// "c_ctl" is accepted as an alias of "c".
ModelParameters validate_parameters(const FieldMap& raw);

FieldMap to_field_map(const ModelParameters& params);

/// Stable hex digest of the parameter bit patterns.
std::string parameter_fingerprint(const ModelParameters& params);

/// Probability density of delay lengths, either a point mass or a set of
/// nodes with weights. A Dirac kernel is stored as a single node of weight 1.
class DelayKernel {
 public:
  static DelayKernel dirac(double tau);

  /// Nodes strictly increasing and nonnegative. The weights plus the recorded
  /// truncated tail mass must sum to 1 within 1e-12.
  static DelayKernel tabulated(std::vector<double> nodes, std::vector<double> weights,
                               double tail_mass = 0.0);

  /// Erlang(shape, rate) density discretized on cells of width `step`, nodes
  /// at cell midpoints carrying the exact cell mass. The support is cut where
  /// the remaining tail mass drops below `truncation_eps`; the weights are not
  /// renormalized.
  static DelayKernel erlang(int shape, double rate, double step, double truncation_eps);

  bool is_dirac() const { return dirac_; }
  double tau() const;
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double tail_mass() const { return tail_mass_; }
  double max_delay() const { return nodes_.back(); }

  bool operator==(const DelayKernel&) const = default;

 private:
  DelayKernel() = default;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double tail_mass_ = 0.0;
  bool dirac_ = false;
};

/// Initial data on (-inf, 0].
class InitialHistory {
 public:
  static InitialHistory constant(const State& value);

  /// Times strictly increasing and ending at 0. Values below the first time
  /// hold the first state.
  static InitialHistory tabulated(std::vector<double> times, std::vector<State> states);

  bool is_constant() const { return times_.empty(); }
  State at(double theta) const;
  bool nonnegative() const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }

 private:
  InitialHistory() = default;
  std::vector<double> times_;
  std::vector<State> states_;
};

/// Throws PositiveTheta for theta > 0.
inline State history_at(const InitialHistory& history, double theta) { return history.at(theta); }

/// Right-hand side of the model given the current state and the two
/// kernel-weighted delayed inputs:
///   infection  = int f1(s) e^{-m1 s} (beta1 x v + beta2 x c)(t - s) ds
///   production = int f2(s) e^{-m2 s} y(t - s) ds
template <typename Scalar>
State5<Scalar> vector_field(const ModelParametersT<Scalar>& p, const State5<Scalar>& s,
                            Scalar infection, Scalar production) {
  const Scalar x = s[kX], y = s[kY], c = s[kC], v = s[kV], z = s[kZ];
  State5<Scalar> out;
  out[kX] = p.lambda - p.beta1 * x * v - p.beta2 * x * c - p.d1 * x;
  out[kY] = infection - (p.alpha1 + p.d2) * y - p.p * y * z;
  out[kC] = p.alpha2 * y - p.d3 * c;
  out[kV] = p.k * production - p.d4 * v;
  out[kZ] = p.c_ctl * y * z / (p.h + z) - p.d5 * z;
  return out;
}

template <typename Scalar>
Scalar infection_integrand(const ModelParametersT<Scalar>& p, const State5<Scalar>& s) {
  return p.beta1 * s[kX] * s[kV] + p.beta2 * s[kX] * s[kC];
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.array().isFinite().all();
}

}  // namespace vidde

#endif  // VIDDE_MODEL_HPP
