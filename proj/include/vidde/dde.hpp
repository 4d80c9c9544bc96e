#ifndef VIDDE_DDE_HPP
#define VIDDE_DDE_HPP

// Fixed-step classical RK4 for delay equations by the method of steps, with a
// dense uniform buffer (values + derivatives) used for every delayed lookup.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vidde/error.hpp"

namespace vidde {

enum class Interpolation { CubicHermite, Linear };

/// Cubic Hermite interpolant on [t0, t0 + h] evaluated at t0 + theta h.
/// Also used for theta outside [0, 1] as an extrapolating predictor.
template <typename DerivedA, typename DerivedB, typename DerivedC, typename DerivedD>
auto hermite(const Eigen::MatrixBase<DerivedA>& y0, const Eigen::MatrixBase<DerivedB>& f0,
             const Eigen::MatrixBase<DerivedC>& y1, const Eigen::MatrixBase<DerivedD>& f1, double h,
             double theta) {
  using Scalar = typename DerivedA::Scalar;
  const double t2 = theta * theta, t3 = t2 * theta;
  const Scalar h00 = 2 * t3 - 3 * t2 + 1;
  const Scalar h10 = t3 - 2 * t2 + theta;
  const Scalar h01 = -2 * t3 + 3 * t2;
  const Scalar h11 = t3 - t2;
  return (h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1).eval();
}

/// Solution samples on t_i = i dt with the right-hand side at each node.
template <int Dim>
class UniformDenseOutput {
 public:
  using Vector = Eigen::Matrix<double, Dim, 1>;

  UniformDenseOutput() = default;
  UniformDenseOutput(double dt, Interpolation interpolation) : dt_(dt), interpolation_(interpolation) {}

  double dt() const { return dt_; }
  Interpolation interpolation() const { return interpolation_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt_; }
  double t_end() const { return time(states_.size() - 1); }

  const Vector& state(std::size_t i) const { return states_[i]; }
  const Vector& derivative(std::size_t i) const { return derivatives_[i]; }
  const std::vector<Vector>& states() const { return states_; }
  const std::vector<Vector>& derivatives() const { return derivatives_; }

  void push_back(const Vector& y, const Vector& f) {
    states_.push_back(y);
    derivatives_.push_back(f);
  }
  void set_derivative(std::size_t i, const Vector& f) { derivatives_[i] = f; }
  void reserve(std::size_t n) {
    states_.reserve(n);
    derivatives_.reserve(n);
  }

  /// Value at t in [0, t_end]. Exact at nodes.
  Vector at(double t) const {
    const double u = t / dt_;
    const double nearest = std::round(u);
    const double last = static_cast<double>(states_.size() - 1);
    if (std::abs(u - nearest) <= 1e-9 * std::max(1.0, std::abs(u))) {
      if (nearest < 0.0 || nearest > last)
        throw Error(ErrorKind::OutOfRange, "dense output queried outside [0, t_end]");
      return states_[static_cast<std::size_t>(nearest)];
    }
    if (u < 0.0 || u > last) throw Error(ErrorKind::OutOfRange, "dense output queried outside [0, t_end]");
    const auto i = static_cast<std::size_t>(std::floor(u));
    return segment(i, u - static_cast<double>(i));
  }

  /// Interpolant of segment [t_i, t_{i+1}] at relative position theta.
  Vector segment(std::size_t i, double theta) const {
    if (interpolation_ == Interpolation::Linear) return (1.0 - theta) * states_[i] + theta * states_[i + 1];
    return hermite(states_[i], derivatives_[i], states_[i + 1], derivatives_[i + 1], dt_, theta);
  }

 private:
  double dt_ = 0.0;
  Interpolation interpolation_ = Interpolation::CubicHermite;
  std::vector<Vector> states_;
  std::vector<Vector> derivatives_;
};

/// Delayed-value accessor handed to the right-hand side during a step.
/// Queries below 0 go to the history, queries up to t_n to the dense buffer,
/// and queries inside the current step to a provisional interpolant: first an
/// extrapolation of the previous segment (predictor), then the Hermite
/// segment built from the predicted endpoint (corrector).
template <int Dim, typename History>
class PastLookup {
 public:
  using Vector = Eigen::Matrix<double, Dim, 1>;

  PastLookup(const UniformDenseOutput<Dim>& buffer, const History& history)
      : buffer_(buffer), history_(history) {}

  Vector operator()(double t) const {
    if (t < 0.0) return history_(t);
    const double tn = buffer_.t_end();
    if (t <= tn + 1e-9 * buffer_.dt()) return buffer_.at(std::min(t, tn));
    touched_ = true;
    const double theta = (t - tn) / buffer_.dt();
    const std::size_t n = buffer_.size() - 1;
    if (corrector_) {
      if (buffer_.interpolation() == Interpolation::Linear)
        return (1.0 - theta) * buffer_.state(n) + theta * end_state_;
      return hermite(buffer_.state(n), buffer_.derivative(n), end_state_, end_derivative_, buffer_.dt(), theta);
    }
    if (n == 0 || buffer_.interpolation() == Interpolation::Linear)
      return buffer_.state(n) + (t - tn) * buffer_.derivative(n);
    return hermite(buffer_.state(n - 1), buffer_.derivative(n - 1), buffer_.state(n), buffer_.derivative(n),
                   buffer_.dt(), 1.0 + theta);
  }

  void use_predictor() {
    corrector_ = false;
    touched_ = false;
  }
  void use_corrector(const Vector& end_state, const Vector& end_derivative) {
    corrector_ = true;
    touched_ = false;
    end_state_ = end_state;
    end_derivative_ = end_derivative;
  }
  bool touched() const { return touched_; }

 private:
  const UniformDenseOutput<Dim>& buffer_;
  const History& history_;
  bool corrector_ = false;
  mutable bool touched_ = false;
  Vector end_state_ = Vector::Zero();
  Vector end_derivative_ = Vector::Zero();
};

/// Number of steps covering [0, t_end]; t_end must be a multiple of dt.
inline std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::ConfigError, "dt must be positive and finite");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw Error(ErrorKind::ConfigError, "t_end must be positive and finite");
  if (dt > t_end) throw Error(ErrorKind::ConfigError, "dt must not exceed t_end");
  const double ratio = t_end / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * ratio)
    throw Error(ErrorKind::ConfigError, "t_end must be an integer multiple of dt");
  return static_cast<std::size_t>(n);
}

/// Integrates y'(t) = rhs(t, y(t), past) on [0, steps*dt] where past(s) gives
/// y at any s <= current time. `history(theta)` supplies theta < 0 values and
/// `history(0)` is the initial state. A component exceeding `blowup` in
/// magnitude, or turning non-finite, raises BlowUp.
template <int Dim, typename Rhs, typename History>
UniformDenseOutput<Dim> solve_method_of_steps(const Rhs& rhs, const History& history, double dt,
                                              std::size_t steps, Interpolation interpolation,
                                              double blowup = 1e12) {
  using Vector = Eigen::Matrix<double, Dim, 1>;
  UniformDenseOutput<Dim> out(dt, interpolation);
  out.reserve(steps + 1);
  PastLookup<Dim, History> past(out, history);

  const Vector y0 = history(0.0);
  out.push_back(y0, Vector::Zero());
  out.set_derivative(0, rhs(0.0, y0, past));

  auto check = [&](const Vector& y, double t) {
    if (!y.array().isFinite().all() || (y.array().abs() > blowup).any())
      throw Error(ErrorKind::BlowUp, "solution blew up at t = " + std::to_string(t));
  };

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = out.time(n);
    const double t_next = out.time(n + 1);
    const Vector& y = out.state(n);
    const Vector& k1 = out.derivative(n);

    auto rk4 = [&]() {
      const Vector k2 = rhs(t + 0.5 * dt, (y + 0.5 * dt * k1).eval(), past);
      const Vector k3 = rhs(t + 0.5 * dt, (y + 0.5 * dt * k2).eval(), past);
      const Vector k4 = rhs(t_next, (y + dt * k3).eval(), past);
      return (y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
    };

    past.use_predictor();
    Vector y_next = rk4();
    check(y_next, t_next);
    if (past.touched()) {
      // delays shorter than dt: one corrector sweep on the predicted segment
      const Vector f_pred = rhs(t_next, y_next, past);
      past.use_corrector(y_next, f_pred);
      y_next = rk4();
      check(y_next, t_next);
      past.use_corrector(y_next, f_pred);
    }
    const Vector f_next = rhs(t_next, y_next, past);
    out.push_back(y_next, f_next);
  }
  return out;
}

}  // namespace vidde

#endif  // VIDDE_DDE_HPP
