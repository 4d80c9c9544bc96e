#include "vidde/model.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <numeric>

namespace vidde {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::NonPositiveField: return "NonPositiveField";
    case ErrorKind::InvalidKernel: return "InvalidKernel";
    case ErrorKind::InvalidHistory: return "InvalidHistory";
    case ErrorKind::PositiveTheta: return "PositiveTheta";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorKind::MissingEquilibrium: return "MissingEquilibrium";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorKind::NotEvaluable: return "NotEvaluable";
  }
  return "Unknown";
}

namespace {

std::string describe(const std::vector<FieldViolation>& violations) {
  std::string out = "invalid parameters:";
  for (const auto& v : violations) {
    out += ' ';
    out += to_string(v.kind);
    out += "(\"" + v.field + "\")";
  }
  return out;
}

}  // namespace

ParameterError::ParameterError(std::vector<FieldViolation> violations)
    : Error(violations.empty() ? ErrorKind::ConfigError : violations.front().kind,
            describe(violations)),
      violations_(std::move(violations)) {}

ModelParameters validate_parameters(const FieldMap& raw) {
  ModelParameters params;
  std::vector<FieldViolation> violations;
  for (const auto& [name, member] : parameter_fields<double>()) {
    auto it = raw.find(name);
    if (it == raw.end() && name == "c") it = raw.find("c_ctl");
    if (it == raw.end()) {
      violations.push_back({ErrorKind::MissingField, std::string(name)});
      continue;
    }
    const double value = it->second;
    if (!std::isfinite(value)) {
      violations.push_back({ErrorKind::NonFiniteField, std::string(name)});
    } else if (!(value > 0.0)) {
      violations.push_back({ErrorKind::NonPositiveField, std::string(name)});
    }
    params.*member = value;
  }
  if (!violations.empty()) throw ParameterError(std::move(violations));
  return params;
}

FieldMap to_field_map(const ModelParameters& params) {
  FieldMap out;
  for (const auto& [name, member] : parameter_fields<double>()) out.emplace(name, params.*member);
  return out;
}

std::string parameter_fingerprint(const ModelParameters& params) {
  // FNV-1a over the IEEE bit patterns, in field order.
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const auto& [name, member] : parameter_fields<double>()) {
    auto bits = std::bit_cast<std::uint64_t>(params.*member);
    for (int i = 0; i < 8; ++i) {
      hash ^= (bits >> (8 * i)) & 0xffu;
      hash *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

DelayKernel DelayKernel::dirac(double tau) {
  if (!std::isfinite(tau) || tau < 0.0)
    throw Error(ErrorKind::InvalidKernel, "Dirac kernel needs a finite delay >= 0");
  DelayKernel k;
  k.nodes_ = {tau};
  k.weights_ = {1.0};
  k.dirac_ = true;
  return k;
}

DelayKernel DelayKernel::tabulated(std::vector<double> nodes, std::vector<double> weights,
                                   double tail_mass) {
  if (nodes.empty() || nodes.size() != weights.size())
    throw Error(ErrorKind::InvalidKernel, "tabulated kernel needs matching, non-empty nodes and weights");
  if (!std::isfinite(tail_mass) || tail_mass < 0.0 || tail_mass > 1.0)
    throw Error(ErrorKind::InvalidKernel, "tail mass must lie in [0, 1]");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!std::isfinite(nodes[j]) || nodes[j] < 0.0)
      throw Error(ErrorKind::InvalidKernel, "kernel nodes must be finite and >= 0");
    if (j > 0 && !(nodes[j] > nodes[j - 1]))
      throw Error(ErrorKind::InvalidKernel, "kernel nodes must be strictly increasing");
    if (!std::isfinite(weights[j]) || weights[j] < 0.0)
      throw Error(ErrorKind::InvalidKernel, "kernel weights must be finite and >= 0");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0) + tail_mass;
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidKernel, "kernel weights plus tail mass must sum to 1");
  DelayKernel k;
  k.nodes_ = std::move(nodes);
  k.weights_ = std::move(weights);
  k.tail_mass_ = tail_mass;
  return k;
}

DelayKernel DelayKernel::erlang(int shape, double rate, double step, double truncation_eps) {
  if (shape < 1 || !(rate > 0.0) || !(step > 0.0) || !(truncation_eps > 0.0) ||
      !std::isfinite(rate) || !std::isfinite(step))
    throw Error(ErrorKind::InvalidKernel, "Erlang kernel needs shape >= 1 and positive rate, step, eps");
  // P(S > s) = e^{-rs} sum_{i<shape} (rs)^i / i!
  auto survival = [&](double s) {
    const double rs = rate * s;
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < shape; ++i) {
      term *= rs / i;
      sum += term;
    }
    return std::exp(-rs) * sum;
  };
  std::vector<double> nodes, weights;
  double left = 0.0, s_left = 1.0;
  for (std::size_t cell = 0;; ++cell) {
    const double right = static_cast<double>(cell + 1) * step;
    const double s_right = survival(right);
    nodes.push_back(0.5 * (left + right));
    weights.push_back(s_left - s_right);
    left = right;
    s_left = s_right;
    if (s_right < truncation_eps) break;
    if (cell > 10'000'000)
      throw Error(ErrorKind::InvalidKernel, "Erlang kernel support too long for the given step");
  }
  return tabulated(std::move(nodes), std::move(weights), s_left);
}

double DelayKernel::tau() const {
  if (!dirac_) throw Error(ErrorKind::InvalidKernel, "tau() requested from a tabulated kernel");
  return nodes_.front();
}

InitialHistory InitialHistory::constant(const State& value) {
  if (!all_finite(value)) throw Error(ErrorKind::InvalidHistory, "history value must be finite");
  InitialHistory h;
  h.states_ = {value};
  return h;
}

InitialHistory InitialHistory::tabulated(std::vector<double> times, std::vector<State> states) {
  if (times.empty() || times.size() != states.size())
    throw Error(ErrorKind::InvalidHistory, "tabulated history needs matching, non-empty times and states");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j]) || !all_finite(states[j]))
      throw Error(ErrorKind::InvalidHistory, "tabulated history must be finite");
    if (j > 0 && !(times[j] > times[j - 1]))
      throw Error(ErrorKind::InvalidHistory, "history times must be strictly increasing");
  }
  if (times.back() != 0.0) throw Error(ErrorKind::InvalidHistory, "history times must end at 0");
  InitialHistory h;
  h.times_ = std::move(times);
  h.states_ = std::move(states);
  return h;
}

State InitialHistory::at(double theta) const {
  if (!(theta <= 0.0)) throw Error(ErrorKind::PositiveTheta, "history queried at theta > 0");
  if (times_.empty()) return states_.front();
  if (theta <= times_.front()) return states_.front();
  const auto upper = std::upper_bound(times_.begin(), times_.end(), theta);
  if (upper == times_.end()) return states_.back();
  const auto j = static_cast<std::size_t>(upper - times_.begin());
  const double w = (theta - times_[j - 1]) / (times_[j] - times_[j - 1]);
  return (1.0 - w) * states_[j - 1] + w * states_[j];
}

bool InitialHistory::nonnegative() const {
  for (const auto& s : states_)
    if ((s.array() < 0.0).any()) return false;
  return true;
}

}  // namespace vidde
