#include "vidde/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace vidde {

CertificateReport finalize(CertificateReport report) {
  report.passed = report.worst_violation <= report.tolerance;
  return report;
}

double g(double s) {
  if (!(s > 0.0)) throw Error(ErrorKind::NonPositiveArgument, "g(s) requires s > 0");
  return s - 1.0 - std::log(s);
}

std::string_view to_string(LyapunovKind kind) {
  switch (kind) {
    case LyapunovKind::L0: return "L0";
    case LyapunovKind::L1: return "L1";
    case LyapunovKind::L2: return "L2";
  }
  return "?";
}

namespace {

double g_checked(double s, const char* what) {
  if (!(s > 0.0)) throw Error(ErrorKind::NotEvaluable, std::string("g argument not positive: ") + what);
  return s - 1.0 - std::log(s);
}

// A Lyapunov functional split into a pointwise part and memory terms
//   coef * sum_j w_j e^{-m s_j} int_{t - s_j}^{t} F(state(eta)) d eta.
struct MemoryTerm {
  std::string name;
  double coef;
  const DelayKernel* kernel;
  double m;
  std::function<double(const State&)> integrand;
};

struct Functional {
  std::function<std::vector<std::pair<std::string, double>>(const State&)> pointwise;
  std::vector<MemoryTerm> memory;
};

Functional make_L0(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels) {
  const double x0 = p.lambda / p.d1;
  const double r0 = reproduction_numbers(p, f, R0Mode::Derivation).r0;
  const double a1 = f.a1;
  const double coef_c = p.beta2 * a1 * x0 / (p.d3 * r0);
  const double coef_v = p.beta1 * a1 * x0 / (p.d4 * r0);
  Functional fn;
  fn.pointwise = [=](const State& s) {
    return std::vector<std::pair<std::string, double>>{{"x", a1 * x0 * g_checked(s[kX] / x0, "x/x0")},
                                                        {"y", s[kY]},
                                                        {"c", coef_c * s[kC]},
                                                        {"v", coef_v * s[kV]},
                                                        {"z", p.p * p.h / p.c_ctl * s[kZ]}};
  };
  fn.memory = {
      {"N01", 1.0, &kernels.infection, p.m1, [=](const State& s) { return p.beta1 * s[kX] * s[kV]; }},
      {"N02", 1.0, &kernels.infection, p.m1, [=](const State& s) { return p.beta2 * s[kX] * s[kC]; }},
      {"N03", coef_v * p.k, &kernels.production, p.m2, [](const State& s) { return s[kY]; }},
  };
  return fn;
}

// L1 and L2 share their structure; L2 replaces the linear z-term by a g-term
// around z2.
Functional make_L12(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels, const State& e,
                    bool active_ctl) {
  const double xe = e[kX], ye = e[kY], ce = e[kC], ve = e[kV], ze = e[kZ];
  const double a1 = f.a1;
  if (!(xe > 0.0 && ye > 0.0 && ce > 0.0 && ve > 0.0) || (active_ctl && !(ze > 0.0)))
    throw Error(ErrorKind::MissingEquilibrium, "equilibrium components must be positive");
  Functional fn;
  fn.pointwise = [=](const State& s) {
    std::vector<std::pair<std::string, double>> out{
        {"x", xe * g_checked(s[kX] / xe, "x/xe")},
        {"y", ye / a1 * g_checked(s[kY] / ye, "y/ye")},
        {"c", p.beta2 * xe * ce / p.d3 * g_checked(s[kC] / ce, "c/ce")},
        {"v", p.beta1 * xe * ve / p.d4 * g_checked(s[kV] / ve, "v/ve")}};
    if (active_ctl)
      out.emplace_back("z", p.p * ye / (p.d5 * a1) * ze * g_checked(s[kZ] / ze, "z/ze"));
    else
      out.emplace_back("z", p.p * p.h / (p.c_ctl * a1) * s[kZ]);
    return out;
  };
  const std::string tag = active_ctl ? "N2" : "N1";
  fn.memory = {
      {tag + "1", p.beta1 * xe * ve / a1, &kernels.infection, p.m1,
       [=](const State& s) { return g_checked(s[kX] * s[kV] / (xe * ve), "xv"); }},
      {tag + "2", p.beta2 * xe * ce / a1, &kernels.infection, p.m1,
       [=](const State& s) { return g_checked(s[kX] * s[kC] / (xe * ce), "xc"); }},
      {tag + "3", p.k * p.beta1 * xe * ye / p.d4, &kernels.production, p.m2,
       [=](const State& s) { return g_checked(s[kY] / ye, "y"); }},
  };
  return fn;
}

// int_a^b F(traj(eta)) d eta by the trapezoidal rule on the nodes i dt that
// fall inside (a, b), plus the endpoints.
double window_integral(const Trajectory& traj, const std::function<double(const State&)>& F, double a, double b) {
  if (!(b > a)) return 0.0;
  const double dt = traj.dt();
  auto node_index = [&](double t) { return std::llround(t / dt); };
  auto is_node = [&](double t) { return std::abs(t / dt - std::round(t / dt)) <= 1e-9 * std::max(1.0, std::abs(t / dt)); };
  long long first = is_node(a) ? node_index(a) + 1 : static_cast<long long>(std::ceil(a / dt));
  long long last = is_node(b) ? node_index(b) - 1 : static_cast<long long>(std::floor(b / dt));
  double prev_t = a;
  double prev_f = F(traj.at(a));
  double sum = 0.0;
  for (long long i = first; i <= last; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double fv = F(traj.at(t));
    sum += 0.5 * (t - prev_t) * (prev_f + fv);
    prev_t = t;
    prev_f = fv;
  }
  sum += 0.5 * (b - prev_t) * (prev_f + F(traj.at(b)));
  return sum;
}

LyapunovValue evaluate(const Functional& fn, const Trajectory& traj, double t) {
  if (t < 0.0 || t > traj.t_end() * (1.0 + 1e-12)) throw Error(ErrorKind::OutOfRange, "Lyapunov time outside [0, t_end]");
  LyapunovValue out;
  out.t = t;
  out.components = fn.pointwise(traj.at(t));
  for (const auto& term : fn.memory) {
    double total = 0.0;
    const auto nodes = term.kernel->nodes();
    const auto weights = term.kernel->weights();
    for (std::size_t j = 0; j < nodes.size(); ++j)
      total += weights[j] * std::exp(-term.m * nodes[j]) * window_integral(traj, term.integrand, t - nodes[j], t);
    out.components.emplace_back(term.name, term.coef * total);
  }
  for (const auto& [name, value] : out.components) out.value += value;
  return out;
}

}  // namespace

CertificateReport check_cone_invariance(const ModelParameters& p, const KernelPair& kernels,
                                        const State& boundary_state, const InitialHistory& history) {
  if (!history.nonnegative()) throw Error(ErrorKind::InvalidHistory, "cone check requires a nonnegative history");
  if ((boundary_state.array() < 0.0).any() || !(boundary_state.array() == 0.0).any())
    throw Error(ErrorKind::NotOnBoundary, "state is not on the boundary of the nonnegative cone");
  auto past = [&](double theta) { return history.at(std::min(theta, 0.0)); };
  const State derivative = rhs(p, kernels, past, 0.0, boundary_state);
  CertificateReport report{"cone_invariance", false, 0.0, 0.0, 0.0, ""};
  for (Eigen::Index i = 0; i < 5; ++i) {
    if (boundary_state[i] != 0.0) continue;
    report.notes += std::string(report.notes.empty() ? "zero components:" : "") + " " +
                    std::string(kComponentNames[static_cast<std::size_t>(i)]);
    report.worst_violation = std::max(report.worst_violation, -derivative[i]);
  }
  return finalize(report);
}

double boundedness_functional(const ModelParameters& p, const KernelPair& kernels, const Trajectory& traj, double t) {
  return delayed_term(p, kernels.infection, p.m1, traj, t, Delayed::X) + traj.at(t)[kY];
}

CertificateReport check_boundedness(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                                    const Trajectory& traj, double rel_tol) {
  const double r = std::min(p.d1, p.alpha1 + p.d2);
  const double level = p.lambda * f.a1 / r;
  const double b0 = boundedness_functional(p, kernels, traj, 0.0);
  const double c1 = level + std::abs(r * b0 - p.lambda * f.a1) / r;
  CertificateReport report{"boundedness", false, 0.0, 0.0, rel_tol, ""};
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    const double envelope = level + (r * b0 - p.lambda * f.a1) / (r * std::exp(r * t));
    const double b = boundedness_functional(p, kernels, traj, t);
    const double v_envelope = (b - envelope) / std::max(envelope, std::numeric_limits<double>::min());
    const double v_c1 = (traj.state(i)[kY] - c1) / c1;
    const double v = std::max(v_envelope, v_c1);
    if (v > worst) {
      worst = v;
      report.worst_time = t;
    }
  }
  report.worst_violation = std::max(worst, 0.0);
  report.notes = "relative excess over the envelope; C1 = " + std::to_string(c1);
  return finalize(report);
}

LyapunovValue lyapunov_L0(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t) {
  return evaluate(make_L0(p, f, kernels), traj, t);
}

LyapunovValue lyapunov_L1(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t, const State& e1) {
  return evaluate(make_L12(p, f, kernels, e1, false), traj, t);
}

LyapunovValue lyapunov_L2(const ModelParameters& p, const SurvivalFactors& f, const KernelPair& kernels,
                          const Trajectory& traj, double t, const State& e2) {
  return evaluate(make_L12(p, f, kernels, e2, true), traj, t);
}

LyapunovSeries lyapunov_series(LyapunovKind kind, const ModelParameters& p, const SurvivalFactors& f,
                               const KernelPair& kernels, const Trajectory& traj, const EquilibriumSet& eqs,
                               std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::ConfigError, "stride must be positive");
  Functional fn;
  switch (kind) {
    case LyapunovKind::L0: fn = make_L0(p, f, kernels); break;
    case LyapunovKind::L1:
      if (!eqs.e1) throw Error(ErrorKind::MissingEquilibrium, "L1 requires E1");
      fn = make_L12(p, f, kernels, *eqs.e1, false);
      break;
    case LyapunovKind::L2:
      if (!eqs.e2) throw Error(ErrorKind::MissingEquilibrium, "L2 requires E2");
      fn = make_L12(p, f, kernels, *eqs.e2, true);
      break;
  }

  const std::size_t n = traj.size();
  const double dt = traj.dt();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // Per memory term: integrand at the nodes, running trapezoid sums from 0,
  // and the index of the most recent node where the integrand failed.
  struct Running {
    std::vector<double> values, prefix;
    std::vector<std::size_t> last_bad;
  };
  std::vector<Running> running(fn.memory.size());
  for (std::size_t m = 0; m < fn.memory.size(); ++m) {
    auto& r = running[m];
    r.values.resize(n);
    r.prefix.resize(n);
    r.last_bad.resize(n);
    std::size_t bad = kNone;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        r.values[i] = fn.memory[m].integrand(traj.state(i));
      } catch (const Error&) {
        r.values[i] = 0.0;
        bad = i;
      }
      r.last_bad[i] = bad;
      r.prefix[i] = i == 0 ? 0.0 : r.prefix[i - 1] + 0.5 * dt * (r.values[i - 1] + r.values[i]);
    }
  }

  LyapunovSeries series;
  series.kind = kind;
  for (std::size_t i = 0; i < n; i += stride) {
    const double t = traj.time(i);
    try {
      double value = 0.0;
      for (const auto& [name, v] : fn.pointwise(traj.state(i))) value += v;
      for (std::size_t m = 0; m < fn.memory.size(); ++m) {
        const auto& term = fn.memory[m];
        const auto& r = running[m];
        const auto nodes = term.kernel->nodes();
        const auto weights = term.kernel->weights();
        double total = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          const double a = t - nodes[j];
          double integral;
          if (a >= 0.0) {
            const double u = a / dt;
            auto k = static_cast<std::size_t>(std::floor(u + 1e-9));
            k = std::min(k, i);
            if (r.last_bad[i] != kNone && r.last_bad[i] >= k)
              throw Error(ErrorKind::NotEvaluable, "integrand not evaluable on window");
            const double tk = traj.time(k);
            double partial = 0.0;
            if (a - tk > 1e-9 * dt) {
              const double fa = term.integrand(traj.at(a));
              partial = 0.5 * (a - tk) * (r.values[k] + fa);
            }
            integral = r.prefix[i] - r.prefix[k] - partial;
          } else {
            if (r.last_bad[i] != kNone) throw Error(ErrorKind::NotEvaluable, "integrand not evaluable on window");
            integral = r.prefix[i] + window_integral(traj, term.integrand, a, 0.0);
          }
          total += weights[j] * std::exp(-term.m * nodes[j]) * integral;
        }
        value += term.coef * total;
      }
      series.indices.push_back(i);
      series.times.push_back(t);
      series.values.push_back(value);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotEvaluable) throw;
      ++series.not_evaluable;
    }
  }
  return series;
}

CertificateReport check_monotone_decrease(const std::vector<double>& times, const std::vector<double>& values,
                                          double rel_tol) {
  if (times.size() != values.size()) throw Error(ErrorKind::ConfigError, "times and values differ in length");
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  CertificateReport report{"monotone_decrease", false, 0.0, times.empty() ? 0.0 : times.front(), rel_tol * scale, ""};
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double increase = values[i + 1] - values[i];
    if (increase > report.worst_violation) {
      report.worst_violation = increase;
      report.worst_time = times[i + 1];
    }
  }
  report.notes = std::to_string(values.size()) + " samples";
  return finalize(report);
}

CertificateReport check_cone_sampled(const ModelParameters& p, const KernelPair& kernels, std::size_t samples,
                                     std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, scale);
  std::uniform_int_distribution<int> pattern(1, 31);
  CertificateReport report{"cone_invariance_sampled", false, 0.0, 0.0, 0.0, ""};
  for (std::size_t n = 0; n < samples; ++n) {
    const int zeros = pattern(rng);
    State state, past;
    for (Eigen::Index i = 0; i < 5; ++i) {
      state[i] = (zeros >> i) & 1 ? 0.0 : value(rng);
      past[i] = value(rng);
    }
    const auto single = check_cone_invariance(p, kernels, state, InitialHistory::constant(past));
    if (single.worst_violation > report.worst_violation) report.worst_violation = single.worst_violation;
  }
  report.notes = std::to_string(samples) + " random boundary states";
  return finalize(report);
}

std::optional<LyapunovKind> lyapunov_for_regime(const EquilibriumSet& eqs) {
  constexpr double kBoundary = 1e-9;
  if (std::abs(eqs.r0 - 1.0) < kBoundary) return std::nullopt;
  if (eqs.r0 < 1.0) return LyapunovKind::L0;
  if (std::abs(eqs.r1 - 1.0) < kBoundary) return std::nullopt;
  return eqs.r1 < 1.0 ? LyapunovKind::L1 : LyapunovKind::L2;
}

}  // namespace vidde
