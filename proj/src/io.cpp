#include "vidde/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vidde {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double number(const Json& node, const std::string& where) {
  if (!node.is_number()) config_error(where + " must be a number");
  return node.get<double>();
}

std::vector<double> numbers(const Json& node, const std::string& where) {
  if (!node.is_array()) config_error(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(number(v, where));
  return out;
}

State state_from(const Json& node, const std::string& where) {
  const auto v = numbers(node, where);
  if (v.size() != 5) config_error(where + " must hold five values [x, y, c, v, z]");
  return State(v.data());
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) config_error(where + " is missing \"" + key + "\"");
  return *it;
}

DelayKernel kernel_from(const Json& node, const std::string& where, double truncation_eps) {
  if (!node.is_object()) config_error(where + " must be an object");
  const auto type = require(node, "type", where).get<std::string>();
  if (type == "dirac") return DelayKernel::dirac(number(require(node, "tau", where), where + ".tau"));
  if (type == "tabulated") {
    const double tail = node.contains("tail_mass") ? number(node["tail_mass"], where + ".tail_mass") : 0.0;
    return DelayKernel::tabulated(numbers(require(node, "nodes", where), where + ".nodes"),
                                  numbers(require(node, "weights", where), where + ".weights"), tail);
  }
  if (type == "erlang") {
    const double shape = number(require(node, "shape", where), where + ".shape");
    if (shape != std::floor(shape) || shape < 1 || shape > 1000) config_error(where + ".shape must be an integer >= 1");
    return DelayKernel::erlang(static_cast<int>(shape), number(require(node, "rate", where), where + ".rate"),
                               number(require(node, "step", where), where + ".step"), truncation_eps);
  }
  config_error(where + ".type must be \"dirac\", \"tabulated\" or \"erlang\"");
}

InitialHistory history_from(const Json& node) {
  if (!node.is_object()) config_error("history must be an object");
  const auto type = require(node, "type", "history").get<std::string>();
  if (type == "constant") return InitialHistory::constant(state_from(require(node, "value", "history"), "history.value"));
  if (type == "tabulated") {
    const auto times = numbers(require(node, "times", "history"), "history.times");
    const auto& raw_states = require(node, "states", "history");
    if (!raw_states.is_array()) config_error("history.states must be an array");
    std::vector<State> states;
    for (const auto& s : raw_states) states.push_back(state_from(s, "history.states[]"));
    return InitialHistory::tabulated(times, std::move(states));
  }
  config_error("history.type must be \"constant\" or \"tabulated\"");
}

Json kernel_to_json(const DelayKernel& k) {
  if (k.is_dirac()) return Json{{"type", "dirac"}, {"tau", k.tau()}};
  return Json{{"type", "tabulated"},
              {"nodes", std::vector<double>(k.nodes().begin(), k.nodes().end())},
              {"weights", std::vector<double>(k.weights().begin(), k.weights().end())},
              {"tail_mass", k.tail_mass()}};
}

}  // namespace

R0Mode parse_mode(std::string_view text) {
  if (text == "derivation") return R0Mode::Derivation;
  if (text == "paper") return R0Mode::PaperPrinted;
  config_error("mode must be \"derivation\" or \"paper\"");
}

std::string_view to_string(R0Mode mode) { return mode == R0Mode::Derivation ? "derivation" : "paper"; }

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) config_error("configuration must be a JSON object");
  RunConfig cfg;

  const auto& raw = require(doc, "parameters", "configuration");
  if (!raw.is_object()) config_error("parameters must be an object");
  FieldMap fields;
  for (const auto& [key, value] : raw.items()) {
    if (value.is_number()) {
      fields[key] = value.get<double>();
    } else if (value.is_null()) {
      fields[key] = std::numeric_limits<double>::quiet_NaN();
    } else {
      config_error("parameters." + key + " must be a number");
    }
  }
  cfg.params = validate_parameters(fields);

  if (doc.contains("integration")) {
    const auto& integ = doc["integration"];
    if (!integ.is_object()) config_error("integration must be an object");
    if (integ.contains("dt")) cfg.integration.dt = number(integ["dt"], "integration.dt");
    if (integ.contains("t_end")) cfg.integration.t_end = number(integ["t_end"], "integration.t_end");
    if (integ.contains("kernel_truncation_eps"))
      cfg.integration.kernel_truncation_eps = number(integ["kernel_truncation_eps"], "integration.kernel_truncation_eps");
    if (integ.contains("interpolation")) {
      const auto mode = integ["interpolation"].get<std::string>();
      if (mode == "hermite") cfg.integration.interpolation = Interpolation::CubicHermite;
      else if (mode == "linear") cfg.integration.interpolation = Interpolation::Linear;
      else config_error("integration.interpolation must be \"hermite\" or \"linear\"");
    }
  }
  step_count(cfg.integration.dt, cfg.integration.t_end);

  const double eps = cfg.integration.kernel_truncation_eps;
  cfg.kernels = {kernel_from(require(doc, "kernel1", "configuration"), "kernel1", eps),
                 kernel_from(require(doc, "kernel2", "configuration"), "kernel2", eps)};
  cfg.history = history_from(require(doc, "history", "configuration"));
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) config_error("mode must be a string");
    cfg.mode = parse_mode(doc["mode"].get<std::string>());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open configuration file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    config_error("malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const Json::exception& e) {
    config_error(std::string("configuration type error: ") + e.what());
  }
}

Json to_json(const RunConfig& cfg) {
  Json params = Json::object();
  for (const auto& [name, value] : to_field_map(cfg.params)) params[name] = value;
  Json history;
  if (cfg.history.is_constant()) {
    history = {{"type", "constant"}, {"value", to_json(cfg.history.states().front())}};
  } else {
    Json states = Json::array();
    for (const auto& s : cfg.history.states()) states.push_back(to_json(s));
    history = {{"type", "tabulated"}, {"times", cfg.history.times()}, {"states", states}};
  }
  return Json{{"parameters", params},
              {"kernel1", kernel_to_json(cfg.kernels.infection)},
              {"kernel2", kernel_to_json(cfg.kernels.production)},
              {"history", history},
              {"integration",
               {{"dt", cfg.integration.dt},
                {"t_end", cfg.integration.t_end},
                {"kernel_truncation_eps", cfg.integration.kernel_truncation_eps},
                {"interpolation", cfg.integration.interpolation == Interpolation::Linear ? "linear" : "hermite"}}},
              {"mode", std::string(to_string(cfg.mode))}};
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, end);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Monitors* monitors) {
  if (monitors && (monitors->lyapunov.size() != traj.size() || monitors->bound.size() != traj.size()))
    throw Error(ErrorKind::ConfigError, "monitor columns do not match the trajectory length");
  std::string line = "t,x,y,c,v,z";
  if (monitors) line += ",L,B";
  line += '\n';
  out << line;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    line = format_number(traj.time(i));
    for (Eigen::Index k = 0; k < 5; ++k) {
      line += ',';
      line += format_number(traj.state(i)[k]);
    }
    if (monitors) {
      line += ',';
      if (monitors->lyapunov[i]) line += format_number(*monitors->lyapunov[i]);
      line += ',';
      line += format_number(monitors->bound[i]);
    }
    line += '\n';
    out << line;
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<RegimeCell>& cells) {
  out << "tau1,tau2,r0_derivation,r1_derivation,r0_paper,r1_paper,predicted,observed\n";
  for (const auto& c : cells) {
    std::string observed;
    if (c.observed) observed = std::string(to_string(*c.observed));
    else if (!c.error.empty()) observed = "Failed";
    out << format_number(c.tau1) << ',' << format_number(c.tau2) << ',' << format_number(c.derivation.r0) << ','
        << format_number(c.derivation.r1) << ',' << format_number(c.paper.r0) << ',' << format_number(c.paper.r1)
        << ',' << to_string(c.predicted) << ',' << observed << '\n';
  }
}

Json to_json(const State& state) { return Json::array({state[0], state[1], state[2], state[3], state[4]}); }

Json to_json(const ReproductionNumbers& rn) {
  return Json{{"r0", rn.r0}, {"r1", rn.r1}, {"mode", std::string(to_string(rn.mode))}};
}

Json to_json(const EquilibriumSet& eqs) {
  auto point = [](const std::optional<State>& s, double residual) -> Json {
    if (!s) return Json{{"exists", false}};
    return Json{{"exists", true}, {"state", to_json(*s)}, {"residual", residual}};
  };
  return Json{{"e0", point(eqs.e0, eqs.residual_e0)},
              {"e1", point(eqs.e1, eqs.residual_e1)},
              {"e2", point(eqs.e2, eqs.residual_e2)},
              {"delta", std::isnan(eqs.delta) ? Json(nullptr) : Json(eqs.delta)},
              {"r0_derivation", eqs.r0},
              {"r1_derivation", eqs.r1},
              {"residuals_ok", eqs.residuals_ok}};
}

Json to_json(const CertificateReport& r) {
  return Json{{"name", r.name},
              {"passed", r.passed},
              {"worst_violation", r.worst_violation},
              {"worst_time", r.worst_time},
              {"tolerance", r.tolerance},
              {"notes", r.notes}};
}

Json to_json(const Classification& c) {
  return Json{{"attractor", std::string(to_string(c.attractor))}, {"distance", c.distance}, {"oscillation", c.oscillation}};
}

Json to_json(const DelayKernel& kernel) { return kernel_to_json(kernel); }

std::string render_svg(const Trajectory& traj, const std::string& title) {
  constexpr double kWidth = 800, kPanel = 150, kLeft = 70, kRight = 20, kTop = 30, kGap = 20;
  constexpr std::size_t kMaxPoints = 2000;
  const std::size_t stride = std::max<std::size_t>(1, traj.size() / kMaxPoints);
  const double height = kTop + 5 * (kPanel + kGap);
  const double t_end = std::max(traj.t_end(), std::numeric_limits<double>::min());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  for (Eigen::Index k = 0; k < 5; ++k) {
    double lo = traj.state(0)[k], hi = lo;
    for (const auto& s : traj.states()) {
      lo = std::min(lo, s[k]);
      hi = std::max(hi, s[k]);
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double top = kTop + static_cast<double>(k) * (kPanel + kGap);
    const double w = kWidth - kLeft - kRight;
    svg << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << kPanel
        << "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg << "<text x=\"10\" y=\"" << top + kPanel / 2 << "\" font-family=\"sans-serif\" font-size=\"14\">"
        << kComponentNames[static_cast<std::size_t>(k)] << "</text>\n";
    svg << "<text x=\"" << kLeft - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\" font-size=\"9\">"
        << format_number(hi).substr(0, 10) << "</text>\n";
    svg << "<text x=\"" << kLeft - 4 << "\" y=\"" << top + kPanel << "\" text-anchor=\"end\" font-size=\"9\">"
        << format_number(lo).substr(0, 10) << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < traj.size(); i += stride) {
      const double px = kLeft + w * traj.time(i) / t_end;
      const double py = top + kPanel * (hi - traj.state(i)[k]) / (hi - lo);
      svg << format_number(std::round(px * 100) / 100) << ',' << format_number(std::round(py * 100) / 100) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "<text x=\"" << kWidth - kRight << "\" y=\"" << height - 4 << "\" text-anchor=\"end\" font-size=\"10\">t = "
      << format_number(traj.t_end()) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::ConfigError, "failed writing " + path.string());
}

}  // namespace vidde
