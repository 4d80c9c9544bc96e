#ifndef VIDDE_IO_HPP
#define VIDDE_IO_HPP

// Configuration files, trajectory/sweep CSV, summary JSON and SVG plots.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidde/analysis.hpp"
#include "vidde/certificates.hpp"
#include "vidde/experiments.hpp"
#include "vidde/integrator.hpp"

namespace vidde {

using Json = nlohmann::json;

/// Everything needed for one run.
struct RunConfig {
  ModelParameters params;
  KernelPair kernels{DelayKernel::dirac(0.0), DelayKernel::dirac(0.0)};
  InitialHistory history = InitialHistory::constant(State::Zero());
  IntegrationConfig integration;
  R0Mode mode = R0Mode::Derivation;
};

/// Parses the configuration schema:
///   {"parameters": {16 named numbers},
///    "kernel1"/"kernel2": {"type":"dirac","tau":t}
///                       | {"type":"tabulated","nodes":[..],"weights":[..],"tail_mass":m?}
///                       | {"type":"erlang","shape":n,"rate":r,"step":h},
///    "history": {"type":"constant","value":[x,y,c,v,z]}
///             | {"type":"tabulated","times":[..],"states":[[..],..]},
///    "integration": {"dt":..,"t_end":..,"kernel_truncation_eps":..,"interpolation":"hermite"|"linear"},
///    "mode": "derivation"|"paper"}
/// Throws Error(ConfigError) or the validation error of the offending part.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);

Json to_json(const RunConfig& config);

/// Shortest-free, locale-independent rendering with 17 significant digits.
std::string format_number(double value);

R0Mode parse_mode(std::string_view text);
std::string_view to_string(R0Mode mode);

/// Columns t,x,y,c,v,z; with monitors also L,B (L empty where not evaluable).
struct Monitors {
  std::vector<std::optional<double>> lyapunov;
  std::vector<double> bound;
};
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Monitors* monitors = nullptr);

void write_sweep_csv(std::ostream& out, const std::vector<RegimeCell>& cells);

Json to_json(const State& state);
Json to_json(const ReproductionNumbers& rn);
Json to_json(const EquilibriumSet& eqs);
Json to_json(const CertificateReport& report);
Json to_json(const Classification& c);
Json to_json(const DelayKernel& kernel);

/// One SVG with a stacked panel per state component.
std::string render_svg(const Trajectory& traj, const std::string& title);

/// Writes `contents` to `path` byte-for-byte.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace vidde

#endif  // VIDDE_IO_HPP
