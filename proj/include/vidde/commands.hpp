#ifndef VIDDE_COMMANDS_HPP
#define VIDDE_COMMANDS_HPP

// Subcommands of the command-line tool, callable without a process boundary.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vidde/io.hpp"

namespace vidde {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitCertificate = 2, kExitNumerical = 3 };

/// Thresholds in both modes plus the equilibria.
Json analyze(const ModelParameters& params, const KernelPair& kernels);

/// One integrated and certified run.
struct RunResult {
  SurvivalFactors factors;
  EquilibriumSet equilibria;
  std::optional<Trajectory> trajectory;
  Classification classification;
  std::vector<CertificateReport> certificates;
  Json summary;

  bool certificates_passed() const;
};

/// Integrates, classifies, and checks boundedness plus the Lyapunov
/// functional of the observed attractor (of the derivation-mode regime when
/// the run did not settle).
RunResult run_and_certify(const RunConfig& config);

/// Monitor columns: the regime functional and the boundedness functional.
Monitors compute_monitors(const RunConfig& config, const RunResult& run);

struct ReproduceOptions {
  std::optional<double> dt;
  std::optional<double> t_end;
  bool svg = false;
  unsigned threads = 0;
};

struct ReproduceOutcome {
  std::vector<std::filesystem::path> files;
  Json summary;
  bool certificates_passed = true;
};

/// Every Phi x lags combination of a registered scenario: one CSV per run and
/// `<name>_summary.json`.
ReproduceOutcome reproduce(const std::string& name, const std::filesystem::path& out_dir,
                           const ReproduceOptions& options = {});

/// Entry point of the `vidde` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vidde

#endif  // VIDDE_COMMANDS_HPP
