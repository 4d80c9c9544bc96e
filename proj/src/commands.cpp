#include "vidde/commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "parallel.hpp"

namespace vidde {

namespace {

[[noreturn]] void flag_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) flag_error(what + ": cannot parse '" + std::string(text) + "'");
  return value;
}

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(parse_double(std::string_view(text).substr(start, pos - start), what));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_range(const std::string& text, const std::string& what) {
  const auto parts = split_numbers(text, ':', what);
  if (parts.size() != 3) flag_error(what + " must be lo:hi:step");
  return make_grid(parts[0], parts[1], parts[2]);
}

Json factors_json(const SurvivalFactors& f) { return Json{{"a1", f.a1}, {"a2", f.a2}}; }

Json regime_json(const ReproductionNumbers& derivation, const ReproductionNumbers& paper) {
  const auto d = predict_regime(derivation.r0, derivation.r1);
  const auto q = predict_regime(paper.r0, paper.r1);
  return Json{{"derivation", std::string(to_string(d))}, {"paper", std::string(to_string(q))}, {"disagree", d != q}};
}

std::optional<LyapunovKind> functional_for(const Classification& c, const EquilibriumSet& eqs) {
  switch (c.attractor) {
    case Attractor::E0: return LyapunovKind::L0;
    case Attractor::E1: return LyapunovKind::L1;
    case Attractor::E2: return LyapunovKind::L2;
    default: return lyapunov_for_regime(eqs);
  }
}

CertificateReport lyapunov_certificate(LyapunovKind kind, const RunConfig& cfg, const RunResult& run) {
  const auto series = lyapunov_series(kind, cfg.params, run.factors, cfg.kernels, *run.trajectory, run.equilibria);
  auto report = check_monotone_decrease(series.times, series.values);
  report.name = "lyapunov_" + std::string(to_string(kind));
  if (series.values.size() < 2) {
    report.passed = false;
    report.notes = "functional not evaluable along the trajectory";
  } else if (series.not_evaluable > 0) {
    report.notes = std::to_string(series.not_evaluable) + " nodes not evaluable and skipped";
  }
  return report;
}

Json integration_json(const IntegrationConfig& cfg, double truncated_mass) {
  return Json{{"dt", cfg.dt},
              {"t_end", cfg.t_end},
              {"kernel_truncation_eps", cfg.kernel_truncation_eps},
              {"truncated_mass", truncated_mass},
              {"interpolation", cfg.interpolation == Interpolation::Linear ? "linear" : "hermite"}};
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj, const Monitors* monitors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) flag_error("cannot write " + path.string());
  write_trajectory_csv(out, traj, monitors);
  if (!out) flag_error("failed writing " + path.string());
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

RunConfig scenario_config(const std::string& name, std::size_t phi, double tau1, double tau2) {
  const auto& sc = scenario(name);
  if (phi < 1 || phi > sc.histories.size()) flag_error("--phi must be 1, 2 or 3");
  RunConfig cfg;
  cfg.params = sc.params;
  cfg.kernels = dirac_kernels(tau1, tau2);
  cfg.history = InitialHistory::constant(sc.histories[phi - 1]);
  cfg.integration.t_end = sc.default_t_end;
  return cfg;
}

}  // namespace

Json analyze(const ModelParameters& params, const KernelPair& kernels) {
  const auto f = survival_factors(params, kernels.infection, kernels.production);
  const auto derivation = reproduction_numbers(params, f, R0Mode::Derivation);
  const auto paper = reproduction_numbers(params, f, R0Mode::PaperPrinted);
  return Json{{"parameters_fingerprint", parameter_fingerprint(params)},
              {"survival_factors", factors_json(f)},
              {"reproduction_numbers", {{"derivation", to_json(derivation)}, {"paper", to_json(paper)}}},
              {"regime", regime_json(derivation, paper)},
              {"equilibria", to_json(equilibria(params, f))}};
}

bool RunResult::certificates_passed() const {
  for (const auto& c : certificates)
    if (!c.passed) return false;
  return true;
}

RunResult run_and_certify(const RunConfig& cfg) {
  RunResult run;
  run.factors = survival_factors(cfg.params, cfg.kernels.infection, cfg.kernels.production);
  run.equilibria = equilibria(cfg.params, run.factors);
  run.trajectory.emplace(integrate(cfg.params, cfg.kernels, cfg.history, cfg.integration));
  run.classification = classify(*run.trajectory, run.equilibria);

  run.certificates.push_back(check_boundedness(cfg.params, run.factors, cfg.kernels, *run.trajectory));
  if (const auto kind = functional_for(run.classification, run.equilibria))
    run.certificates.push_back(lyapunov_certificate(*kind, cfg, run));

  const auto derivation = reproduction_numbers(cfg.params, run.factors, R0Mode::Derivation);
  const auto paper = reproduction_numbers(cfg.params, run.factors, R0Mode::PaperPrinted);
  Json certs = Json::array();
  for (const auto& c : run.certificates) certs.push_back(to_json(c));
  const auto cfg_json = to_json(cfg);
  run.summary = Json{{"parameters_fingerprint", parameter_fingerprint(cfg.params)},
                     {"parameters", cfg_json["parameters"]},
                     {"kernels", {{"kernel1", cfg_json["kernel1"]}, {"kernel2", cfg_json["kernel2"]}}},
                     {"history", cfg_json["history"]},
                     {"survival_factors", factors_json(run.factors)},
                     {"reproduction_numbers", {{"derivation", to_json(derivation)}, {"paper", to_json(paper)}}},
                     {"reported_mode", std::string(to_string(cfg.mode))},
                     {"regime", regime_json(derivation, paper)},
                     {"equilibria", to_json(run.equilibria)},
                     {"classification", to_json(run.classification)},
                     {"certificates", certs},
                     {"integration", integration_json(cfg.integration, run.trajectory->truncated_mass())}};
  return run;
}

Monitors compute_monitors(const RunConfig& cfg, const RunResult& run) {
  const auto& traj = *run.trajectory;
  Monitors m;
  m.lyapunov.assign(traj.size(), std::nullopt);
  m.bound.resize(traj.size());
  if (const auto kind = functional_for(run.classification, run.equilibria)) {
    const auto series = lyapunov_series(*kind, cfg.params, run.factors, cfg.kernels, traj, run.equilibria);
    for (std::size_t i = 0; i < series.indices.size(); ++i) m.lyapunov[series.indices[i]] = series.values[i];
  }
  for (std::size_t i = 0; i < traj.size(); ++i)
    m.bound[i] = boundedness_functional(cfg.params, cfg.kernels, traj, traj.time(i));
  return m;
}

ReproduceOutcome reproduce(const std::string& name, const std::filesystem::path& out_dir,
                           const ReproduceOptions& options) {
  const auto& sc = scenario(name);
  std::filesystem::create_directories(out_dir);

  // Phi_1..Phi_3 at the first lag pair, then Phi_1 at the remaining pairs.
  struct Job {
    std::size_t phi;
    std::size_t lags;
    std::vector<std::string> files;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 1; i <= sc.histories.size(); ++i) jobs.push_back({i, 1, {}});
  for (std::size_t j = 1; j <= sc.lag_pairs.size(); ++j) {
    if (j > 1) jobs.push_back({1, j, {}});
    jobs[j == 1 ? 0 : jobs.size() - 1].files.push_back(name + "_delay_phi1_lags" + std::to_string(j) + ".csv");
  }
  for (std::size_t i = 1; i <= sc.histories.size(); ++i)
    jobs[i - 1].files.insert(jobs[i - 1].files.begin(), name + "_init_phi" + std::to_string(i) + "_lags1.csv");

  std::vector<RunConfig> configs;
  for (const auto& job : jobs) {
    const auto [tau1, tau2] = sc.lag_pairs[job.lags - 1];
    auto cfg = scenario_config(name, job.phi, tau1, tau2);
    if (options.dt) cfg.integration.dt = *options.dt;
    if (options.t_end) cfg.integration.t_end = *options.t_end;
    step_count(cfg.integration.dt, cfg.integration.t_end);
    configs.push_back(std::move(cfg));
  }

  std::vector<Json> summaries(jobs.size());
  std::vector<char> passed(jobs.size(), 0);
  std::vector<std::string> attractors(jobs.size());
  detail::parallel_for(jobs.size(), options.threads, [&](std::size_t r) {
    auto run = run_and_certify(configs[r]);
    for (const auto& file : jobs[r].files) write_csv(out_dir / file, *run.trajectory, nullptr);
    if (options.svg) {
      const auto stem = std::filesystem::path(jobs[r].files.front()).stem().string();
      write_file(out_dir / (stem + ".svg"), render_svg(*run.trajectory, stem));
    }
    passed[r] = run.certificates_passed();
    attractors[r] = std::string(to_string(run.classification.attractor));
    summaries[r] = std::move(run.summary);
  });

  ReproduceOutcome outcome;
  Json runs = Json::array();
  for (std::size_t r = 0; r < jobs.size(); ++r) {
    const auto [tau1, tau2] = sc.lag_pairs[jobs[r].lags - 1];
    runs.push_back(Json{{"files", jobs[r].files},
                        {"phi", jobs[r].phi},
                        {"lags", {tau1, tau2}},
                        {"summary", summaries[r]}});
    outcome.certificates_passed = outcome.certificates_passed && passed[r];
    for (const auto& file : jobs[r].files) outcome.files.push_back(out_dir / file);
  }

  Json per_lags = Json::array();
  bool disagree = false;
  for (const auto& [tau1, tau2] : sc.lag_pairs) {
    auto a = analyze(sc.params, dirac_kernels(tau1, tau2));
    disagree = disagree || a["regime"]["disagree"].get<bool>();
    a["lags"] = {tau1, tau2};
    per_lags.push_back(std::move(a));
  }

  outcome.summary = Json{{"scenario", name},
                         {"runs", runs},
                         {"analysis", per_lags},
                         {"observed", attractors},
                         {"regime_disagreement", disagree},
                         {"certificates_passed", outcome.certificates_passed}};
  const auto summary_path = out_dir / (name + "_summary.json");
  write_file(summary_path, dump(outcome.summary));
  outcome.files.push_back(summary_path);
  return outcome;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed-delay viral infection model with CTL response"};
  app.require_subcommand(1);

  std::string config_path, scenario_name, lags_text, mode_text = "derivation", out_path, out_dir;
  std::string tau1_text, tau2_text;
  std::size_t phi = 1;
  double dt = 0.0, t_end = 0.0;
  bool monitors = false, simulate_cells = false, svg = false;
  unsigned threads = 0;
  const std::vector<std::string> modes{"derivation", "paper"};

  auto* analyze_cmd = app.add_subcommand("analyze", "Reproduction numbers and equilibria");
  auto* an_cfg = analyze_cmd->add_option("--config", config_path, "configuration JSON")->check(CLI::ExistingFile);
  auto* an_sc = analyze_cmd->add_option("--scenario", scenario_name, "E0, E1 or E2")->excludes(an_cfg);
  analyze_cmd->add_option("--lags", lags_text, "tau1,tau2")->needs(an_sc);
  analyze_cmd->add_option("--mode", mode_text, "reported R0/R1 formulas")->check(CLI::IsMember(modes));
  analyze_cmd->add_option("--out", out_path, "also write the JSON here");

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate one run to CSV");
  auto* si_cfg = simulate_cmd->add_option("--config", config_path, "configuration JSON")->check(CLI::ExistingFile);
  auto* si_sc = simulate_cmd->add_option("--scenario", scenario_name, "E0, E1 or E2")->excludes(si_cfg);
  simulate_cmd->add_option("--lags", lags_text, "tau1,tau2")->needs(si_sc);
  simulate_cmd->add_option("--phi", phi, "initial value index 1..3")->needs(si_sc);
  simulate_cmd->add_option("--out", out_path, "trajectory CSV")->required();
  auto* si_dt = simulate_cmd->add_option("--dt", dt, "step size");
  auto* si_te = simulate_cmd->add_option("--t-end", t_end, "horizon");
  simulate_cmd->add_flag("--monitors", monitors, "append L and B columns");

  auto* certify_cmd = app.add_subcommand("certify", "Run all applicable certificates");
  certify_cmd->add_option("--config", config_path, "configuration JSON")->required()->check(CLI::ExistingFile);
  certify_cmd->add_option("--out", out_path, "report JSON")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Regime grid over the two lags");
  auto* sw_cfg = sweep_cmd->add_option("--config", config_path, "configuration JSON")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--scenario", scenario_name, "E0, E1 or E2")->excludes(sw_cfg);
  sweep_cmd->add_option("--tau1", tau1_text, "lo:hi:step")->required();
  sweep_cmd->add_option("--tau2", tau2_text, "lo:hi:step")->required();
  sweep_cmd->add_flag("--simulate", simulate_cells, "integrate each cell and classify");
  sweep_cmd->add_option("--phi", phi, "initial value index 1..3 (scenario only)");
  auto* sw_dt = sweep_cmd->add_option("--dt", dt, "step size");
  auto* sw_te = sweep_cmd->add_option("--t-end", t_end, "horizon");
  sweep_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep_cmd->add_option("--out", out_path, "grid CSV")->required();

  auto* reproduce_cmd = app.add_subcommand("reproduce", "All runs of a registered scenario");
  reproduce_cmd->add_option("name", scenario_name, "E0, E1 or E2")->required();
  reproduce_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  reproduce_cmd->add_flag("--svg", svg, "also render one SVG per run");
  auto* re_dt = reproduce_cmd->add_option("--dt", dt, "step size");
  auto* re_te = reproduce_cmd->add_option("--t-end", t_end, "horizon");
  reproduce_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto lags = [&]() -> std::pair<double, double> {
    if (lags_text.empty()) return scenario(scenario_name).lag_pairs.front();
    const auto v = split_numbers(lags_text, ',', "--lags");
    if (v.size() != 2) flag_error("--lags must be tau1,tau2");
    return {v[0], v[1]};
  };
  auto resolve = [&](CLI::Option* dt_opt, CLI::Option* te_opt) {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (!scenario_name.empty()) {
      const auto [tau1, tau2] = lags();
      cfg = scenario_config(scenario_name, phi, tau1, tau2);
    } else {
      flag_error("either --config or --scenario is required");
    }
    if (dt_opt && dt_opt->count()) cfg.integration.dt = dt;
    if (te_opt && te_opt->count()) cfg.integration.t_end = t_end;
    step_count(cfg.integration.dt, cfg.integration.t_end);
    return cfg;
  };

  try {
    if (*analyze_cmd) {
      const auto cfg = resolve(nullptr, nullptr);
      const auto mode = config_path.empty() || analyze_cmd->count("--mode") ? parse_mode(mode_text) : cfg.mode;
      auto doc = analyze(cfg.params, cfg.kernels);
      doc["mode"] = std::string(to_string(mode));
      doc["r0"] = doc["reproduction_numbers"][std::string(to_string(mode))]["r0"];
      doc["r1"] = doc["reproduction_numbers"][std::string(to_string(mode))]["r1"];
      const auto text = dump(doc);
      out << text;
      if (!out_path.empty()) write_file(out_path, text);
      return kExitOk;
    }
    if (*simulate_cmd) {
      const auto cfg = resolve(si_dt, si_te);
      if (monitors) {
        const auto run = run_and_certify(cfg);
        const auto m = compute_monitors(cfg, run);
        write_csv(out_path, *run.trajectory, &m);
      } else {
        write_csv(out_path, integrate(cfg.params, cfg.kernels, cfg.history, cfg.integration), nullptr);
      }
      return kExitOk;
    }
    if (*certify_cmd) {
      const auto cfg = resolve(nullptr, nullptr);
      auto run = run_and_certify(cfg);
      auto cone = check_cone_sampled(cfg.params, cfg.kernels, 1000);
      run.certificates.insert(run.certificates.begin(), cone);
      run.summary["certificates"].insert(run.summary["certificates"].begin(), to_json(cone));
      run.summary["certificates_passed"] = run.certificates_passed();
      const auto text = dump(run.summary);
      write_file(out_path, text);
      for (const auto& c : run.certificates)
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << format_number(c.worst_violation)
            << " tol=" << format_number(c.tolerance) << '\n';
      out << "classification " << to_string(run.classification.attractor) << '\n';
      return run.certificates_passed() ? kExitOk : kExitCertificate;
    }
    if (*sweep_cmd) {
      SweepOptions options;
      ModelParameters params;
      if (!config_path.empty()) {
        const auto cfg = load_config(config_path);
        params = cfg.params;
        options.integration = cfg.integration;
        if (!cfg.history.is_constant()) flag_error("sweep needs a constant history");
        options.history = cfg.history.states().front();
      } else if (!scenario_name.empty()) {
        const auto& sc = scenario(scenario_name);
        if (phi < 1 || phi > sc.histories.size()) flag_error("--phi must be 1, 2 or 3");
        params = sc.params;
        options.history = sc.histories[phi - 1];
        options.integration.t_end = sc.default_t_end;
      } else {
        flag_error("either --config or --scenario is required");
      }
      if (sw_dt->count()) options.integration.dt = dt;
      if (sw_te->count()) options.integration.t_end = t_end;
      step_count(options.integration.dt, options.integration.t_end);
      options.simulate = simulate_cells;
      options.threads = threads;
      const auto cells = sweep(params, parse_range(tau1_text, "--tau1"), parse_range(tau2_text, "--tau2"), options);
      std::ostringstream csv;
      write_sweep_csv(csv, cells);
      write_file(out_path, csv.str());
      for (const auto& c : cells)
        if (!c.error.empty()) return kExitNumerical;
      return kExitOk;
    }
    if (*reproduce_cmd) {
      ReproduceOptions options;
      if (re_dt->count()) options.dt = dt;
      if (re_te->count()) options.t_end = t_end;
      options.svg = svg;
      options.threads = threads;
      const auto outcome = reproduce(scenario_name, out_dir, options);
      for (const auto& f : outcome.files) out << f.string() << '\n';
      return outcome.certificates_passed ? kExitOk : kExitCertificate;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitConfig;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace vidde
