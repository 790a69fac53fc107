#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "ewb/bvp_solver.hpp"
#include "ewb/cli.hpp"
#include "ewb/closed_form.hpp"
#include "ewb/equivalence.hpp"
#include "ewb/sweep.hpp"

namespace ewb::cli {

namespace {

namespace fs = std::filesystem;

fs::path prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) throw ConfigError("output directory '" + cfg.out_dir + "' is not writable");
  return fs::path(cfg.out_dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_eigen_csv(const fs::path& path, const ProfileJet& jet, const BundleSpec& spec) {
  const auto field = eigen_field_serial(jet, spec);
  std::ostringstream os;
  os << "t,lambda0,lambda1,lambda2\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < jet.grid.size(); ++i) {
    const auto& e = field[static_cast<std::size_t>(i)];
    os << jet.grid.nodes[i] << ',' << e.lambda0 << ',' << e.lambda1 << ',' << e.lambda2 << '\n';
  }
  write_text(path, os.str());
}

/// The computation inputs only; output paths do not belong in a certificate.
nlohmann::json computation_config(const RunConfig& cfg) {
  nlohmann::json j = config_json(cfg);
  j.erase("out");
  j.erase("certificate");
  return j;
}

nlohmann::json critical_json(const CriticalPointReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) checks.push_back(to_json(c));
  return {{"t0", rep.t0}, {"passed", rep.passed()}, {"checks", checks}};
}

void list_failures(std::ostream& err, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.passed) err << "  FAILED " << c.name << ": value " << c.value << " (tolerance " << c.tolerance << ")\n";
}

}  // namespace

int run_check_formulas(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.spec.n_complex != 2 || cfg.spec.epsilon != BaseSign::Positive)
    throw ConfigError("check-formulas compares against the coordinate oracle, which needs n = 2 and epsilon = 1");
  const fs::path dir = prepare_out_dir(cfg);
  EquivalenceOptions eo;
  eo.profiles = cfg.profiles;
  eo.points = cfg.points;
  eo.seed = cfg.seed;
  eo.tol = cfg.tol;
  const EquivalenceReport rep = oracle_equivalence_serial(cfg.spec, eo);
  nlohmann::json j;
  j["command"] = "check-formulas";
  j["config"] = config_json(cfg);
  j["spec"] = to_json(cfg.spec);
  j["report"] = to_json(rep, cfg.tol);
  const bool ok = rep.passed(cfg.tol);
  j["passed"] = ok;
  write_json(dir / "check_formulas.json", j);

  nlohmann::json summary = {{"command", "check-formulas"},
                            {"passed", ok},
                            {"max_rel_err", j["report"]["max_rel_err"]},
                            {"tolerance", cfg.tol},
                            {"report", (dir / "check_formulas.json").string()}};
  out << summary.dump(2) << "\n";
  err << "check-formulas: " << rep.samples.size() << " samples, max relative error " << rep.max_rel_err[0] << ", "
      << rep.max_rel_err[1] << ", " << rep.max_rel_err[2] << (ok ? " (pass)" : " (exceeds tolerance)") << "\n";
  return ok ? kSuccess : kFailure;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = prepare_out_dir(cfg);
  SolveOptions so;
  so.tol = cfg.tol;
  so.grid_size = cfg.grid_size;
  so.shot.g2 = cfg.g2;
  so.verify.seed = cfg.seed;

  auto emit = [&](const SolutionProfile& sol, bool certified) {
    nlohmann::json cert = certificate_json(sol);
    cert["config"] = computation_config(cfg);
    if (certified) cert["critical_point"] = critical_json(critical_point_check(sol));
    write_json(dir / "certificate.json", cert);
    std::ofstream csv(dir / "profile.csv", std::ios::binary);
    write_jet_csv(csv, sol.jet);
    write_eigen_csv(dir / "eigenvalues.csv", sol.jet, sol.spec);
    nlohmann::json summary = {{"command", "solve"},
                              {"certified", certified},
                              {"a", sol.a},
                              {"C_gap", sol.C_gap},
                              {"L", sol.L},
                              {"failed_checks", sol.certificate.failed_names()},
                              {"certificate", (dir / "certificate.json").string()},
                              {"profile", (dir / "profile.csv").string()},
                              {"eigenvalues", (dir / "eigenvalues.csv").string()}};
    out << summary.dump(2) << "\n";
  };

  try {
    const SolutionProfile sol = solve(cfg.spec, cfg.a0, cfg.c_gap, so);
    emit(sol, true);
    err << "solve: certified solution a=" << sol.a << " C=" << sol.C_gap << " L=" << sol.L << "\n";
    return kSuccess;
  } catch (const CertificateFailed& e) {
    emit(e.profile(), false);
    err << "solve: converged but " << e.what() << "\n";
    list_failures(err, e.profile().certificate.checks);
    return kFailure;
  } catch (const NoConvergence& e) {
    nlohmann::json j = {{"command", "solve"},
                        {"certified", false},
                        {"error", "no-convergence"},
                        {"message", e.what()},
                        {"spec", to_json(cfg.spec)},
                        {"config", computation_config(cfg)},
                        {"solver", e.report()}};
    write_json(dir / "solve_report.json", j);
    out << nlohmann::json{{"command", "solve"},
                          {"certified", false},
                          {"error", "no-convergence"},
                          {"report", (dir / "solve_report.json").string()}}
               .dump(2)
        << "\n";
    err << "solve: no root found: " << e.what() << "\n";
    return kFailure;
  }
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SweepConfig sc;
  sc.spec = cfg.spec;
  sc.a_min = cfg.a_min;
  sc.a_max = cfg.a_max;
  sc.c_min = cfg.c_min;
  sc.c_max = cfg.c_max;
  sc.cells = cfg.cells;
  sc.shot.g2 = cfg.g2;
  try {
    validate(sc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = prepare_out_dir(cfg);
  const SweepResult res = sweep(sc);

  std::ostringstream csv;
  write_sweep_csv(csv, res);
  write_text(dir / "sweep.csv", csv.str());

  std::map<std::string, int> outcomes;
  for (const auto& c : res.cells) outcomes[c.failure.empty() ? "returned" : c.failure]++;
  nlohmann::json brackets = nlohmann::json::array();
  for (const auto& b : res.brackets) brackets.push_back(to_json(b));
  nlohmann::json j = {{"command", "sweep"},         {"config", config_json(cfg)},
                      {"spec", to_json(cfg.spec)},  {"cells", cfg.cells * cfg.cells},
                      {"outcomes", outcomes},       {"roots_flagged", res.brackets.size()},
                      {"brackets", brackets},       {"landscape", (dir / "sweep.csv").string()}};
  write_json(dir / "sweep.json", j);
  out << nlohmann::json{{"command", "sweep"},
                        {"roots_flagged", res.brackets.size()},
                        {"report", (dir / "sweep.json").string()},
                        {"landscape", (dir / "sweep.csv").string()}}
             .dump(2)
      << "\n";
  err << "sweep: " << res.cells.size() << " cells, " << res.brackets.size() << " sign-change brackets\n";
  return kSuccess;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string path = cfg.certificate.empty() ? (fs::path(cfg.out_dir) / "certificate.json").string()
                                                   : cfg.certificate;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read certificate '" + path + "'");
  nlohmann::json stored;
  try {
    in >> stored;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("certificate '" + path + "' is not valid JSON: " + e.what());
  }
  const fs::path dir = prepare_out_dir(cfg);

  nlohmann::json report = {{"command", "verify"}, {"certificate", path}, {"config", config_json(cfg)}};
  std::vector<CheckResult> checks;
  bool ok = false;
  try {
    SolutionProfile sol = profile_from_certificate(stored);
    sol.certificate = verify_profile(sol, sol.options.verify);
    const Certificate& cert = sol.certificate;
    checks = cert.checks;
    report["diagnostics"] = cert.diagnostics;
    report["grid_nodes"] = sol.jet.grid.size();
    if (cert.passed()) {
      const CriticalPointReport cp = critical_point_check(sol);
      report["critical_point"] = critical_json(cp);
      checks.insert(checks.end(), cp.checks.begin(), cp.checks.end());
    }
    ok = cert.passed() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  } catch (const ProfileError& e) {
    checks.push_back({"profile-load", std::numeric_limits<double>::quiet_NaN(), 0.0, false, e.what()});
  } catch (const SpecRejected& e) {
    throw ConfigError(std::string("certificate bundle is invalid: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("certificate '" + path + "' is missing fields: " + e.what());
  }

  nlohmann::json cj = nlohmann::json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    cj.push_back(to_json(c));
    if (!c.passed) failed.push_back(c.name);
  }
  report["checks"] = cj;
  report["failed"] = failed;
  report["passed"] = ok;
  write_json(dir / "verify.json", report);
  out << nlohmann::json{{"command", "verify"}, {"passed", ok}, {"failed", failed}, {"report", (dir / "verify.json").string()}}
             .dump(2)
      << "\n";
  if (ok)
    err << "verify: all " << checks.size() << " checks passed\n";
  else {
    err << "verify: " << failed.size() << " check(s) failed\n";
    list_failures(err, checks);
  }
  return ok ? kSuccess : kFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Einstein-Weyl workbench for the metric dt^2 + f^2 theta^2 + g^2 h", "ewbench"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string config_path;
  };
  std::map<std::string, Sub> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check-formulas", "compare closed-form Ricci eigenvalues with the finite-difference oracle"},
      {"solve", "shoot for a certified Einstein-Weyl profile"},
      {"sweep", "scan the shooting residual over a logarithmic (a, C) grid"},
      {"verify", "re-verify a stored certificate"}};
  for (const auto& [name, help] : commands) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.app->add_option("--config", s.config_path, "flat key = value config file");
    for (const auto& key : known_keys()) s.app->add_option("--" + key, s.values[key], "overrides config key " + key);
    if (name == "verify") s.app->add_option("certificate_path", s.values["certificate"], "certificate JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      std::map<std::string, std::string> overrides;
      for (const auto& key : known_keys()) {
        const bool given = key == "certificate" && name == "verify"
                               ? (s.app->count("--certificate") > 0 || s.app->count("certificate_path") > 0)
                               : s.app->count("--" + key) > 0;
        if (given) overrides[key] = s.values[key];
      }
      const auto file_values = s.config_path.empty() ? std::map<std::string, std::string>{}
                                                     : load_config_file(s.config_path);
      const RunConfig cfg = build_run_config(name, file_values, overrides);
      if (name == "check-formulas") return run_check_formulas(cfg, out, err);
      if (name == "solve") return run_solve(cfg, out, err);
      if (name == "sweep") return run_sweep(cfg, out, err);
      return run_verify(cfg, out, err);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return kUsage;
}

}  // namespace ewb::cli
