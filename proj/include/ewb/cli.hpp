#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewb/bundle_model.hpp"

namespace ewb::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Effective configuration of one command after merging the config file and
/// command-line flags.
struct RunConfig {
  std::string command;
  BundleSpec spec;
  int grid_size = 64;
  double tol = 0.0;  // command default when not given
  std::string out_dir = ".";
  std::uint64_t seed = 20240611;

  double a0 = 1.0;
  double c_gap = 0.3;
  double g2 = 0.1;

  double a_min = 0.1;
  double a_max = 10.0;
  double c_min = 0.01;
  double c_max = 10.0;
  int cells = 40;

  int profiles = 5;
  int points = 20;

  std::string certificate;

  /// Every key with its effective value, echoed into reports.
  std::map<std::string, std::string> effective;
};

/// Keys accepted in config files (flags use the same names with "--").
const std::vector<std::string>& known_keys();

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError for
/// malformed lines and unknown keys.
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Builds the run configuration; `overrides` win over `file_values`.
RunConfig build_run_config(const std::string& command, const std::map<std::string, std::string>& file_values,
                           const std::map<std::string, std::string>& overrides);

nlohmann::json config_json(const RunConfig& cfg);

int run_check_formulas(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ewb::cli
