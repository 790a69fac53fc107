#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ewb {

/// One named verification: passes when value <= tolerance, except for
/// lower-bound checks which pass when value >= -tolerance.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct Certificate {
  std::vector<CheckResult> checks;
  nlohmann::json diagnostics = nlohmann::json::object();

  bool passed() const;
  const CheckResult* find(const std::string& name) const;
  std::vector<std::string> failed_names() const;
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const Certificate& c);

/// Tolerances and sampling for re-verification of a solved profile.
struct VerifyOptions {
  double tol_boundary = 1e-9;
  double tol_gauduchon = 1e-8;
  double tol_gray = 1e-7;
  double tol_order = 1e-9;
  double multiplicity_gap = 1e-6;
  double tol_conformal = 1e-9;
  double tol_jet = 1e-6;
  double tol_anchor = 1e-8;
  double tol_series = 1e-10;
  double tol_oracle_eigen = 1e-6;
  double tol_einstein_weyl = 1e-5;
  double tol_killing = 1e-5;
  double tol_one_one = 1e-6;
  double tol_factor_spread = 1e-4;
  double tol_mean_curvature = 1e-5;
  double tol_bianchi = 1e-4;

  bool oracle = true;
  int oracle_points = 20;
  int killing_points = 10;
  int killing_trials = 50;
  int bianchi_points = 3;
  std::uint64_t seed = 20240611;
};

nlohmann::json to_json(const VerifyOptions& o);
VerifyOptions verify_options_from_json(const nlohmann::json& j);

}  // namespace ewb
