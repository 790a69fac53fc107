#pragma once

// Closed-form Ricci eigenvalues against the finite-difference oracle on
// random analytic profiles.

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "ewb/bundle_model.hpp"
#include "ewb/closed_form.hpp"
#include "ewb/geometry_oracle.hpp"

namespace ewb {

/// f = sin(t)(1 + alpha t), g = beta + gamma cos(t) + kappa t^2 on (0, pi),
/// with exact derivatives.
struct AnalyticProfile {
  double alpha = 0.0;
  double beta = 1.0;
  double gamma = 0.0;
  double kappa = 0.0;

  ProfileFunctions functions() const;
  ProfilePoint point(double t) const;

  static AnalyticProfile random(std::uint64_t seed);
};

struct EquivalenceOptions {
  int profiles = 5;
  int points = 20;
  std::uint64_t seed = 20240611;
  double tol = 1e-6;
  FdSteps steps;
};

struct EquivalenceSample {
  int profile = 0;
  PatchPoint at;
  EigenTriple closed;
  LabeledEigenvalues oracle;
  /// |oracle - closed| / max(|closed|, 1) for lambda0, lambda1, lambda2.
  std::array<double, 3> rel_err{};
  bool failed = false;
};

struct EquivalenceReport {
  std::vector<EquivalenceSample> samples;
  std::array<double, 3> max_rel_err{};
  double max_eigvec_residual = 0.0;
  int failures = 0;

  bool passed(double tol) const;
};

EquivalenceReport oracle_equivalence_serial(const BundleSpec& spec, const EquivalenceOptions& opts);
/// Same samples as the serial version, evaluated by OpenMP threads.
EquivalenceReport oracle_equivalence(const BundleSpec& spec, const EquivalenceOptions& opts);

nlohmann::json to_json(const EquivalenceReport& r, double tol);

}  // namespace ewb
