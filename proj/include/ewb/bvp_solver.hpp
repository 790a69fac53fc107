#pragma once

// Shooting solver for the standard-metric Einstein-Weyl conditions on the
// ansatz dt^2 + f^2 theta^2 + g^2 h.
//
// Writing d = 2(n-1), B = s^2 f^2 / (4 g^4) and X = f'g'/(fg), the two
// conditions lambda0 = lambda2 and lambda0 - lambda1 = C^2 f^2 are linear in
// (f'', g''). The second contains g'' but not f'':
//   g'' = -(g/d) C^2 f^2 - g B + g X.
// Substituting into the first gives
//   f'' = f [ -(d-1) g''/g + 2B + X - 2 eps/g^2 + (d-1) g'^2/g^2 ].
//
// Near the axes f -> 0 and these are 0/0 forms. Integration therefore uses
// w = g'/f, for which
//   w' = -f [ (g/d) C^2 + s^2/(4 g^3) ],  g'' = w' f + w f',  X = f' w / g,
// and every term is regular at f = 0.
//
// The axis series f = t + f3 t^3 + f5 t^5, g = a + g2 t^2 + g4 t^4 leaves g2
// free (the g-equation is resonant at that order), and (a, g2, C) has the
// scaling symmetry (mu a, g2/mu, C/mu^2). The solver fixes the scale through
// g2, pins C, and shoots on a.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ewb/bundle_model.hpp"
#include "ewb/certificate.hpp"
#include "ewb/geometry_oracle.hpp"
#include "ewb/integrator.hpp"
#include "ewb/profiles.hpp"

namespace ewb {

inline constexpr double kDefaultAxisG2 = 0.1;
inline constexpr double kDegenerateThreshold = 1e-12;

struct ShootingState {
  double t = 0.0;
  double f = 0.0;
  double fp = 0.0;
  double g = 0.0;
  double gp = 0.0;
};

struct StateDerivatives {
  double fp = 0.0;
  double fpp = 0.0;
  double gp = 0.0;
  double gpp = 0.0;
};

class DegenerateState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeriesDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(StopReason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  StopReason reason() const { return reason_; }

 private:
  StopReason reason_;
};

class NotCertified : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (f', f'', g', g'') from the two conditions. Throws DegenerateState when
/// f or g is below kDegenerateThreshold.
StateDerivatives ode_rhs(const ShootingState& state, const BundleSpec& spec, double C_gap);

/// Regularized state (f, f', g, w = g'/f) and its derivative.
State4 regularized_rhs(const State4& y, const BundleSpec& spec, double C_gap);
FirstOrderSystem regularized_system(const BundleSpec& spec, double C_gap);
State4 to_regularized(const ShootingState& s);
ShootingState from_regularized(double t, const State4& y);
/// Derivatives of a regularized state, valid on the axes as well.
StateDerivatives regularized_derivatives(const State4& y, const BundleSpec& spec, double C_gap);

struct SeriesCoefficients {
  double a = 0.0;
  double g2 = 0.0;
  double f3 = 0.0;
  double g4 = 0.0;
  double f5 = 0.0;
};

/// Fits f3, g4, f5 for given (a, g2, C) by a small Newton solve on the
/// residual of ode_rhs along the truncated series.
SeriesCoefficients series_coefficients(double a, double g2, double C_gap, const BundleSpec& spec);
ShootingState series_state(const SeriesCoefficients& c, double t);
ShootingState series_start(double a, double C_gap, const BundleSpec& spec, double delta, double g2 = kDefaultAxisG2);

/// Series handoff offset 1e-3 * L_guess with L_guess = pi * a.
double default_delta(double a);

/// |series(delta) - integrate(series(delta/2) -> delta)|, max over state components.
double series_consistency(double a, double C_gap, const BundleSpec& spec, double delta, double g2,
                          const IntegratorOptions& opts = {});

struct EndState {
  double L = 0.0;
  ShootingState end;
  long steps = 0;
};

/// Integrates until f returns to zero. Throws IntegrationFailure (NoReturn,
/// BlowUp, ...) otherwise.
EndState integrate_until_f_zero(const ShootingState& start, const BundleSpec& spec, double C_gap,
                                const IntegratorOptions& opts = {});

/// Test hook: same event logic for an arbitrary second-order system
/// (f, f', g, g') -> (f'', g'').
using SecondOrderRhs = std::function<std::pair<double, double>(const ShootingState&)>;
EndState integrate_until_f_zero(const ShootingState& start, const SecondOrderRhs& rhs,
                                const IntegratorOptions& opts = {});

struct ShotOptions {
  double g2 = kDefaultAxisG2;
  double delta = 0.0;  // 0 selects default_delta(a)
  IntegratorOptions integrator;
};

struct ShootingResidual {
  std::vector<std::string> labels;
  Eigen::VectorXd values;
  std::string failure;  // empty when the shot reached f = 0
  double L = 0.0;

  bool ok() const { return failure.empty(); }
  /// Max-norm, +inf on failure.
  double norm() const;
};

/// SphereBundle: (f'(L) + 1, g'(L)). ProjectiveSpace: (f'(L) + 1, g(L), g'(L) + 1).
/// Integration failures give NaN components and a failure tag.
ShootingResidual shooting_residual(double a, double C_gap, const BundleSpec& spec, const ShotOptions& opts = {});

struct SolveOptions {
  ShotOptions shot;
  double tol = 1e-10;
  int max_iterations = 30;
  double min_damping = 1e-8;
  int grid_size = kDefaultNodeCount;
  VerifyOptions verify;
};

nlohmann::json to_json(const SolveOptions& o);

struct SolutionProfile {
  BundleSpec spec;
  double a = 0.0;
  double C_gap = 0.0;
  double g2 = kDefaultAxisG2;
  double delta = 0.0;
  double L = 0.0;
  ShootingState anchor;  // integrated state at t = L/2, seeds the oracle continuation
  ProfileJet jet;
  Certificate certificate;
  nlohmann::json solver_report = nlohmann::json::object();
  SolveOptions options;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, nlohmann::json report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const nlohmann::json& report() const { return report_; }

 private:
  nlohmann::json report_;
};

class CertificateFailed : public std::runtime_error {
 public:
  CertificateFailed(const std::string& what, SolutionProfile profile)
      : std::runtime_error(what), profile_(std::move(profile)) {}
  const SolutionProfile& profile() const { return profile_; }

 private:
  SolutionProfile profile_;
};

/// Damped Gauss-Newton on a with C_gap and g2 pinned, then resampling on a
/// spectral grid and full verification. Throws NoConvergence or
/// CertificateFailed.
SolutionProfile solve(const BundleSpec& spec, double a0, double C_gap, const SolveOptions& opts = {});

/// Builds the profile on a grid of the given size from converged parameters.
SolutionProfile build_profile(const BundleSpec& spec, double a, double C_gap, const SolveOptions& opts,
                              double L_hint);

/// Smooth profile functions through the anchor state: each evaluation
/// integrates the regularized system from the anchor with a fixed number of
/// RK4 steps, so the result is an analytic function of t.
ProfileFunctions continuation_functions(const BundleSpec& spec, double C_gap, const ShootingState& anchor,
                                        int steps = 600);
/// Full state (f, f', g, g') along the continuation.
ShootingState continuation_state(const BundleSpec& spec, double C_gap, const ShootingState& anchor, double t,
                                 int steps = 600);

/// Recomputes every certificate check from the stored profile.
Certificate verify_profile(const SolutionProfile& profile, const VerifyOptions& opts);

struct CriticalPointReport {
  double t0 = 0.0;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// At the maximum t0 of f: f'(t0) = 0, f''(t0) <= 0, lambda1(t0) > 0 and
/// -d g''/g = d s^2 f^2/(4 g^4) + C^2 f^2. Second derivatives come from
/// spectral differentiation of the stored f and g columns.
CriticalPointReport critical_point_check(const SolutionProfile& sol, double tol = 1e-6);

nlohmann::json certificate_json(const SolutionProfile& sol);
SolutionProfile profile_from_certificate(const nlohmann::json& j);

}  // namespace ewb
