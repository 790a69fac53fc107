#pragma once

// Dormand-Prince 5(4) integrator for four-component first-order systems, with
// a terminal event on the first component crossing zero from above.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ewb {

using State4 = Eigen::Vector4d;

struct FirstOrderSystem {
  std::function<State4(double t, const State4& y)> rhs;
  /// Optional admissibility test; integration stops with Invalid when it fails.
  std::function<bool(double t, const State4& y)> admissible;
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_max = 100.0;
  double blowup = 1e8;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  long max_steps = 2'000'000;
  double event_tol = 1e-12;
};

enum class StopReason { Event, ReachedEnd, NoReturn, BlowUp, Invalid, StepUnderflow, NonFinite };

std::string to_string(StopReason r);

struct IntegrationResult {
  StopReason reason = StopReason::ReachedEnd;
  double t = 0.0;
  State4 y = State4::Zero();
  /// States at the requested output times, in order; only those reached.
  std::vector<State4> outputs;
  long steps = 0;
};

/// Integrates from (t0, y0). With stop_on_event the run ends at the first
/// downward zero of y[0], polished on the step map to |y[0]| < event_tol;
/// otherwise it ends at t_end. Output times must be increasing and lie in
/// (t0, t_end]; steps are clipped so that each is hit exactly.
IntegrationResult integrate(const FirstOrderSystem& system, double t0, const State4& y0, const IntegratorOptions& opts,
                            bool stop_on_event, double t_end = 0.0, const std::vector<double>& output_times = {});

}  // namespace ewb
