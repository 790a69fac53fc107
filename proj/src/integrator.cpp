#include "ewb/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace ewb {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Event: return "event";
    case StopReason::ReachedEnd: return "reached-end";
    case StopReason::NoReturn: return "no-return";
    case StopReason::BlowUp: return "blow-up";
    case StopReason::Invalid: return "invalid-state";
    case StopReason::StepUnderflow: return "step-underflow";
    case StopReason::NonFinite: return "non-finite";
  }
  return "unknown";
}

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct Step {
  State4 y;
  State4 err;
};

Step dopri_step(const FirstOrderSystem& sys, double t, const State4& y, const State4& k1, double h) {
  const State4 k2 = sys.rhs(t + c2 * h, y + h * a21 * k1);
  const State4 k3 = sys.rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const State4 k4 = sys.rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State4 k5 = sys.rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State4 k6 = sys.rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const State4 y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State4 k7 = sys.rhs(t + h, y_new);
  const State4 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y_new, err};
}

bool finite(const State4& y) { return y.allFinite(); }

}  // namespace

IntegrationResult integrate(const FirstOrderSystem& sys, double t0, const State4& y0, const IntegratorOptions& opts,
                            bool stop_on_event, double t_end, const std::vector<double>& output_times) {
  IntegrationResult result;
  double t = t0;
  State4 y = y0;
  double h = opts.initial_step;
  const double horizon = stop_on_event ? opts.t_max : t_end;
  std::size_t next_out = 0;

  auto finish = [&](StopReason reason) {
    result.reason = reason;
    result.t = t;
    result.y = y;
    return result;
  };

  State4 k1 = sys.rhs(t, y);
  if (!finite(k1)) return finish(StopReason::NonFinite);

  while (true) {
    if (result.steps >= opts.max_steps) return finish(StopReason::StepUnderflow);
    if (!stop_on_event && t >= t_end) return finish(StopReason::ReachedEnd);
    if (stop_on_event && t >= opts.t_max) return finish(StopReason::NoReturn);

    // Clip so that the next output time (or the end) is hit exactly.
    double target = horizon;
    if (next_out < output_times.size()) target = std::min(target, output_times[next_out]);
    bool clipped = false;
    double h_try = h;
    if (t + h_try >= target) {
      h_try = target - t;
      clipped = true;
    }
    if (h_try < opts.min_step && !clipped) return finish(StopReason::StepUnderflow);

    const Step step = dopri_step(sys, t, y, k1, h_try);
    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(step.y[i]));
      err += (step.err[i] / sc) * (step.err[i] / sc);
    }
    err = std::sqrt(err / 4.0);
    if (!std::isfinite(err)) {
      h = 0.25 * h_try;
      if (h < opts.min_step) return finish(StopReason::NonFinite);
      continue;
    }
    if (err > 1.0) {
      h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < opts.min_step) return finish(StopReason::StepUnderflow);
      continue;
    }
    ++result.steps;

    if (stop_on_event && y[0] > 0.0 && step.y[0] <= 0.0) {
      // Polish the crossing on the step map h -> y(t + h), which is smooth in h.
      double lo = 0.0, hi = h_try;
      double f_lo = y[0], f_hi = step.y[0];
      State4 y_root = step.y;
      double h_root = h_try;
      for (int it = 0; it < 200; ++it) {
        // Illinois-modified regula falsi.
        double hm = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if (!(hm > lo && hm < hi)) hm = 0.5 * (lo + hi);
        const State4 ym = dopri_step(sys, t, y, k1, hm).y;
        y_root = ym;
        h_root = hm;
        if (std::abs(ym[0]) < opts.event_tol || hi - lo < 1e-15 * std::max(1.0, t)) break;
        if (ym[0] > 0.0) {
          lo = hm;
          f_lo = ym[0];
          f_hi *= 0.5;
        } else {
          hi = hm;
          f_hi = ym[0];
          f_lo *= 0.5;
        }
      }
      t += h_root;
      y = y_root;
      while (next_out < output_times.size() && output_times[next_out] <= t) {
        result.outputs.push_back(y);
        ++next_out;
      }
      return finish(StopReason::Event);
    }

    t = clipped ? target : t + h_try;
    y = step.y;
    if (!finite(y)) return finish(StopReason::NonFinite);
    if (y.cwiseAbs().maxCoeff() > opts.blowup) return finish(StopReason::BlowUp);
    if (sys.admissible && !sys.admissible(t, y)) return finish(StopReason::Invalid);
    while (next_out < output_times.size() && output_times[next_out] <= t) {
      result.outputs.push_back(y);
      ++next_out;
    }
    k1 = sys.rhs(t, y);
    if (!finite(k1)) return finish(StopReason::NonFinite);
    // Keep the untruncated step size after an output clip.
    const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h = clipped ? std::max(h, h_try * grow) : h_try * grow;
  }
}

}  // namespace ewb
