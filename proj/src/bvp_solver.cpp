#include "ewb/bvp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "ewb/closed_form.hpp"

namespace ewb {

namespace {

double horizontal_dim(const BundleSpec& spec) { return 2.0 * (spec.n_complex - 1); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

StateDerivatives ode_rhs(const ShootingState& st, const BundleSpec& spec, double C_gap) {
  if (!(st.f > kDegenerateThreshold) || !(st.g > kDegenerateThreshold)) {
    std::ostringstream os;
    os << "degenerate shooting state at t=" << st.t << " (f=" << st.f << ", g=" << st.g << ")";
    throw DegenerateState(os.str());
  }
  const double d = horizontal_dim(spec);
  const double s = spec.s_value();
  const double g2 = st.g * st.g;
  const double B = s * s * st.f * st.f / (4.0 * g2 * g2);
  const double X = st.fp * st.gp / (st.f * st.g);
  StateDerivatives out;
  out.fp = st.fp;
  out.gp = st.gp;
  out.gpp = -(st.g / d) * C_gap * C_gap * st.f * st.f - st.g * B + st.g * X;
  out.fpp = st.f * (-(d - 1.0) * out.gpp / st.g + 2.0 * B + X - 2.0 * spec.eps() / g2 +
                    (d - 1.0) * st.gp * st.gp / g2);
  return out;
}

StateDerivatives regularized_derivatives(const State4& y, const BundleSpec& spec, double C_gap) {
  const double f = y[0], fp = y[1], g = y[2], w = y[3];
  const double d = horizontal_dim(spec);
  const double s = spec.s_value();
  const double g2 = g * g;
  const double B = s * s * f * f / (4.0 * g2 * g2);
  const double wp = -f * ((g / d) * C_gap * C_gap + s * s / (4.0 * g2 * g));
  StateDerivatives out;
  out.fp = fp;
  out.gp = w * f;
  out.gpp = wp * f + w * fp;
  out.fpp = f * (-(d - 1.0) * out.gpp / g + 2.0 * B + fp * w / g - 2.0 * spec.eps() / g2 +
                 (d - 1.0) * w * w * f * f / g2);
  return out;
}

State4 regularized_rhs(const State4& y, const BundleSpec& spec, double C_gap) {
  const double d = horizontal_dim(spec);
  const double s = spec.s_value();
  const double g = y[2];
  const StateDerivatives dv = regularized_derivatives(y, spec, C_gap);
  const double wp = -y[0] * ((g / d) * C_gap * C_gap + s * s / (4.0 * g * g * g));
  return {dv.fp, dv.fpp, dv.gp, wp};
}

FirstOrderSystem regularized_system(const BundleSpec& spec, double C_gap) {
  FirstOrderSystem sys;
  sys.rhs = [spec, C_gap](double, const State4& y) { return regularized_rhs(y, spec, C_gap); };
  sys.admissible = [](double, const State4& y) { return y[2] > kDegenerateThreshold; };
  return sys;
}

State4 to_regularized(const ShootingState& s) {
  if (!(std::abs(s.f) > 0.0)) throw DegenerateState("cannot regularize a state with f = 0");
  return {s.f, s.fp, s.g, s.gp / s.f};
}

ShootingState from_regularized(double t, const State4& y) { return {t, y[0], y[1], y[2], y[3] * y[0]}; }

// ---------------------------------------------------------------------------
// Axis series

namespace {

struct SeriesJet {
  ShootingState state;
  double fpp, gpp;
};

SeriesJet series_jet(double a, double g2, const Eigen::Vector3d& u, double t) {
  const double f3 = u[0], g4 = u[1], f5 = u[2];
  const double t2 = t * t;
  SeriesJet j;
  j.state = {t, t * (1.0 + t2 * (f3 + f5 * t2)), 1.0 + t2 * (3.0 * f3 + 5.0 * f5 * t2), a + t2 * (g2 + g4 * t2),
             t * (2.0 * g2 + 4.0 * g4 * t2)};
  j.fpp = t * (6.0 * f3 + 20.0 * f5 * t2);
  j.gpp = 2.0 * g2 + 12.0 * g4 * t2;
  return j;
}

Eigen::Vector3d series_defect(double a, double g2, double C_gap, const BundleSpec& spec, const Eigen::Vector3d& u,
                              double tau) {
  Eigen::Vector3d r;
  const SeriesJet j1 = series_jet(a, g2, u, tau);
  const SeriesJet j2 = series_jet(a, g2, u, 2.0 * tau);
  const StateDerivatives d1 = ode_rhs(j1.state, spec, C_gap);
  const StateDerivatives d2 = ode_rhs(j2.state, spec, C_gap);
  r[0] = (j1.fpp - d1.fpp) / tau;
  r[1] = (j2.fpp - d2.fpp) / (2.0 * tau);
  r[2] = (j1.gpp - d1.gpp) / (tau * tau);
  return r;
}

}  // namespace

SeriesCoefficients series_coefficients(double a, double g2, double C_gap, const BundleSpec& spec) {
  if (!(a > 0.0) || !std::isfinite(g2) || !std::isfinite(C_gap))
    throw SeriesDiverged("series coefficients need a > 0 and finite g2, C");
  const double tau = 1e-2 * a;
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  bool converged = false;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector3d r = series_defect(a, g2, C_gap, spec, u, tau);
    Eigen::Matrix3d J;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d v = u;
      const double h = 1e-6 * (1.0 + std::abs(u[k]));
      v[k] += h;
      J.col(k) = (series_defect(a, g2, C_gap, spec, v, tau) - r) / h;
    }
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    if (!lu.isInvertible() || !J.allFinite()) throw SeriesDiverged("singular coefficient system for the axis series");
    const Eigen::Vector3d du = -lu.solve(r);
    u += du;
    if (!u.allFinite()) throw SeriesDiverged("axis series coefficients are not finite");
    // Accept once the update is tiny or has stalled at the roundoff floor.
    const double size = du.cwiseAbs().maxCoeff();
    const double scale = 1.0 + u.cwiseAbs().maxCoeff();
    if (size <= 1e-10 * scale || (size >= 0.5 * previous && size <= 1e-7 * scale)) {
      converged = true;
      break;
    }
    previous = size;
  }
  if (!converged) throw SeriesDiverged("axis series coefficient solve did not converge");
  return {a, g2, u[0], u[1], u[2]};
}

ShootingState series_state(const SeriesCoefficients& c, double t) {
  return series_jet(c.a, c.g2, Eigen::Vector3d(c.f3, c.g4, c.f5), t).state;
}

namespace {
// w = g'/f from the series without the 0/0 at t = 0.
double series_w(const SeriesCoefficients& c, double t) {
  const double t2 = t * t;
  return (2.0 * c.g2 + 4.0 * c.g4 * t2) / (1.0 + t2 * (c.f3 + c.f5 * t2));
}

State4 series_regularized(const SeriesCoefficients& c, double t) {
  const ShootingState s = series_state(c, t);
  return {s.f, s.fp, s.g, series_w(c, t)};
}
}  // namespace

double default_delta(double a) { return 1e-3 * std::numbers::pi * a; }

ShootingState series_start(double a, double C_gap, const BundleSpec& spec, double delta, double g2) {
  if (!(a > 0.0)) throw std::invalid_argument("series_start: a must be positive");
  const double limit = 1e-2 * std::numbers::pi * a;
  if (!(delta > 0.0) || delta > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "series_start: delta must lie in (0, " << limit << "], got " << delta;
    throw std::invalid_argument(os.str());
  }
  return series_state(series_coefficients(a, g2, C_gap, spec), delta);
}

double series_consistency(double a, double C_gap, const BundleSpec& spec, double delta, double g2,
                          const IntegratorOptions& opts) {
  const SeriesCoefficients c = series_coefficients(a, g2, C_gap, spec);
  IntegratorOptions o = opts;
  o.initial_step = 0.1 * delta;
  const IntegrationResult r =
      integrate(regularized_system(spec, C_gap), 0.5 * delta, series_regularized(c, 0.5 * delta), o, false, delta);
  if (r.reason != StopReason::ReachedEnd) return std::numeric_limits<double>::infinity();
  const ShootingState a1 = from_regularized(delta, r.y);
  const ShootingState a2 = series_state(c, delta);
  return std::max({std::abs(a1.f - a2.f), std::abs(a1.fp - a2.fp), std::abs(a1.g - a2.g), std::abs(a1.gp - a2.gp)});
}

// ---------------------------------------------------------------------------
// Integration to the far axis

namespace {
EndState finish_event(const IntegrationResult& r, bool regularized) {
  if (r.reason != StopReason::Event) {
    std::ostringstream os;
    os << "f did not return to zero: " << to_string(r.reason) << " at t=" << r.t;
    throw IntegrationFailure(r.reason, os.str());
  }
  EndState e;
  e.L = r.t;
  e.end = regularized ? from_regularized(r.t, r.y) : ShootingState{r.t, r.y[0], r.y[1], r.y[2], r.y[3]};
  e.steps = r.steps;
  return e;
}
}  // namespace

EndState integrate_until_f_zero(const ShootingState& start, const BundleSpec& spec, double C_gap,
                                const IntegratorOptions& opts) {
  IntegratorOptions o = opts;
  o.initial_step = std::min(o.initial_step, std::max(start.t, 1e-6));
  return finish_event(integrate(regularized_system(spec, C_gap), start.t, to_regularized(start), o, true), true);
}

EndState integrate_until_f_zero(const ShootingState& start, const SecondOrderRhs& rhs, const IntegratorOptions& opts) {
  FirstOrderSystem sys;
  sys.rhs = [&rhs](double t, const State4& y) {
    const auto [fpp, gpp] = rhs(ShootingState{t, y[0], y[1], y[2], y[3]});
    return State4(y[1], fpp, y[3], gpp);
  };
  const State4 y0(start.f, start.fp, start.g, start.gp);
  return finish_event(integrate(sys, start.t, y0, opts, true), false);
}

// ---------------------------------------------------------------------------
// Shooting

double ShootingResidual::norm() const {
  if (!ok() || !values.allFinite()) return std::numeric_limits<double>::infinity();
  return values.cwiseAbs().maxCoeff();
}

ShootingResidual shooting_residual(double a, double C_gap, const BundleSpec& spec, const ShotOptions& opts) {
  ShootingResidual r;
  const bool sphere = spec.topology == Topology::SphereBundle;
  r.labels = sphere ? std::vector<std::string>{"f'(L)+1", "g'(L)"}
                    : std::vector<std::string>{"f'(L)+1", "g(L)", "g'(L)+1"};
  r.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(r.labels.size()), kNaN);
  r.L = kNaN;
  try {
    const double delta = opts.delta > 0.0 ? opts.delta : default_delta(a);
    const ShootingState start = series_start(a, C_gap, spec, delta, opts.g2);
    const EndState end = integrate_until_f_zero(start, spec, C_gap, opts.integrator);
    r.L = end.L;
    if (sphere)
      r.values << end.end.fp + 1.0, end.end.gp;
    else
      r.values << end.end.fp + 1.0, end.end.g, end.end.gp + 1.0;
  } catch (const IntegrationFailure& e) {
    r.failure = to_string(e.reason());
  } catch (const SeriesDiverged&) {
    r.failure = "series-diverged";
  } catch (const DegenerateState&) {
    r.failure = "degenerate-state";
  } catch (const std::invalid_argument&) {
    r.failure = "bad-start";
  }
  return r;
}

nlohmann::json to_json(const SolveOptions& o) {
  return {{"tol", o.tol},
          {"max_iterations", o.max_iterations},
          {"min_damping", o.min_damping},
          {"grid_size", o.grid_size},
          {"g2", o.shot.g2},
          {"delta", o.shot.delta},
          {"integrator",
           {{"rtol", o.shot.integrator.rtol},
            {"atol", o.shot.integrator.atol},
            {"t_max", o.shot.integrator.t_max},
            {"blowup", o.shot.integrator.blowup}}},
          {"verify", to_json(o.verify)}};
}

namespace {

nlohmann::json residual_json(const ShootingResidual& r) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    const double v = r.values[static_cast<Eigen::Index>(i)];
    j[r.labels[i]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  }
  return j;
}

nlohmann::json structure_json(const BundleSpec& spec) {
  const bool sphere = spec.topology == Topology::SphereBundle;
  nlohmann::json j;
  j["unknowns"] = {"a"};
  j["pinned"] = {"C_gap", "g2"};
  if (sphere) {
    j["residuals"] = {"f'(L)+1", "g'(L)"};
    j["automatic"] = {"g'(L)"};
    j["classification"] = "square";
    j["note"] = "g'(L) vanishes on every shot that reaches f = 0; one unknown against one active residual";
  } else {
    j["residuals"] = {"f'(L)+1", "g(L)", "g'(L)+1"};
    j["automatic"] = nlohmann::json::array();
    j["classification"] = "overdetermined";
    j["note"] = "one unknown against three residuals; solved in the least-squares sense";
  }
  return j;
}

}  // namespace

ProfileFunctions continuation_functions(const BundleSpec& spec, double C_gap, const ShootingState& anchor,
                                        int steps) {
  struct Cache {
    double t = std::numeric_limits<double>::quiet_NaN();
    ShootingState state;
  };
  auto cache = std::make_shared<Cache>();
  auto eval = [=](double t) {
    if (t != cache->t) {
      cache->state = continuation_state(spec, C_gap, anchor, t, steps);
      cache->t = t;
    }
    return cache->state;
  };
  return {[eval](double t) { return eval(t).f; }, [eval](double t) { return eval(t).g; }};
}

ShootingState continuation_state(const BundleSpec& spec, double C_gap, const ShootingState& anchor, double t,
                                 int steps) {
  State4 y = to_regularized(anchor);
  if (t == anchor.t) return from_regularized(t, y);
  const double h = (t - anchor.t) / steps;
  for (int i = 0; i < steps; ++i) {
    const State4 k1 = regularized_rhs(y, spec, C_gap);
    const State4 k2 = regularized_rhs(y + 0.5 * h * k1, spec, C_gap);
    const State4 k3 = regularized_rhs(y + 0.5 * h * k2, spec, C_gap);
    const State4 k4 = regularized_rhs(y + h * k3, spec, C_gap);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return from_regularized(t, y);
}

SolutionProfile build_profile(const BundleSpec& spec, double a, double C_gap, const SolveOptions& opts,
                              double L) {
  SolutionProfile sol;
  sol.spec = spec;
  sol.a = a;
  sol.C_gap = C_gap;
  sol.g2 = opts.shot.g2;
  sol.delta = opts.shot.delta > 0.0 ? opts.shot.delta : default_delta(a);
  sol.L = L;
  sol.options = opts;

  const SeriesCoefficients coeff = series_coefficients(a, sol.g2, C_gap, spec);
  const FirstOrderSystem sys = regularized_system(spec, C_gap);
  IntegratorOptions io = opts.shot.integrator;
  io.initial_step = std::min(io.initial_step, sol.delta);
  const State4 y_start = series_regularized(coeff, sol.delta);

  Grid grid = make_grid(L, opts.grid_size);
  std::vector<double> out_times;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (grid.nodes[i] > sol.delta) out_times.push_back(grid.nodes[i]);
  const IntegrationResult pass = integrate(sys, sol.delta, y_start, io, false, L, out_times);
  if (pass.reason != StopReason::ReachedEnd || pass.outputs.size() != out_times.size())
    throw IntegrationFailure(pass.reason, "resampling pass stopped early: " + to_string(pass.reason));

  // The anchor comes from its own run so that it does not depend on the grid.
  const IntegrationResult mid = integrate(sys, sol.delta, y_start, io, false, 0.5 * L);
  if (mid.reason != StopReason::ReachedEnd)
    throw IntegrationFailure(mid.reason, "anchor pass stopped early: " + to_string(mid.reason));
  sol.anchor = from_regularized(0.5 * L, mid.y);

  const Eigen::Index n = grid.size();
  Eigen::VectorXd f(n), fp(n), fpp(n), g(n), gp(n), gpp(n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = grid.nodes[i];
    const State4 y = t > sol.delta ? pass.outputs[k++] : series_regularized(coeff, t);
    const StateDerivatives dv = regularized_derivatives(y, spec, C_gap);
    f[i] = y[0];
    fp[i] = y[1];
    fpp[i] = dv.fpp;
    g[i] = y[2];
    gp[i] = dv.gp;
    gpp[i] = dv.gpp;
  }
  sol.jet = make_jet(std::move(grid), f, fp, fpp, g, gp, gpp);
  sol.certificate = verify_profile(sol, opts.verify);
  return sol;
}

SolutionProfile solve(const BundleSpec& spec, double a0, double C_gap, const SolveOptions& opts) {
  if (!(a0 > 0.0) || !(C_gap >= 0.0) || !std::isfinite(a0) || !std::isfinite(C_gap))
    throw std::invalid_argument("solve needs a0 > 0 and C_gap >= 0");

  nlohmann::json report;
  report["structure"] = structure_json(spec);
  report["initial"] = {{"a", a0}, {"C_gap", C_gap}, {"g2", opts.shot.g2}};
  nlohmann::json history = nlohmann::json::array();

  double a = a0;
  ShootingResidual r = shooting_residual(a, C_gap, spec, opts.shot);
  if (!r.ok()) {
    report["history"] = history;
    report["failure"] = r.failure;
    throw NoConvergence("initial shot failed: " + r.failure, report);
  }
  bool converged = false;
  double sensitivity = kNaN;
  int iter = 0;
  for (; iter <= opts.max_iterations; ++iter) {
    history.push_back({{"iteration", iter}, {"a", a}, {"L", r.L}, {"residual", residual_json(r)}, {"norm", r.norm()}});
    if (r.norm() < opts.tol) {
      converged = true;
      break;
    }
    if (iter == opts.max_iterations) break;

    double h = 1e-6 * a;
    ShootingResidual rh = shooting_residual(a + h, C_gap, spec, opts.shot);
    if (!rh.ok()) {
      h = -h;
      rh = shooting_residual(a + h, C_gap, spec, opts.shot);
    }
    if (!rh.ok()) {
      report["history"] = history;
      report["failure"] = "jacobian-shot-failed";
      throw NoConvergence("finite-difference Jacobian shot failed", report);
    }
    const Eigen::VectorXd J = (rh.values - r.values) / h;
    const double JtJ = J.squaredNorm();
    sensitivity = std::sqrt(JtJ);
    if (!(JtJ > 0.0) || !std::isfinite(JtJ)) {
      report["history"] = history;
      report["failure"] = "singular-jacobian";
      throw NoConvergence("singular shooting Jacobian", report);
    }
    const double step = -J.dot(r.values) / JtJ;

    bool accepted = false;
    for (double lambda = 1.0; lambda >= opts.min_damping; lambda *= 0.5) {
      const double a_new = a + lambda * step;
      if (!(a_new > 0.0)) continue;
      ShootingResidual rn = shooting_residual(a_new, C_gap, spec, opts.shot);
      if (rn.ok() && rn.norm() < r.norm()) {
        a = a_new;
        r = std::move(rn);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report["history"] = history;
      report["failure"] = "line-search-stalled";
      throw NoConvergence("damped Newton line search stalled", report);
    }
  }
  report["history"] = history;
  report["iterations"] = iter;
  report["jacobian_norm"] = std::isfinite(sensitivity) ? nlohmann::json(sensitivity) : nlohmann::json(nullptr);
  if (!converged) {
    report["failure"] = "max-iterations";
    throw NoConvergence("no convergence within " + std::to_string(opts.max_iterations) + " iterations", report);
  }
  report["converged"] = {{"a", a}, {"L", r.L}, {"residual", residual_json(r)}};

  SolutionProfile sol = build_profile(spec, a, C_gap, opts, r.L);
  sol.solver_report = report;
  if (!sol.certificate.passed()) {
    std::string names;
    for (const auto& n : sol.certificate.failed_names()) names += (names.empty() ? "" : ", ") + n;
    throw CertificateFailed("certificate checks failed: " + names, sol);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Critical point

bool CriticalPointReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CriticalPointReport critical_point_check(const SolutionProfile& sol, double tol) {
  if (!sol.certificate.passed()) throw NotCertified("critical_point_check needs a certified solution");
  const Grid& grid = sol.jet.grid;
  const Eigen::VectorXd& fp = sol.jet.fp;
  Eigen::Index bracket = -1;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    if (fp[i] > 0.0 && fp[i + 1] <= 0.0) {
      bracket = i;
      break;
    }
  }
  if (bracket < 0) throw NotCertified("f' has no downward zero on the grid");

  double lo = grid.nodes[bracket], hi = grid.nodes[bracket + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * grid.L; ++it) {
    const double mid = 0.5 * (lo + hi);
    (interpolate(grid, fp, mid) > 0.0 ? lo : hi) = mid;
  }
  CriticalPointReport rep;
  rep.t0 = 0.5 * (lo + hi);
  const double t0 = rep.t0;

  const ShootingState cont = continuation_state(sol.spec, sol.C_gap, sol.anchor, t0);
  const Eigen::VectorXd f2 = grid.diff2 * sol.jet.f;
  const Eigen::VectorXd g2 = grid.diff2 * sol.jet.g;
  const double f = interpolate(grid, sol.jet.f, t0);
  const double g = interpolate(grid, sol.jet.g, t0);
  const double fpp = interpolate(grid, f2, t0);
  const double gpp = interpolate(grid, g2, t0);
  const double d = horizontal_dim(sol.spec);
  const double s = sol.spec.s_value();
  const double bundle = s * s * f * f / (4.0 * g * g * g * g);

  auto add = [&](const std::string& name, double value, bool passed, const std::string& detail) {
    rep.checks.push_back({name, value, tol, passed, detail});
  };
  add("critical-fp-zero", std::abs(cont.fp), std::abs(cont.fp) <= tol, "f'(t0) along the continuation");
  add("critical-fpp-nonpositive", fpp, fpp <= tol, "f''(t0) from spectral differentiation");
  const double lambda1 = -fpp / f + d * bundle;
  add("critical-lambda1-positive", lambda1, lambda1 > 0.0, "-f''/f + d s^2 f^2/(4 g^4) at t0");
  const double identity = -d * gpp / g - (d * bundle + sol.C_gap * sol.C_gap * f * f);
  add("critical-gpp-identity", std::abs(identity), std::abs(identity) <= tol,
      "-d g''/g = d s^2 f^2/(4 g^4) + C^2 f^2 at t0");
  return rep;
}

}  // namespace ewb
