#include "ewb/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ewb/bvp_solver.hpp"
#include "ewb/closed_form.hpp"
#include "ewb/geometry_oracle.hpp"

namespace ewb {

bool Certificate::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* Certificate::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> Certificate::failed_names() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

namespace {
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"value", number(c.value)}, {"tolerance", c.tolerance}, {"passed", c.passed},
          {"detail", c.detail}};
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& k : c.checks) checks.push_back(to_json(k));
  return {{"passed", c.passed()}, {"checks", checks}, {"diagnostics", c.diagnostics}};
}

nlohmann::json to_json(const VerifyOptions& o) {
  return {{"tol_boundary", o.tol_boundary},
          {"tol_gauduchon", o.tol_gauduchon},
          {"tol_gray", o.tol_gray},
          {"tol_order", o.tol_order},
          {"multiplicity_gap", o.multiplicity_gap},
          {"tol_conformal", o.tol_conformal},
          {"tol_jet", o.tol_jet},
          {"tol_anchor", o.tol_anchor},
          {"tol_series", o.tol_series},
          {"tol_oracle_eigen", o.tol_oracle_eigen},
          {"tol_einstein_weyl", o.tol_einstein_weyl},
          {"tol_killing", o.tol_killing},
          {"tol_one_one", o.tol_one_one},
          {"tol_factor_spread", o.tol_factor_spread},
          {"tol_mean_curvature", o.tol_mean_curvature},
          {"tol_bianchi", o.tol_bianchi},
          {"oracle", o.oracle},
          {"oracle_points", o.oracle_points},
          {"killing_points", o.killing_points},
          {"killing_trials", o.killing_trials},
          {"bianchi_points", o.bianchi_points},
          {"seed", o.seed}};
}

VerifyOptions verify_options_from_json(const nlohmann::json& j) {
  VerifyOptions o;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("tol_boundary", o.tol_boundary);
  get("tol_gauduchon", o.tol_gauduchon);
  get("tol_gray", o.tol_gray);
  get("tol_order", o.tol_order);
  get("multiplicity_gap", o.multiplicity_gap);
  get("tol_conformal", o.tol_conformal);
  get("tol_jet", o.tol_jet);
  get("tol_anchor", o.tol_anchor);
  get("tol_series", o.tol_series);
  get("tol_oracle_eigen", o.tol_oracle_eigen);
  get("tol_einstein_weyl", o.tol_einstein_weyl);
  get("tol_killing", o.tol_killing);
  get("tol_one_one", o.tol_one_one);
  get("tol_factor_spread", o.tol_factor_spread);
  get("tol_mean_curvature", o.tol_mean_curvature);
  get("tol_bianchi", o.tol_bianchi);
  get("oracle", o.oracle);
  get("oracle_points", o.oracle_points);
  get("killing_points", o.killing_points);
  get("killing_trials", o.killing_trials);
  get("bianchi_points", o.bianchi_points);
  get("seed", o.seed);
  return o;
}

// ---------------------------------------------------------------------------
// Verification of a solved profile

namespace {

struct CheckList {
  std::vector<CheckResult>& out;

  void upper(const std::string& name, double value, double tol, const std::string& detail) {
    out.push_back({name, value, tol, std::isfinite(value) && value <= tol, detail});
  }
  void lower(const std::string& name, double value, double tol, const std::string& detail) {
    out.push_back({name, value, tol, std::isfinite(value) && value >= -tol, detail});
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void closed_form_checks(const SolutionProfile& sol, const VerifyOptions& o, CheckList& cl, nlohmann::json& diag) {
  const ProfileJet& jet = sol.jet;
  const BundleSpec& spec = sol.spec;
  const RealDim m = spec.real_dim();
  const Eigen::Index n = jet.grid.size();

  // Endpoint conditions.
  const BoundaryConditionSet bcs = boundary_conditions(spec);
  const std::vector<double> bc = parity_residual(jet, bcs);
  const auto all = bcs.all();
  double worst_bc = 0.0;
  std::string worst_label;
  nlohmann::json bcj = nlohmann::json::object();
  for (std::size_t i = 0; i < bc.size(); ++i) {
    bcj[all[i].label()] = number(bc[i]);
    if (!(std::abs(bc[i]) <= worst_bc)) {
      worst_bc = std::abs(bc[i]);
      worst_label = all[i].label();
    }
  }
  diag["boundary"] = bcj;
  cl.upper("bc-endpoint", worst_bc, o.tol_boundary, "worst: " + worst_label);

  cl.upper("series-consistency",
           series_consistency(sol.a, sol.C_gap, spec, sol.delta, sol.g2, sol.options.shot.integrator), o.tol_series,
           "axis series at delta vs integration from delta/2");
  cl.upper("jet-consistency", jet_consistency(jet), o.tol_jet, "stored derivatives vs spectral differentiation");

  const GauduchonResiduals gr = gauduchon_residuals(jet, spec, sol.C_gap);
  cl.upper("gauduchon-G1", gr.max_g1(), o.tol_gauduchon, "max |lambda0 - lambda2| over interior nodes");
  cl.upper("gauduchon-G2", gr.max_g2(), o.tol_gauduchon, "max |lambda0 - lambda1 - C^2 f^2| over interior nodes");

  const std::vector<EigenTriple> field = eigen_field_serial(jet, spec);
  const std::span<const EigenTriple> interior(field.data() + 1, field.size() - 2);
  const double spread = gray_constant_residual(interior, spec);
  cl.upper("gray-constant", spread, o.tol_gray, "spread of (m-4) lambda_other + 2 lambda_killing");

  double order = -std::numeric_limits<double>::infinity();
  double mult = 0.0, weyl_gap = 0.0;
  int separated = 0;
  const double c = c_norm(m);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const EigenTriple& e = field[static_cast<std::size_t>(i)];
    const KillingSplit k = killing_split(e);
    order = std::max(order, k.lambda_killing - k.lambda_other);
    if (std::abs(k.lambda_other - k.lambda_killing) > o.multiplicity_gap) {
      ++separated;
      mult = std::max(mult, std::abs(e.lambda0 - e.lambda2));
    }
    const double xi2 = c * c * sol.C_gap * sol.C_gap * jet.f[i] * jet.f[i];
    weyl_gap = std::max(weyl_gap, std::abs(weyl_gap_from_killing(k.lambda_other, k.lambda_killing, xi2, m)));
  }
  cl.upper("eigenvalue-order", order, o.tol_order, "max of lambda_killing - lambda_other");
  cl.upper("eigen-multiplicity", mult, o.multiplicity_gap,
           "other eigenvalue merged at " + std::to_string(separated) + " nodes with a separated Killing eigenvalue");
  cl.upper("weyl-gap", weyl_gap, o.tol_gauduchon, "lambda_other - lambda_killing - (m-2)/4 |xi|^2");

  double conformal_min = std::numeric_limits<double>::infinity();
  for (const auto& e : field) conformal_min = std::min(conformal_min, conformal_scalar(killing_split(e).lambda_killing, m));
  cl.lower("conformal-scalar-nonneg", conformal_min, o.tol_conformal, "min of m lambda_killing over all nodes");

  const WeylConstants wc = weyl_constants(jet, spec, sol.C_gap);
  diag["gray_constant"] = wc.C0;
  diag["c_norm"] = wc.c_norm;
  diag["Lambda_mid"] = interpolate(jet.grid, wc.Lambda, 0.5 * jet.grid.L);

  const ShootingState& an = sol.anchor;
  double anchor_err = 0.0;
  if (an.t > 0.0 && an.t < jet.grid.L) {
    anchor_err = std::max({std::abs(interpolate(jet.grid, jet.f, an.t) - an.f),
                           std::abs(interpolate(jet.grid, jet.fp, an.t) - an.fp),
                           std::abs(interpolate(jet.grid, jet.g, an.t) - an.g),
                           std::abs(interpolate(jet.grid, jet.gp, an.t) - an.gp)});
  } else {
    anchor_err = std::numeric_limits<double>::infinity();
  }
  cl.upper("anchor-consistency", anchor_err, o.tol_anchor, "stored anchor vs interpolated profile");
}

void oracle_checks(const SolutionProfile& sol, const VerifyOptions& o, CheckList& cl, nlohmann::json& diag) {
  const BundleSpec& spec = sol.spec;
  const RealDim m = spec.real_dim();
  const double L = sol.L;
  const ProfileFunctions funcs = continuation_functions(spec, sol.C_gap, sol.anchor);
  const double amplitude = c_norm(m) * sol.C_gap;
  const MetricField field = build_patch_metric(funcs, spec, amplitude);
  const FdSteps steps;

  const int P = std::max(2, o.oracle_points);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> chart(-0.8, 0.8);
  std::vector<PatchPoint> points;
  for (int k = 0; k < P; ++k) {
    PatchPoint p;
    p.t = L * (0.1 + 0.8 * k / (P - 1.0));
    p.psi = angle(rng);
    p.x = chart(rng);
    p.y = chart(rng);
    points.push_back(p);
  }

  double eig_err = 0.0, eigvec = 0.0, ew = 0.0, one_one = 0.0, weyl_sym = 0.0, fib = 0.0, orth = 0.0;
  std::vector<double> factors;
  double factor_fit = 0.0;
  for (const auto& p : points) {
    const ShootingState st = continuation_state(spec, sol.C_gap, sol.anchor, p.t);
    const StateDerivatives dv = regularized_derivatives(to_regularized(st), spec, sol.C_gap);
    const EigenTriple cf = ricci_eigenvalues(ProfilePoint{st.f, st.fp, dv.fpp, st.g, st.gp, dv.gpp}, spec);
    const LabeledEigenvalues le = labeled_eigenvalues(field, p, steps);
    for (auto [num, ref] : {std::pair{le.t_dir, cf.lambda0}, {le.fiber, cf.lambda1}, {le.horizontal, cf.lambda2}})
      eig_err = std::max(eig_err, std::abs(num - ref) / std::max(std::abs(ref), 1.0));
    eigvec = std::max(eigvec, le.eigvec_residual);

    ew = std::max(ew, einstein_weyl_residual(field, p, steps).max_frame_residual);
    one_one = std::max(one_one, one_one_residual(field, p, steps.metric));

    const Mat4 rho = weyl_ricci(field, p, steps);
    const Mat4 sym = 0.5 * (rho + rho.transpose());
    const Mat4 anti = 0.5 * (rho - rho.transpose());
    const Mat4 G = field.component_fn(p);
    const double trace = G.ldlt().solve(sym).trace() / m.value;
    weyl_sym = std::max(weyl_sym, frame_components(field, p, sym - trace * G).cwiseAbs().maxCoeff());
    const Mat4 dw = d_omega(field, p, steps.metric);
    const double dw2 = (dw.array() * dw.array()).sum();
    if (dw2 > 0.0) {
      const double k = (anti.array() * dw.array()).sum() / dw2;
      factors.push_back(k);
      factor_fit = std::max(factor_fit, (anti - k * dw).cwiseAbs().maxCoeff());
    }

    const Vec4 H = mean_curvature_normal(field, Distribution::KillingDir, p, steps);
    const Vec4 expected(-st.fp / st.f, 0.0, 0.0, 0.0);
    const Vec4 dH = H - expected;
    fib = std::max(fib, std::sqrt(std::max(0.0, dH.dot(G * dH))));
    const Vec4 Ho = mean_curvature_normal(field, Distribution::Orthogonal, p, steps);
    orth = std::max(orth, std::sqrt(std::max(0.0, Ho.dot(G * Ho))));
  }
  cl.upper("oracle-eigen-match", eig_err, o.tol_oracle_eigen,
           "max |oracle - closed form| / max(|closed form|, 1) over " + std::to_string(P) + " points");
  cl.upper("einstein-weyl", ew, o.tol_einstein_weyl, "max frame component of Ric + (m-2)/4 omega x omega - Lambda g");
  cl.upper("weyl-symmetric", weyl_sym, o.tol_einstein_weyl, "trace-free symmetric part of the Weyl Ricci tensor");
  cl.upper("one-one", one_one, o.tol_one_one, "max |d omega(JX, JY) - d omega(X, Y)|");
  cl.upper("mean-curvature-fiber", fib, o.tol_mean_curvature, "fiber mean curvature normal vs -(f'/f) d/dt");
  cl.upper("mean-curvature-orthogonal", orth, o.tol_mean_curvature, "Killing component of the orthogonal mean curvature");
  diag["oracle_eigvec_residual"] = eigvec;

  if (factors.empty()) {
    cl.upper("weyl-antisymmetric", 0.0, o.tol_factor_spread, "omega is closed (C_gap = 0); nothing to fit");
  } else {
    const auto [lo, hi] = std::minmax_element(factors.begin(), factors.end());
    double mean = 0.0;
    for (double k : factors) mean += k;
    mean /= static_cast<double>(factors.size());
    const double spread = (*hi - *lo) / std::abs(mean);
    const double real_q = m.value / 4.0, complex_q = spec.n_complex / 4.0;
    std::string match = "neither";
    if (std::abs(mean - real_q) < 1e-4 * real_q) match = "real dimension";
    else if (std::abs(mean - complex_q) < 1e-4 * complex_q) match = "complex dimension";
    cl.upper("weyl-antisymmetric", spread, o.tol_factor_spread,
             "antisymmetric Weyl Ricci = k d omega with k = " + fmt(mean) + " (" + match + " quarter)");
    diag["antisymmetric_factor"] = {{"mean", mean},   {"min", *lo},          {"max", *hi},
                                    {"fit_residual", factor_fit}, {"real_dimension_quarter", real_q},
                                    {"complex_dimension_quarter", complex_q}, {"matches", match}};
  }

  // Killing tensor T = S - Lambda Id with Lambda = (tr S + (m-2)/4 |omega|^2)/m.
  const EndomorphismFn T = [&](const PatchPoint& q) {
    const Mat4 G = field.component_fn(q);
    const Mat4 S = ricci_endomorphism(field, q, steps);
    const Vec4 w = field.omega_fn(q);
    const double Lambda = (S.trace() + 0.25 * (m.value - 2.0) * w.dot(G.ldlt().solve(w))) / m.value;
    return Mat4(S - Lambda * Mat4::Identity());
  };
  double killing = 0.0;
  const int K = std::min<int>(o.killing_points, P);
  for (int k = 0; k < K; ++k) {
    const auto& p = points[static_cast<std::size_t>(k * P / K)];
    killing = std::max(killing, killing_tensor_residual(field, T, p, o.killing_trials, o.seed + k, steps));
  }
  cl.upper("killing-tensor", killing, o.tol_killing,
           "max |g((nabla_X T) X, X)| over " + std::to_string(o.killing_trials) + " unit vectors at " +
               std::to_string(K) + " points");

  double bianchi = 0.0;
  const int Bn = std::min<int>(o.bianchi_points, P);
  for (int k = 0; k < Bn; ++k)
    bianchi = std::max(bianchi, contracted_bianchi_residual(field, points[static_cast<std::size_t>(k * P / Bn)], steps));
  cl.upper("contracted-bianchi", bianchi, o.tol_bianchi, "max frame component of div S - d(tr S)/2");
}

}  // namespace

Certificate verify_profile(const SolutionProfile& sol, const VerifyOptions& o) {
  Certificate cert;
  CheckList cl{cert.checks};
  nlohmann::json& diag = cert.diagnostics;
  closed_form_checks(sol, o, cl, diag);

  const bool supported = sol.spec.n_complex == 2 && sol.spec.epsilon == BaseSign::Positive;
  if (o.oracle && supported) {
    try {
      oracle_checks(sol, o, cl, diag);
    } catch (const OracleError& e) {
      cert.checks.push_back({"oracle", std::numeric_limits<double>::quiet_NaN(), 0.0, false, e.what()});
    }
  } else {
    diag["oracle"] = o.oracle ? "skipped: coordinate oracle needs n = 2, epsilon = 1" : "skipped: disabled";
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json certificate_json(const SolutionProfile& sol) {
  nlohmann::json j;
  j["format"] = "ewb-certificate-v1";
  j["spec"] = to_json(sol.spec);
  j["parameters"] = {{"a", sol.a}, {"C_gap", sol.C_gap}, {"g2", sol.g2}, {"delta", sol.delta}, {"L", sol.L}};
  j["anchor"] = {{"t", sol.anchor.t}, {"f", sol.anchor.f}, {"fp", sol.anchor.fp}, {"g", sol.anchor.g},
                 {"gp", sol.anchor.gp}};
  j["options"] = to_json(sol.options);
  j["seed"] = sol.options.verify.seed;
  j["grid"] = {{"nodes", sol.jet.grid.size()}, {"L", sol.jet.grid.L}, {"kind", "chebyshev-lobatto"}};
  j["solver"] = sol.solver_report;
  j["certificate"] = to_json(sol.certificate);
  j["profile"] = to_json(sol.jet);
  return j;
}

SolutionProfile profile_from_certificate(const nlohmann::json& j) {
  SolutionProfile sol;
  sol.spec = spec_from_json(j.at("spec"));
  const auto& par = j.at("parameters");
  sol.a = par.at("a").get<double>();
  sol.C_gap = par.at("C_gap").get<double>();
  sol.g2 = par.at("g2").get<double>();
  sol.delta = par.at("delta").get<double>();
  sol.L = par.at("L").get<double>();
  const auto& an = j.at("anchor");
  sol.anchor = {an.at("t").get<double>(), an.at("f").get<double>(), an.at("fp").get<double>(),
                an.at("g").get<double>(), an.at("gp").get<double>()};

  const auto& opt = j.at("options");
  sol.options.tol = opt.at("tol").get<double>();
  sol.options.max_iterations = opt.at("max_iterations").get<int>();
  sol.options.min_damping = opt.at("min_damping").get<double>();
  sol.options.grid_size = opt.at("grid_size").get<int>();
  sol.options.shot.g2 = opt.at("g2").get<double>();
  sol.options.shot.delta = opt.at("delta").get<double>();
  const auto& integ = opt.at("integrator");
  sol.options.shot.integrator.rtol = integ.at("rtol").get<double>();
  sol.options.shot.integrator.atol = integ.at("atol").get<double>();
  sol.options.shot.integrator.t_max = integ.at("t_max").get<double>();
  sol.options.shot.integrator.blowup = integ.at("blowup").get<double>();
  sol.options.verify = verify_options_from_json(opt.at("verify"));
  if (j.contains("solver")) sol.solver_report = j.at("solver");

  const auto& prof = j.at("profile");
  auto column = [&prof](const char* key) {
    const auto v = prof.at(key).get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const Eigen::VectorXd t = column("t");
  Grid grid = make_grid(prof.at("L").get<double>(), static_cast<int>(t.size()));
  if ((grid.nodes - t).cwiseAbs().maxCoeff() > 1e-12 * grid.L)
    throw ProfileError(ProfileError::Code::GridMismatch, "certificate t column is not a Chebyshev-Lobatto grid");
  sol.jet = make_jet(std::move(grid), column("f"), column("fp"), column("fpp"), column("g"), column("gp"),
                     column("gpp"));
  return sol;
}

}  // namespace ewb
