#include "ewb/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ewb {

ProfileFunctions AnalyticProfile::functions() const {
  const AnalyticProfile p = *this;
  return {[p](double t) { return std::sin(t) * (1.0 + p.alpha * t); },
          [p](double t) { return p.beta + p.gamma * std::cos(t) + p.kappa * t * t; }};
}

ProfilePoint AnalyticProfile::point(double t) const {
  const double s = std::sin(t), c = std::cos(t);
  return {s * (1.0 + alpha * t),
          c * (1.0 + alpha * t) + alpha * s,
          -s * (1.0 + alpha * t) + 2.0 * alpha * c,
          beta + gamma * c + kappa * t * t,
          -gamma * s + 2.0 * kappa * t,
          -gamma * c + 2.0 * kappa};
}

AnalyticProfile AnalyticProfile::random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AnalyticProfile p;
  p.alpha = -0.1 + 0.3 * u(rng);
  p.beta = 0.8 + 0.7 * u(rng);
  p.gamma = -0.3 + 0.6 * u(rng);
  p.kappa = 0.2 * u(rng);
  return p;
}

bool EquivalenceReport::passed(double tol) const {
  return failures == 0 && !samples.empty() &&
         std::all_of(max_rel_err.begin(), max_rel_err.end(), [tol](double e) { return e < tol; });
}

namespace {

struct Task {
  int profile;
  AnalyticProfile shape;
  PatchPoint at;
};

std::vector<Task> draw_tasks(const EquivalenceOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> tdist(0.1 * std::numbers::pi, 0.9 * std::numbers::pi);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> chart(-0.8, 0.8);
  std::vector<Task> tasks;
  for (int r = 0; r < opts.profiles; ++r) {
    const AnalyticProfile shape = AnalyticProfile::random(rng());
    for (int k = 0; k < opts.points; ++k) {
      PatchPoint p;
      p.t = tdist(rng);
      p.psi = angle(rng);
      p.x = chart(rng);
      p.y = chart(rng);
      tasks.push_back({r, shape, p});
    }
  }
  return tasks;
}

EquivalenceSample evaluate(const BundleSpec& spec, const Task& task, const FdSteps& steps) {
  EquivalenceSample s;
  s.profile = task.profile;
  s.at = task.at;
  try {
    const MetricField field = build_patch_metric(task.shape.functions(), spec, 0.0);
    s.closed = ricci_eigenvalues(task.shape.point(task.at.t), spec);
    s.oracle = labeled_eigenvalues(field, task.at, steps);
    const double num[3] = {s.oracle.t_dir, s.oracle.fiber, s.oracle.horizontal};
    const double ref[3] = {s.closed.lambda0, s.closed.lambda1, s.closed.lambda2};
    for (int i = 0; i < 3; ++i) s.rel_err[i] = std::abs(num[i] - ref[i]) / std::max(std::abs(ref[i]), 1.0);
  } catch (const std::exception&) {
    s.failed = true;
  }
  return s;
}

EquivalenceReport summarize(std::vector<EquivalenceSample> samples) {
  EquivalenceReport r;
  r.samples = std::move(samples);
  for (const auto& s : r.samples) {
    if (s.failed) {
      ++r.failures;
      continue;
    }
    for (int i = 0; i < 3; ++i) r.max_rel_err[i] = std::max(r.max_rel_err[i], s.rel_err[i]);
    r.max_eigvec_residual = std::max(r.max_eigvec_residual, s.oracle.eigvec_residual);
  }
  return r;
}

}  // namespace

EquivalenceReport oracle_equivalence_serial(const BundleSpec& spec, const EquivalenceOptions& opts) {
  const auto tasks = draw_tasks(opts);
  std::vector<EquivalenceSample> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(evaluate(spec, t, opts.steps));
  return summarize(std::move(out));
}

EquivalenceReport oracle_equivalence(const BundleSpec& spec, const EquivalenceOptions& opts) {
  const auto tasks = draw_tasks(opts);
  std::vector<EquivalenceSample> out(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] = evaluate(spec, tasks[static_cast<std::size_t>(k)], opts.steps);
  return summarize(std::move(out));
}

nlohmann::json to_json(const EquivalenceReport& r, double tol) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"profile", s.profile},
                       {"t", s.at.t},
                       {"psi", s.at.psi},
                       {"x", s.at.x},
                       {"y", s.at.y},
                       {"failed", s.failed},
                       {"closed", {s.closed.lambda0, s.closed.lambda1, s.closed.lambda2}},
                       {"oracle", {s.oracle.t_dir, s.oracle.fiber, s.oracle.horizontal}},
                       {"rel_err", {s.rel_err[0], s.rel_err[1], s.rel_err[2]}}});
  }
  return {{"tolerance", tol},
          {"relative_error", "|oracle - closed| / max(|closed|, 1)"},
          {"max_rel_err", {{"lambda0", r.max_rel_err[0]}, {"lambda1", r.max_rel_err[1]}, {"lambda2", r.max_rel_err[2]}}},
          {"max_eigvec_residual", r.max_eigvec_residual},
          {"failures", r.failures},
          {"passed", r.passed(tol)},
          {"samples", samples}};
}

}  // namespace ewb
