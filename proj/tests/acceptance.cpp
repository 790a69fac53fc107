// Acceptance run: one PASS/FAIL line per criterion on stdout, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>

#include "ewb/closed_form.hpp"
#include "ewb/equivalence.hpp"
#include "ewb/sweep.hpp"
#include "fixtures.hpp"

using namespace ewb;
using ewb::testing::spec;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double elapsed(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// A missing check counts as failed.
const CheckResult& check(const Certificate& cert, const std::string& name) {
  static const CheckResult missing{"missing", NAN, 0.0, false, "check not present"};
  const CheckResult* c = cert.find(name);
  return c ? *c : missing;
}

}  // namespace

int main() {
  // 1. Closed-form eigenvalues against the coordinate oracle, s = 0, 1, 2.
  {
    double worst = 0.0;
    std::size_t samples = 0;
    bool all_ok = true;
    const double secs = elapsed([&] {
      for (const auto& [k, q] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{1, 1}}) {
        const EquivalenceReport rep = oracle_equivalence(spec(2, 1, k, q), EquivalenceOptions{});
        samples += rep.samples.size();
        worst = std::max(worst, *std::max_element(rep.max_rel_err.begin(), rep.max_rel_err.end()));
        all_ok = all_ok && rep.passed(1e-6);
      }
    });
    verdict(1, all_ok && samples == 300 && worst < 1e-6 && secs < 60.0,
            fmt("samples=%.0f max_rel_err=%.3e time=%.2fs", static_cast<double>(samples), worst, secs));
  }

  // 2. Reference solve.
  SolutionProfile sol;
  bool solved = false;
  {
    std::string why;
    const double secs = elapsed([&] {
      try {
        sol = solve(spec(2, 1, 1, 2), 1.0, 0.3);
        solved = true;
      } catch (const CertificateFailed& e) {
        sol = e.profile();
        why = e.what();
      } catch (const std::exception& e) {
        why = e.what();
      }
    });
    if (sol.jet.grid.size() == 0) {
      verdict(2, false, "solve failed: " + why);
    } else {
      const double bc = check(sol.certificate, "bc-endpoint").value;
      const double g1 = check(sol.certificate, "gauduchon-G1").value;
      const double g2 = check(sol.certificate, "gauduchon-G2").value;
      const double gray = check(sol.certificate, "gray-constant").value;
      verdict(2, solved && bc < 1e-9 && g1 < 1e-8 && g2 < 1e-8 && gray < 1e-7 && secs < 60.0,
              fmt("bc=%.2e G1=%.2e G2=%.2e gray_spread=%.2e", bc, g1, g2, gray) + fmt(" time=%.2fs", secs));
    }
  }
  const Certificate& cert = sol.certificate;
  const VerifyOptions& vo = sol.options.verify;

  // 3. Einstein-Weyl equation in coordinates.
  {
    const CheckResult& c = check(cert, "einstein-weyl");
    verdict(3, c.passed && c.value < 1e-5 && vo.oracle_points >= 20,
            fmt("max_residual=%.3e points=%.0f", c.value, vo.oracle_points));
  }

  // 4. Killing tensor.
  {
    const CheckResult& c = check(cert, "killing-tensor");
    verdict(4, c.passed && c.value < 1e-5 && vo.killing_trials >= 50 && vo.killing_points >= 10,
            fmt("max_residual=%.3e vectors=%.0f points=%.0f", c.value, vo.killing_trials, vo.killing_points));
  }

  // 5. Type (1,1) and the antisymmetric Weyl Ricci part.
  {
    const CheckResult& one = check(cert, "one-one");
    const CheckResult& anti = check(cert, "weyl-antisymmetric");
    double factor = NAN, spread = NAN;
    if (cert.diagnostics.contains("antisymmetric_factor")) {
      const auto& f = cert.diagnostics["antisymmetric_factor"];
      factor = f["mean"].get<double>();
      spread = f["max"].get<double>() - f["min"].get<double>();
    }
    verdict(5, one.passed && one.value < 1e-6 && anti.passed && spread < 1e-4,
            fmt("one_one=%.3e factor=%.10f spread=%.3e", one.value, factor, spread));
  }

  // 6. Sweeps on the 40 x 40 default grid.
  {
    std::size_t roots[3] = {0, 0, 0};
    const int eps[3] = {1, 0, -1};
    const double secs = elapsed([&] {
      for (int i = 0; i < 3; ++i) {
        SweepConfig cfg;
        cfg.spec = spec(2, eps[i], 1, 2);
        roots[i] = sweep(cfg).brackets.size();
      }
    });
    verdict(6, roots[0] >= 1 && roots[1] == 0 && roots[2] == 0,
            fmt("roots eps=1:%.0f eps=0:%.0f eps=-1:%.0f", static_cast<double>(roots[0]),
                static_cast<double>(roots[1]), static_cast<double>(roots[2])) +
                fmt(" time=%.2fs", secs));
  }

  // 7. Conformal scalar curvature along the solution.
  if (sol.jet.grid.size() > 0) {
    const auto field = eigen_field_serial(sol.jet, sol.spec);
    double lowest = INFINITY;
    for (const auto& e : field)
      lowest = std::min(lowest, conformal_scalar(killing_split(e).lambda_killing, sol.spec.real_dim()));
    verdict(7, lowest >= -1e-9, fmt("min m*lambda_killing=%.6f nodes=%.0f", lowest, static_cast<double>(field.size())));
  } else {
    verdict(7, false, "no profile");
  }

  // 8. Critical point of f.
  try {
    const CriticalPointReport rep = critical_point_check(sol, 1e-6);
    std::string detail = fmt("t0=%.6f", rep.t0);
    for (const auto& c : rep.checks) detail += " " + c.name + "=" + (c.passed ? "ok" : "fail");
    verdict(8, rep.passed() && rep.checks.size() == 4, detail);
  } catch (const std::exception& e) {
    verdict(8, false, e.what());
  }

  // 9. Determinism and grid independence.
  try {
    const SolutionProfile again = solve(spec(2, 1, 1, 2), 1.0, 0.3);
    const bool identical = certificate_json(again).dump() == certificate_json(sol).dump();
    SolveOptions fine;
    fine.grid_size = 128;
    const SolutionProfile big = solve(spec(2, 1, 1, 2), 1.0, 0.3, fine);

    double diff = std::max({std::abs(big.a - sol.a), std::abs(big.L - sol.L), std::abs(big.anchor.f - sol.anchor.f),
                            std::abs(big.anchor.g - sol.anchor.g), std::abs(big.anchor.fp - sol.anchor.fp),
                            std::abs(big.anchor.gp - sol.anchor.gp)});
    // Both grids represent the same functions; compare on the coarse nodes.
    for (Eigen::Index i = 0; i < sol.jet.grid.size(); ++i) {
      const double t = sol.jet.grid.nodes[i];
      diff = std::max({diff, std::abs(interpolate(big.jet.grid, big.jet.f, t) - sol.jet.f[i]),
                       std::abs(interpolate(big.jet.grid, big.jet.g, t) - sol.jet.g[i]),
                       std::abs(interpolate(big.jet.grid, big.jet.fp, t) - sol.jet.fp[i]),
                       std::abs(interpolate(big.jet.grid, big.jet.gp, t) - sol.jet.gp[i])});
    }
    for (const char* name : {"oracle-eigen-match", "einstein-weyl", "one-one", "killing-tensor"})
      diff = std::max(diff, std::abs(check(big.certificate, name).value - check(cert, name).value));
    verdict(9, identical && diff < 1e-8,
            std::string("repeat=") + (identical ? "byte-identical" : "DIFFERENT") + fmt(" max_64_vs_128=%.3e", diff));
  } catch (const std::exception& e) {
    verdict(9, false, e.what());
  }

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
