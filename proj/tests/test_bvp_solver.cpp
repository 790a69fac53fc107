#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ewb/closed_form.hpp"
#include "fixtures.hpp"

using namespace ewb;
using ewb::testing::reference_solution;
using ewb::testing::spec;

TEST_SUITE("bvp_solver") {
  TEST_CASE("second derivatives at a frozen state match an independent linear solve") {
    // Reference values from solving the two linear conditions in numpy.
    const StateDerivatives a = ode_rhs(ShootingState{0.5, 0.7, 0.3, 1.2, 0.1}, spec(2, 1, 1, 2), 0.3);
    CHECK(a.fpp == doctest::Approx(-0.82786650462962963).epsilon(1e-13));
    CHECK(a.gpp == doctest::Approx(-0.054494060846560839).epsilon(1e-13));
    CHECK(a.fp == 0.3);
    CHECK(a.gp == 0.1);
    const StateDerivatives b = ode_rhs(ShootingState{0.5, 0.7, 0.3, 1.2, 0.1}, spec(3, -1, 1, 3), 0.5);
    CHECK(b.fpp == doctest::Approx(1.0930140603566529).epsilon(1e-13));
    CHECK(b.gpp == doctest::Approx(-0.025400058788947671).epsilon(1e-13));
  }

  TEST_CASE("substituting the solved derivatives makes both Gauduchon residuals vanish") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.2, 2.0), any(-1.0, 1.0), cgap(0.0, 2.0);
    for (const BundleSpec& sp : {spec(2, 1, 1, 2), spec(3, 0, 2, 3), spec(4, -1, -1, 1)}) {
      for (int trial = 0; trial < 25; ++trial) {
        const ShootingState st{0.0, pos(rng), any(rng), pos(rng), any(rng)};
        const double C = cgap(rng);
        const StateDerivatives d = ode_rhs(st, sp, C);
        const EigenTriple e = ricci_eigenvalues(ProfilePoint{st.f, st.fp, d.fpp, st.g, st.gp, d.gpp}, sp);
        const double scale = std::max({1.0, std::abs(e.lambda0), std::abs(e.lambda1)});
        CHECK(std::abs(e.lambda0 - e.lambda2) / scale < 1e-12);
        CHECK(std::abs(e.lambda0 - e.lambda1 - C * C * st.f * st.f) / scale < 1e-12);
      }
    }
  }

  TEST_CASE("degenerate states are refused") {
    CHECK_THROWS_AS(ode_rhs(ShootingState{0.0, 0.0, 1.0, 1.0, 0.0}, spec(2, 1, 1, 2), 0.1), DegenerateState);
    CHECK_THROWS_AS(ode_rhs(ShootingState{0.0, 0.5, 1.0, 1e-14, 0.0}, spec(2, 1, 1, 2), 0.1), DegenerateState);
  }

  TEST_CASE("the regularized system agrees with the original away from the axis") {
    const ShootingState st{0.4, 0.6, 0.8, 0.9, 0.2};
    const BundleSpec sp = spec(2, 1, 1, 2);
    const StateDerivatives direct = ode_rhs(st, sp, 0.4);
    const StateDerivatives reg = regularized_derivatives(to_regularized(st), sp, 0.4);
    CHECK(reg.fpp == doctest::Approx(direct.fpp).epsilon(1e-13));
    CHECK(reg.gpp == doctest::Approx(direct.gpp).epsilon(1e-13));
    const ShootingState back = from_regularized(st.t, to_regularized(st));
    CHECK(back.gp == doctest::Approx(st.gp).epsilon(1e-15));
  }

  TEST_CASE("axis series coefficients follow from the equations") {
    for (int eps : {-1, 0, 1}) {
      for (double a : {0.5, 1.0, 2.0}) {
        const BundleSpec sp = spec(2, eps, 1, 2);
        const double g2 = 0.1, C = 0.3;
        const SeriesCoefficients c = series_coefficients(a, g2, C, sp);
        CHECK(c.f3 == doctest::Approx(-eps / (3.0 * a * a)).epsilon(1e-6).scale(1.0));
        const double d = 2.0, s = 1.0;
        const double K = (a / d) * C * C + s * s / (4.0 * a * a * a);
        // The fit uses defects at t = 1e-2 a, so g4 carries an O(t^2) truncation error.
        CHECK(c.g4 == doctest::Approx((2.0 * g2 * c.f3 - K / 2.0) / 4.0).epsilon(1e-3));
      }
    }
  }

  TEST_CASE("the series start is consistent with integration") {
    const BundleSpec sp = spec(2, 1, 1, 2);
    const double a = 0.8;
    CHECK(series_consistency(a, 0.3, sp, default_delta(a), 0.1) < 1e-10);
    CHECK_THROWS_AS(series_start(a, 0.3, sp, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(series_start(a, 0.3, sp, 1.0), std::invalid_argument);
    const ShootingState st = series_start(a, 0.3, sp, default_delta(a));
    CHECK(st.fp == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(st.g == doctest::Approx(a).epsilon(1e-4));
  }

  TEST_CASE("the event search on a test system returns at pi") {
    const SecondOrderRhs rhs = [](const ShootingState& s) { return std::pair{-s.f, 0.0}; };
    const EndState end = integrate_until_f_zero(ShootingState{1e-3, std::sin(1e-3), std::cos(1e-3), 1.0, 0.0}, rhs);
    CHECK(std::abs(end.L - std::numbers::pi) < 1e-9);
    CHECK(std::abs(end.end.f) < 1e-12);
  }

  TEST_CASE("shooting residuals have one component per remaining condition") {
    const ShootingResidual sphere = shooting_residual(0.5, 0.3, spec(2, 1, 1, 2));
    REQUIRE(sphere.ok());
    CHECK(sphere.values.size() == 2);
    CHECK(sphere.L > 0.0);
    const ShootingResidual proj = shooting_residual(0.5, 0.3, spec(2, 1, 1, 2, Topology::ProjectiveSpace));
    CHECK(proj.values.size() == 3);
    const ShootingResidual neg = shooting_residual(0.5, 0.3, spec(2, -1, 1, 2));
    CHECK_FALSE(neg.ok());
    CHECK(std::isinf(neg.norm()));
  }

  TEST_CASE("the reference solve is certified") {
    const SolutionProfile& sol = reference_solution();
    CHECK(sol.certificate.passed());
    CHECK(sol.L > 0.0);
    const CheckResult* bc = sol.certificate.find("bc-endpoint");
    REQUIRE(bc != nullptr);
    CHECK(bc->value < 1e-9);
    CHECK(sol.certificate.find("gauduchon-G1")->value < 1e-8);
    CHECK(sol.certificate.find("gauduchon-G2")->value < 1e-8);
    CHECK(sol.certificate.find("gray-constant")->value < 1e-7);
    CHECK(sol.jet.f[0] == 0.0);
    CHECK(std::abs(sol.jet.gp[sol.jet.grid.size() - 1]) < 1e-9);
  }

  TEST_CASE("the continuation through the anchor reproduces the profile") {
    const SolutionProfile& sol = reference_solution();
    for (Eigen::Index i : {5, 20, 32, 50}) {
      const double t = sol.jet.grid.nodes[i];
      const ShootingState st = continuation_state(sol.spec, sol.C_gap, sol.anchor, t);
      CHECK(std::abs(st.f - sol.jet.f[i]) < 1e-8);
      CHECK(std::abs(st.g - sol.jet.g[i]) < 1e-8);
      CHECK(std::abs(st.gp - sol.jet.gp[i]) < 1e-8);
    }
  }

  TEST_CASE("the maximum of f is a critical point with the expected identity") {
    const CriticalPointReport rep = critical_point_check(reference_solution());
    CHECK(rep.checks.size() == 4);
    CHECK(rep.passed());
    CHECK(rep.t0 > 0.0);
    CHECK(rep.t0 < reference_solution().L);

    SolutionProfile tampered = reference_solution();
    tampered.certificate.checks.front().passed = false;
    CHECK_THROWS_AS(critical_point_check(tampered), NotCertified);
  }

  TEST_CASE("no root exists when the base is flat") {
    CHECK_THROWS_AS(solve(spec(2, 0, 1, 2), 1.0, 0.3), NoConvergence);
  }

  TEST_CASE("the projective boundary data g'(L) = -1 are out of reach with this base normalization") {
    CHECK_THROWS_AS(solve(spec(2, 1, 1, 2, Topology::ProjectiveSpace), 1.0, 0.3), NoConvergence);
  }

  TEST_CASE("the certificate round-trips through JSON apart from the stored verdict") {
    const SolutionProfile& sol = reference_solution();
    nlohmann::json j = certificate_json(sol);
    const SolutionProfile back = profile_from_certificate(j);
    CHECK(back.a == sol.a);
    CHECK(back.L == sol.L);
    CHECK(back.jet.f == sol.jet.f);
    CHECK(back.jet.gpp == sol.jet.gpp);
    CHECK(back.spec == sol.spec);
    // A loaded certificate starts unverified.
    CHECK(back.certificate.checks.empty());
    nlohmann::json again = certificate_json(back);
    again.erase("certificate");
    j.erase("certificate");
    CHECK(again.dump() == j.dump());
  }
}
