#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ewb/profiles.hpp"

using namespace ewb;
using std::numbers::pi;

TEST_SUITE("profiles") {
  TEST_CASE("the collocation grid spans [0, L] and is symmetric") {
    const Grid g = make_grid(2.5, 33);
    REQUIRE(g.size() == 33);
    CHECK(g.nodes[0] == 0.0);
    CHECK(g.nodes[32] == 2.5);
    for (Eigen::Index i = 0; i + 1 < g.size(); ++i) CHECK(g.nodes[i + 1] > g.nodes[i]);
    for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g.nodes[i] + g.nodes[32 - i] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS(make_grid(1.0, 7), ProfileError);
    CHECK_THROWS_AS(make_grid(-1.0, 16), ProfileError);
  }

  TEST_CASE("spectral differentiation is exact on polynomials of low degree") {
    const Grid g = make_grid(1.7, 16);
    const Eigen::VectorXd p = g.nodes.unaryExpr([](double t) { return 2.0 - t + 3.0 * t * t * t; });
    const Eigen::VectorXd dp = g.nodes.unaryExpr([](double t) { return -1.0 + 9.0 * t * t; });
    const Eigen::VectorXd ddp = g.nodes.unaryExpr([](double t) { return 18.0 * t; });
    CHECK((g.diff1 * p - dp).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((g.diff2 * p - ddp).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("sampled jets match analytic derivatives") {
    const Grid grid = make_grid(pi, 48);
    const ProfileJet jet = sample_profile(
        grid, [](double t) { return std::sin(t); }, [](double t) { return 1.0 + 0.2 * std::cos(t); });
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double t = grid.nodes[i];
      CHECK(jet.fp[i] == doctest::Approx(std::cos(t)).epsilon(1e-10));
      CHECK(std::abs(jet.fpp[i] + std::sin(t)) < 1e-8);
      CHECK(std::abs(jet.gp[i] + 0.2 * std::sin(t)) < 1e-10);
    }
    CHECK(jet_consistency(jet) < 1e-8);

    ProfileJet bad = jet;
    bad.fp[10] += 1e-3;
    CHECK(jet_consistency(bad) > 1e-4);
  }

  TEST_CASE("profiles must be positive at interior nodes") {
    const Grid grid = make_grid(pi, 16);
    CHECK_THROWS_AS(sample_profile(
                        grid, [](double t) { return std::sin(2.0 * t); }, [](double) { return 1.0; }),
                    ProfileError);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(16);
    Eigen::VectorXd shorter = Eigen::VectorXd::Ones(15);
    try {
      make_jet(grid, ones, ones, ones, shorter, ones, ones);
      FAIL("expected a grid mismatch");
    } catch (const ProfileError& e) {
      CHECK(e.code() == ProfileError::Code::GridMismatch);
    }
  }

  TEST_CASE("barycentric interpolation reproduces smooth functions between nodes") {
    const Grid grid = make_grid(2.0, 40);
    const Eigen::VectorXd v = grid.nodes.unaryExpr([](double t) { return std::exp(-t) * std::cos(3.0 * t); });
    for (double t : {0.013, 0.5, 1.234567, 1.999}) CHECK(std::abs(interpolate(grid, v, t) - std::exp(-t) * std::cos(3.0 * t)) < 1e-12);
    CHECK(interpolate(grid, v, grid.nodes[7]) == v[7]);
  }

  TEST_CASE("endpoint extrapolation uses only interior values") {
    const Grid grid = make_grid(1.0, 64);
    Eigen::VectorXd v = grid.nodes.unaryExpr([](double t) { return 1.0 + t * t; });
    v[0] = 1e6;
    v[63] = -1e6;
    CHECK(extrapolate_to_endpoint(grid, v, Endpoint::Zero) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(extrapolate_to_endpoint(grid, v, Endpoint::End) == doctest::Approx(2.0).epsilon(1e-10));
  }

  TEST_CASE("boundary residuals of the round profile vanish") {
    const Grid grid = make_grid(pi, 48);
    const ProfileJet jet = sample_profile(
        grid, [](double t) { return std::sin(t); }, [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); });
    BundleSpec spec;
    for (double r : parity_residual(jet, boundary_conditions(spec))) CHECK(std::abs(r) < 1e-10);
  }

  TEST_CASE("csv round-trips bit for bit") {
    const Grid grid = make_grid(1.3, 24);
    const ProfileJet jet = sample_profile(
        grid, [](double t) { return std::sin(t) / 3.0; }, [](double t) { return 0.7 + std::log1p(t * t); });
    std::stringstream ss;
    write_jet_csv(ss, jet);
    const ProfileJet back = read_jet_csv(ss);
    CHECK(back.grid.L == jet.grid.L);
    CHECK(back.f == jet.f);
    CHECK(back.fpp == jet.fpp);
    CHECK(back.gp == jet.gp);
  }

  TEST_CASE("malformed csv is rejected with a reason") {
    std::stringstream no_header("1,2,3\n");
    CHECK_THROWS_AS(read_jet_csv(no_header), ProfileError);
    std::stringstream bad_number("t,f,fp,fpp,g,gp,gpp\n0,0,1,0,1,0,zz\n");
    try {
      read_jet_csv(bad_number);
      FAIL("expected rejection");
    } catch (const ProfileError& e) {
      CHECK(e.code() == ProfileError::Code::BadCsv);
    }
  }
}
