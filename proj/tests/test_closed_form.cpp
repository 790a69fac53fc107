#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ewb/closed_form.hpp"

using namespace ewb;
using std::numbers::pi;

namespace {

BundleSpec make_spec(int n, int eps, int k, int q) {
  RawBundleSpec r;
  r.n = n;
  r.epsilon = eps;
  r.k = k;
  r.q = q;
  r.topology = Topology::SphereBundle;
  return validate_bundle_spec(r);
}

// Fubini-Study metric on CP^2 in the cohomogeneity-one form: every Ricci
// eigenvalue equals 6.
ProfilePoint fubini_study(double t) {
  const double s = std::sin(t), c = std::cos(t), r = std::sqrt(0.5);
  return {s * c, std::cos(2.0 * t), -2.0 * std::sin(2.0 * t), r * c, -r * s, -r * c};
}

}  // namespace

TEST_SUITE("closed_form") {
  TEST_CASE("Fubini-Study is Einstein with constant 6") {
    const BundleSpec spec = make_spec(2, 1, 1, 2);
    for (double t : {0.1, 0.4, 0.7850, 1.2, 1.5}) {
      const EigenTriple e = ricci_eigenvalues(fubini_study(t), spec);
      CHECK(e.lambda0 == doctest::Approx(6.0).epsilon(1e-12));
      CHECK(e.lambda1 == doctest::Approx(6.0).epsilon(1e-12));
      CHECK(e.lambda2 == doctest::Approx(6.0).epsilon(1e-12));
    }
  }

  TEST_CASE("a wrong twist breaks the Einstein condition only along the fiber") {
    const BundleSpec spec = make_spec(2, 1, 1, 1);  // s = 2
    const EigenTriple e = ricci_eigenvalues(fubini_study(0.6), spec);
    CHECK(e.lambda0 == doctest::Approx(6.0));
    CHECK(std::abs(e.lambda1 - 6.0) > 0.1);
  }

  TEST_CASE("jet form reproduces the point form and the Gauduchon residuals vanish for an Einstein profile") {
    const BundleSpec spec = make_spec(2, 1, 1, 2);
    const Grid grid = make_grid(pi / 2.0, 48);
    const ProfileJet jet = sample_profile(
        grid, [](double t) { return std::sin(t) * std::cos(t); },
        [](double t) { return std::sqrt(0.5) * std::cos(t) + 1e-3; });
    const auto field = eigen_field_serial(jet, spec);
    const EigenTriple direct = ricci_eigenvalues(jet, spec, 20);
    CHECK(field[20].lambda0 == direct.lambda0);
    CHECK(field[20].lambda2 == direct.lambda2);

    const ProfileJet exact = sample_profile(
        make_grid(1.0, 48), [](double t) { return std::sin(t) * std::cos(t); },
        [](double t) { return std::sqrt(0.5) * std::cos(t); });
    const GauduchonResiduals res = gauduchon_residuals(exact, spec, 0.0);
    CHECK(res.max_g1() < 1e-8);
    CHECK(res.max_g2() < 1e-8);
    const auto triples = eigen_field_serial(exact, spec);
    CHECK(gray_constant_residual(std::span(triples).subspan(1, triples.size() - 2), spec) < 1e-7);
  }

  TEST_CASE("the OpenMP eigenvalue field is bitwise equal to the serial one") {
    const BundleSpec spec = make_spec(3, -1, 1, 3);
    const ProfileJet jet = sample_profile(
        make_grid(pi, 200), [](double t) { return std::sin(t) * (1.0 + 0.1 * t); },
        [](double t) { return 1.2 + 0.3 * std::cos(t); });
    const auto a = eigen_field_serial(jet, spec);
    const auto b = eigen_field(jet, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].lambda0 == b[i].lambda0);
      CHECK(a[i].lambda1 == b[i].lambda1);
      CHECK(a[i].lambda2 == b[i].lambda2);
    }
  }

  TEST_CASE("singular points are refused") {
    const BundleSpec spec = make_spec(2, 1, 1, 2);
    CHECK_THROWS_AS(ricci_eigenvalues(ProfilePoint{0.0, 1.0, 0.0, 1.0, 0.0, 0.0}, spec), SingularPoint);
    CHECK_THROWS_AS(ricci_eigenvalues(ProfilePoint{0.5, 1.0, 0.0, -1.0, 0.0, 0.0}, spec), SingularPoint);
  }

  TEST_CASE("scalar data determine the two eigenvalues") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int m : {4, 6, 8}) {
      for (int trial = 0; trial < 20; ++trial) {
        const double lk = u(rng), lo = u(rng);
        const double tau = (m - 1) * lo + lk;
        const EigenTriple e{lo, lk, lo};
        const double C0 = gray_combination(e, RealDim{m});
        CHECK(C0 == doctest::Approx((m - 4) * lo + 2.0 * lk));
        const ScalarEigenvalues back = eigenvalues_from_scalar(tau, C0, RealDim{m});
        CHECK(back.lambda0 == doctest::Approx(lk).epsilon(1e-12));
        CHECK(back.lambda1 == doctest::Approx(lo).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("constants in real dimension") {
    CHECK(c_norm(RealDim{4}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(c_norm(RealDim{6}) == doctest::Approx(1.0));
    CHECK(conformal_scalar(1.5, RealDim{6}) == doctest::Approx(9.0));
    CHECK(lambda_bar(2.0, 0.5, 3.0, RealDim{6}) == doctest::Approx(4.0 + 0.5 - 6.0));
    CHECK(weyl_gap_from_killing(3.0, 1.0, 2.0, RealDim{6}) == doctest::Approx(2.0 - 2.0));
    const KillingSplit k = killing_split(EigenTriple{1.0, 2.0, 1.0});
    CHECK(k.lambda_killing == 2.0);
    CHECK(k.lambda_other == 1.0);
  }
}
