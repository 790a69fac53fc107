#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewb/equivalence.hpp"
#include "ewb/geometry_oracle.hpp"

using namespace ewb;

namespace {

BundleSpec spec_s1() {
  RawBundleSpec r;
  r.n = 2;
  r.epsilon = 1;
  r.k = 1;
  r.q = 2;
  r.topology = Topology::SphereBundle;
  return validate_bundle_spec(r);
}

// dt^2 + dpsi^2 + round unit sphere in stereographic coordinates.
MetricField product_with_sphere() {
  return coordinate_metric([](const PatchPoint& p) {
    const double q = 1.0 + p.x * p.x + p.y * p.y;
    Mat4 G = Mat4::Identity();
    G(2, 2) = G(3, 3) = 4.0 / (q * q);
    return G;
  });
}

ProfileFunctions fubini_study() {
  return {[](double t) { return std::sin(t) * std::cos(t); }, [](double t) { return std::sqrt(0.5) * std::cos(t); }};
}

}  // namespace

TEST_SUITE("geometry_oracle") {
  TEST_CASE("Christoffel symbols of the round sphere chart") {
    const MetricField field = product_with_sphere();
    const PatchPoint p{0.3, 0.1, 0.4, -0.25};
    const Christoffel G = christoffel(field, p);
    const double q = 1.0 + p.x * p.x + p.y * p.y;
    const double phx = -2.0 * p.x / q, phy = -2.0 * p.y / q;
    CHECK(G[2](2, 2) == doctest::Approx(phx).epsilon(1e-7));
    CHECK(G[2](3, 3) == doctest::Approx(-phx).epsilon(1e-7));
    CHECK(G[2](2, 3) == doctest::Approx(phy).epsilon(1e-7));
    CHECK(G[3](2, 3) == doctest::Approx(phx).epsilon(1e-7));
    CHECK(G[3](3, 3) == doctest::Approx(phy).epsilon(1e-7));
    CHECK(std::abs(G[0](2, 2)) < 1e-12);
    CHECK(std::abs(G[1](0, 1)) < 1e-12);
    for (int k = 0; k < 4; ++k) CHECK((G[k] - G[k].transpose()).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("Ricci tensor of the sphere factor equals its metric") {
    const MetricField field = product_with_sphere();
    const PatchPoint p{0.3, 0.1, -0.6, 0.2};
    const Mat4 ric = ricci_numeric(field, p);
    const Mat4 G = field.component_fn(p);
    Mat4 expected = Mat4::Zero();
    expected(2, 2) = G(2, 2);
    expected(3, 3) = G(3, 3);
    CHECK((ric - expected).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("a coarse step on a rapidly varying metric is detected") {
    const MetricField field = coordinate_metric([](const PatchPoint& p) {
      Mat4 G = Mat4::Identity();
      G(1, 1) = std::exp(std::sin(40.0 * p.t));
      return G;
    });
    CHECK_THROWS_AS(christoffel(field, PatchPoint{0.3, 0.0, 0.0, 0.0}, 0.05), OracleError);
  }

  TEST_CASE("Fubini-Study through the bundle chart has every Ricci eigenvalue equal to 6") {
    const MetricField field = build_patch_metric(fubini_study(), spec_s1(), 0.0);
    for (const PatchPoint p : {PatchPoint{0.3, 0.2, 0.1, -0.4}, PatchPoint{0.9, 1.0, -0.7, 0.3}, PatchPoint{1.3, -2.0, 0.0, 0.5}}) {
      const LabeledEigenvalues ev = labeled_eigenvalues(field, p);
      CHECK(ev.t_dir == doctest::Approx(6.0).epsilon(1e-6));
      CHECK(ev.fiber == doctest::Approx(6.0).epsilon(1e-6));
      CHECK(ev.horizontal == doctest::Approx(6.0).epsilon(1e-6));
      CHECK(std::abs(ev.horizontal_split) < 1e-6);
      CHECK(einstein_weyl_residual(field, p).max_frame_residual < 1e-5);
      CHECK(contracted_bianchi_residual(field, p) < 1e-4);
    }
  }

  TEST_CASE("the frame is orthonormal and J is an orthogonal complex structure") {
    const AnalyticProfile prof = AnalyticProfile::random(3);
    const MetricField field = build_patch_metric(prof.functions(), spec_s1(), 0.7);
    const PatchPoint p{1.1, 0.4, 0.3, 0.6};
    const Mat4 E = field.frame_fn(p);
    const Mat4 G = field.component_fn(p);
    CHECK((E.transpose() * G * E - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    const Mat4 J = field.J_fn(p);
    CHECK((J * J + Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((J.transpose() * G * J - G).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("d omega is of type (1,1) for omega proportional to f^2 theta") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const MetricField field = build_patch_metric(AnalyticProfile::random(seed).functions(), spec_s1(), 0.9);
      CHECK(one_one_residual(field, PatchPoint{0.8, 0.0, 0.2, 0.1}) < 1e-8);
    }
  }

  TEST_CASE("x dt is not of type (1,1) while x dy is") {
    RawBundleSpec r;
    r.n = 2;
    r.epsilon = 1;
    r.k = 0;
    r.q = 1;
    r.topology = Topology::SphereBundle;
    const ProfileFunctions flat_fiber{[](double t) { return std::sin(t); }, [](double) { return 1.0; }};
    MetricField field = build_patch_metric(flat_fiber, validate_bundle_spec(r), 0.0);
    const PatchPoint p{0.8, 0.0, 0.2, 0.1};
    // d(x dt) pairs d/dt with d/dx, which J sends to the fiber and d/dy.
    field.omega_fn = [](const PatchPoint& q) { return Vec4(q.x, 0.0, 0.0, 0.0); };
    CHECK(one_one_residual(field, p) == doctest::Approx(1.0).epsilon(1e-8));
    // d(x dy) is the base area form.
    field.omega_fn = [](const PatchPoint& q) { return Vec4(0.0, 0.0, 0.0, q.x); };
    CHECK(one_one_residual(field, p) < 1e-10);
  }

  TEST_CASE("the identity endomorphism is a Killing tensor") {
    const MetricField field = build_patch_metric(AnalyticProfile::random(5).functions(), spec_s1(), 0.0);
    const EndomorphismFn identity = [](const PatchPoint&) { return Mat4(Mat4::Identity()); };
    CHECK(killing_tensor_residual(field, identity, PatchPoint{1.0, 0.3, -0.2, 0.4}, 20, 9) < 1e-7);
  }

  TEST_CASE("fiber circles curve towards the axis and the orthogonal distribution is totally geodesic") {
    const AnalyticProfile prof = AnalyticProfile::random(6);
    const MetricField field = build_patch_metric(prof.functions(), spec_s1(), 0.0);
    const PatchPoint p{0.6, 0.0, 0.3, 0.2};
    const ProfilePoint v = prof.point(p.t);
    const Vec4 H = mean_curvature_normal(field, Distribution::KillingDir, p);
    CHECK(H[0] == doctest::Approx(-v.fp / v.f).epsilon(1e-7));
    CHECK(H.tail<3>().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(mean_curvature_normal(field, Distribution::Orthogonal, p).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("unsupported bases and chart points are refused") {
    RawBundleSpec r;
    r.n = 2;
    r.epsilon = 0;
    r.k = 1;
    r.q = 2;
    r.topology = Topology::SphereBundle;
    CHECK_THROWS_AS(build_patch_metric(fubini_study(), validate_bundle_spec(r), 0.0), OracleError);
    const MetricField field = build_patch_metric(fubini_study(), spec_s1(), 0.0);
    CHECK_THROWS_AS(christoffel(field, PatchPoint{0.5, 0.0, 3.0, 3.0}), OracleError);
  }
}
