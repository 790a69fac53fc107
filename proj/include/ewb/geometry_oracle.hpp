#pragma once

// Finite-difference curvature of the cohomogeneity-one metric on an explicit
// coordinate patch (t, psi, x, y) of the circle bundle over S^2. Nothing here
// uses the closed-form eigenvalue formulas.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "ewb/bundle_model.hpp"
#include "ewb/profiles.hpp"

namespace ewb {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<Mat4, 4>;

class OracleError : public std::runtime_error {
 public:
  enum class Code { UnsupportedBase, StepTooLarge, BadPoint, Asymmetric };
  OracleError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Coordinates t in (0, L), fiber angle psi, stereographic chart (x, y) on S^2.
struct PatchPoint {
  double t = 0.0;
  double psi = 0.0;
  double x = 0.0;
  double y = 0.0;

  Vec4 coords() const { return {t, psi, x, y}; }
  static PatchPoint from(const Vec4& c) { return {c[0], c[1], c[2], c[3]}; }
};

inline constexpr double kMaxChartRadiusSq = 10.0;

/// Jet-as-callables: the two profile functions.
struct ProfileFunctions {
  ScalarFn f;
  ScalarFn g;
};

/// A metric on the 4-coordinate patch with its Weyl 1-form, complex structure
/// and an orthonormal frame adapted to (d/dt, fiber, horizontal, horizontal).
struct MetricField {
  std::function<Mat4(const PatchPoint&)> component_fn;
  std::function<Vec4(const PatchPoint&)> omega_fn;  // covector components
  std::function<Mat4(const PatchPoint&)> J_fn;      // column j holds J(d_j)
  std::function<Mat4(const PatchPoint&)> frame_fn;  // columns are frame vectors
};

/// dt^2 + f^2 (dpsi + s A)^2 + g^2 h with h the round metric of Gauss
/// curvature 2 and dA the area form of h, A = (x dy - y dx)/(1 + x^2 + y^2).
/// The 1-form is omega = omega_amplitude * f^2 (dpsi + s A).
/// Only n = 2, epsilon = 1 is supported.
MetricField build_patch_metric(const ProfileFunctions& profiles, const BundleSpec& spec, double omega_amplitude);

/// Wraps an arbitrary component function (omega = 0, Cholesky frame,
/// J pairing (0,1) and (2,3) in that frame).
MetricField coordinate_metric(std::function<Mat4(const PatchPoint&)> components);

/// Finite-difference step sizes for the nested stencils: metric derivatives,
/// connection derivatives, and tensor derivatives.
struct FdSteps {
  double metric = 1e-3;
  double connection = 1e-3;
  double tensor = 1e-2;
};

/// Levi-Civita connection from fourth-order central differences, verified
/// against the half step. Throws StepTooLarge when they disagree beyond 1e-5.
Christoffel christoffel(const MetricField& field, const PatchPoint& p, double step = 1e-3);
Christoffel christoffel_unchecked(const MetricField& field, const PatchPoint& p, double step);

/// Ricci tensor (covariant, symmetric).
Mat4 ricci_numeric(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Ricci tensor of the Weyl connection D = nabla - 1/2 (omega x Id + Id x omega - g x omega#).
/// Not symmetric in general.
Mat4 weyl_ricci(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Ricci endomorphism S = g^{-1} Ric.
Mat4 ricci_endomorphism(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Ricci eigenvalues labeled by the eigenvector direction in the adapted frame.
struct LabeledEigenvalues {
  double t_dir = 0.0;
  double fiber = 0.0;
  double horizontal = 0.0;          // mean of the two horizontal Rayleigh quotients
  double horizontal_split = 0.0;    // difference of the two
  double eigvec_residual = 0.0;     // max |S e - lambda e| over frame vectors
  std::array<double, 4> spectrum{}; // sorted generalized eigenvalues
};

LabeledEigenvalues labeled_eigenvalues(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Exterior derivative of omega, (d omega)_ij = d_i omega_j - d_j omega_i.
Mat4 d_omega(const MetricField& field, const PatchPoint& p, double step = 1e-3);

/// max over coordinate pairs of |d omega(JX, JY) - d omega(X, Y)|.
double one_one_residual(const MetricField& field, const PatchPoint& p, double step = 1e-3);

using EndomorphismFn = std::function<Mat4(const PatchPoint&)>;

/// max over random unit X of |g((nabla_X S) X, X)|.
double killing_tensor_residual(const MetricField& field, const EndomorphismFn& S, const PatchPoint& p,
                               int trials, std::uint64_t seed, const FdSteps& steps = {});

enum class Distribution { KillingDir, Orthogonal };

/// KillingDir: component of nabla_U U orthogonal to the unit fiber field U.
/// Orthogonal: the largest U-component of nabla_X X over the other frame fields.
Vec4 mean_curvature_normal(const MetricField& field, Distribution which, const PatchPoint& p,
                           const FdSteps& steps = {});

/// max frame component of div S - d(tr S)/2.
double contracted_bianchi_residual(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Residual of Ric + (m-2)/4 omega x omega = Lambda g, with Lambda fitted from the trace.
struct EinsteinWeylResidual {
  double max_frame_residual = 0.0;
  double Lambda = 0.0;
};
EinsteinWeylResidual einstein_weyl_residual(const MetricField& field, const PatchPoint& p, const FdSteps& steps = {});

/// Frame components F^T M F of a covariant 2-tensor.
Mat4 frame_components(const MetricField& field, const PatchPoint& p, const Mat4& tensor);

}  // namespace ewb
