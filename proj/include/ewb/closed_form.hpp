#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ewb/bundle_model.hpp"
#include "ewb/profiles.hpp"

namespace ewb {

class SingularPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ricci eigenvalues of dt^2 + f^2 theta^2 + g^2 h, labeled by distribution:
/// lambda0 on d/dt, lambda1 on the fiber (Killing) direction, lambda2 on the
/// horizontal distribution (multiplicity 2(n-1)).
struct EigenTriple {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Values of the profile pair and their derivatives at one point.
struct ProfilePoint {
  double f, fp, fpp, g, gp, gpp;
};

/// The Ricci eigenvalue formulas with n = spec.n_complex. Requires f, g > 0.
EigenTriple ricci_eigenvalues(const ProfilePoint& p, const BundleSpec& spec);
EigenTriple ricci_eigenvalues(const ProfileJet& jet, const BundleSpec& spec, Eigen::Index node);

/// Eigenvalues at every node; endpoint values are extrapolated from interior
/// nodes rather than evaluated on the axis. Reference implementation.
std::vector<EigenTriple> eigen_field_serial(const ProfileJet& jet, const BundleSpec& spec);
/// Same result as eigen_field_serial, OpenMP over nodes.
std::vector<EigenTriple> eigen_field(const ProfileJet& jet, const BundleSpec& spec);

/// Interior-node residuals of the standard-metric conditions
///   G1 = lambda0 - lambda2,  G2 = lambda0 - lambda1 - C^2 f^2.
struct GauduchonResiduals {
  std::vector<Eigen::Index> nodes;
  Eigen::VectorXd g1;
  Eigen::VectorXd g2;

  double max_g1() const { return g1.size() ? g1.cwiseAbs().maxCoeff() : 0.0; }
  double max_g2() const { return g2.size() ? g2.cwiseAbs().maxCoeff() : 0.0; }
};

GauduchonResiduals gauduchon_residuals(const ProfileJet& jet, const BundleSpec& spec, double C_gap);

// Index bridge. With the Killing field along the fiber, the multiplicity-one
// eigenvalue is lambda1 of the triple and the merged other eigenvalue is
// lambda0 = lambda2.
struct KillingSplit {
  double lambda_killing;
  double lambda_other;
};
inline KillingSplit killing_split(const EigenTriple& e) { return {e.lambda1, e.lambda0}; }

/// (m-4) lambda_other + 2 lambda_killing; constant on Einstein-Weyl solutions.
double gray_combination(const EigenTriple& e, RealDim m);
/// max - min of gray_combination over the triples.
double gray_constant_residual(std::span<const EigenTriple> triples, const BundleSpec& spec);

/// Eigenvalues recovered from the scalar curvature tau and the Gray constant
/// C0. Labeling here: lambda0 is the simple (Killing) eigenvalue, lambda1 has
/// multiplicity m-1, so tau = (m-1) lambda1 + lambda0 and C0 = (m-4) lambda1 + 2 lambda0.
struct ScalarEigenvalues {
  double lambda1;
  double lambda0;
};
ScalarEigenvalues eigenvalues_from_scalar(double tau, double C0, RealDim m);

/// Lambda_bar = 2 Lambda + div(omega) - (m-2)/2 |omega|^2.
double lambda_bar(double Lambda, double div_omega, double norm_omega_sq, RealDim m);

/// Conformal scalar curvature m * lambda_killing.
double conformal_scalar(double lambda_killing, RealDim m);

/// (lambda_other - lambda_killing) - (m-2)/4 |xi|^2.
double weyl_gap_from_killing(double lambda_other, double lambda_killing, double norm_xi_sq, RealDim m);

/// 1-form normalization c = 2 sqrt(1/(m-2)).
double c_norm(RealDim m);

struct WeylConstants {
  double C_gap = 0.0;
  double C0 = 0.0;          // mean of the Gray combination over interior nodes
  Eigen::VectorXd Lambda;   // horizontal eigenvalue at every node
  double c_norm = 0.0;
};

WeylConstants weyl_constants(const ProfileJet& jet, const BundleSpec& spec, double C_gap);

}  // namespace ewb
