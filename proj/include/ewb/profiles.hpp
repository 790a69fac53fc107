#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ewb/bundle_model.hpp"

namespace ewb {

class ProfileError : public std::runtime_error {
 public:
  enum class Code { BadCount, BadLength, NonPositiveProfile, GridMismatch, BadCsv };
  ProfileError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Chebyshev-Gauss-Lobatto collocation grid on [0, L].
struct Grid {
  double L = 0.0;
  Eigen::VectorXd nodes;  // nodes[0] = 0, nodes[last] = L, strictly increasing
  Eigen::MatrixXd diff1;
  Eigen::MatrixXd diff2;

  Eigen::Index size() const { return nodes.size(); }
};

inline constexpr int kDefaultNodeCount = 64;

Grid make_grid(double L, int count = kDefaultNodeCount);

/// Profile functions f, g and their first two derivatives sampled on a grid.
struct ProfileJet {
  Grid grid;
  Eigen::VectorXd f, fp, fpp;
  Eigen::VectorXd g, gp, gpp;
};

using ScalarFn = std::function<double(double)>;

/// Samples f and g and differentiates them with the grid matrices.
/// Throws NonPositiveProfile if f or g is not positive at an interior node.
ProfileJet sample_profile(const Grid& grid, const ScalarFn& f, const ScalarFn& g);

/// Builds a jet from explicitly known derivatives (e.g. integrator output).
ProfileJet make_jet(Grid grid, Eigen::VectorXd f, Eigen::VectorXd fp, Eigen::VectorXd fpp,
                    Eigen::VectorXd g, Eigen::VectorXd gp, Eigen::VectorXd gpp);

/// Largest scaled mismatch between the stored derivatives and grid differentiation.
double jet_consistency(const ProfileJet& jet);

/// (achieved - target) for every endpoint condition, in bcs.all() order.
std::vector<double> parity_residual(const ProfileJet& jet, const BoundaryConditionSet& bcs);

/// Barycentric interpolation of node values at t (Chebyshev weights).
double interpolate(const Grid& grid, const Eigen::VectorXd& values, double t);

/// Endpoint value from a cubic through the four nearest interior nodes.
double extrapolate_to_endpoint(const Grid& grid, const Eigen::VectorXd& values, Endpoint at);

// CSV columns: t,f,fp,fpp,g,gp,gpp. Written with round-trip precision.
void write_jet_csv(std::ostream& os, const ProfileJet& jet);
ProfileJet read_jet_csv(std::istream& is);
nlohmann::json to_json(const ProfileJet& jet);

}  // namespace ewb
