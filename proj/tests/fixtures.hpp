#pragma once

#include "ewb/bvp_solver.hpp"

namespace ewb::testing {

inline BundleSpec spec(int n, int eps, int k, int q, Topology top = Topology::SphereBundle) {
  RawBundleSpec r;
  r.n = n;
  r.epsilon = eps;
  r.k = k;
  r.q = q;
  r.topology = top;
  return validate_bundle_spec(r);
}

/// The reference solve (n = 2, s = 1, epsilon = 1), computed once per process.
inline const SolutionProfile& reference_solution() {
  static const SolutionProfile sol = solve(spec(2, 1, 1, 2), 1.0, 0.3);
  return sol;
}

}  // namespace ewb::testing
