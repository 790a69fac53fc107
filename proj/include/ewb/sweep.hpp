#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewb/bundle_model.hpp"
#include "ewb/bvp_solver.hpp"

namespace ewb {

/// Logarithmic (a, C) grid of shooting residuals. Cells are indexed with a
/// varying fastest.
struct SweepConfig {
  BundleSpec spec;
  double a_min = 0.1;
  double a_max = 10.0;
  double c_min = 0.01;
  double c_max = 10.0;
  int cells = 40;
  ShotOptions shot;
};

/// Throws std::invalid_argument for empty or non-positive ranges.
void validate(const SweepConfig& cfg);

std::vector<double> log_grid(double lo, double hi, int count);

struct SweepCell {
  int i = 0;  // a index
  int j = 0;  // C index
  double a = 0.0;
  double C = 0.0;
  double residual = 0.0;  // f'(L) + 1, NaN on failure
  double norm = 0.0;      // max-norm of the full residual vector, +inf on failure
  double L = 0.0;
  std::string failure;
};

/// A sign change of f'(L) + 1 between neighbouring a values at fixed C.
struct Bracket {
  int j = 0;
  int i = 0;  // lower a index
  double C = 0.0;
  double a_lo = 0.0;
  double a_hi = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<Bracket> brackets;
};

SweepResult sweep_serial(const SweepConfig& cfg);
/// Same result as sweep_serial; cells are evaluated by OpenMP threads and
/// merged in input order.
SweepResult sweep(const SweepConfig& cfg);

std::vector<Bracket> find_brackets(const SweepConfig& cfg, const std::vector<SweepCell>& cells);

// CSV columns: i,j,a,C,residual,norm,L,failure
void write_sweep_csv(std::ostream& os, const SweepResult& result);
nlohmann::json to_json(const Bracket& b);

}  // namespace ewb
