#include "ewb/sweep.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ewb {

void validate(const SweepConfig& cfg) {
  if (!(cfg.a_min > 0.0) || !(cfg.c_min > 0.0))
    throw std::invalid_argument("sweep ranges must be positive for a logarithmic grid");
  if (!(cfg.a_max > cfg.a_min)) throw std::invalid_argument("empty a range: a-max must exceed a-min");
  if (!(cfg.c_max > cfg.c_min)) throw std::invalid_argument("empty C range: c-max must exceed c-min");
  if (cfg.cells < 2) throw std::invalid_argument("sweep needs at least 2 cells per axis");
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(l0 + (l1 - l0) * k / (count - 1.0));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

SweepCell evaluate_cell(const SweepConfig& cfg, const std::vector<double>& as, const std::vector<double>& cs,
                        std::size_t index) {
  const int n = cfg.cells;
  SweepCell c;
  c.i = static_cast<int>(index % static_cast<std::size_t>(n));
  c.j = static_cast<int>(index / static_cast<std::size_t>(n));
  c.a = as[static_cast<std::size_t>(c.i)];
  c.C = cs[static_cast<std::size_t>(c.j)];
  const ShootingResidual r = shooting_residual(c.a, c.C, cfg.spec, cfg.shot);
  c.residual = r.values[0];
  c.norm = r.norm();
  c.L = r.L;
  c.failure = r.failure;
  return c;
}

}  // namespace

std::vector<Bracket> find_brackets(const SweepConfig& cfg, const std::vector<SweepCell>& cells) {
  std::vector<Bracket> out;
  const int n = cfg.cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const SweepCell& lo = cells[static_cast<std::size_t>(j * n + i)];
      const SweepCell& hi = cells[static_cast<std::size_t>(j * n + i + 1)];
      if (!std::isfinite(lo.residual) || !std::isfinite(hi.residual)) continue;
      if ((lo.residual < 0.0) != (hi.residual < 0.0))
        out.push_back({j, i, lo.C, lo.a, hi.a, lo.residual, hi.residual});
    }
  }
  return out;
}

SweepResult sweep_serial(const SweepConfig& cfg) {
  validate(cfg);
  const auto as = log_grid(cfg.a_min, cfg.a_max, cfg.cells);
  const auto cs = log_grid(cfg.c_min, cfg.c_max, cfg.cells);
  SweepResult res;
  const std::size_t total = static_cast<std::size_t>(cfg.cells) * static_cast<std::size_t>(cfg.cells);
  res.cells.reserve(total);
  for (std::size_t k = 0; k < total; ++k) res.cells.push_back(evaluate_cell(cfg, as, cs, k));
  res.brackets = find_brackets(cfg, res.cells);
  return res;
}

SweepResult sweep(const SweepConfig& cfg) {
  validate(cfg);
  const auto as = log_grid(cfg.a_min, cfg.a_max, cfg.cells);
  const auto cs = log_grid(cfg.c_min, cfg.c_max, cfg.cells);
  const long total = static_cast<long>(cfg.cells) * cfg.cells;
  SweepResult res;
  res.cells.resize(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < total; ++k)
    res.cells[static_cast<std::size_t>(k)] = evaluate_cell(cfg, as, cs, static_cast<std::size_t>(k));
  res.brackets = find_brackets(cfg, res.cells);
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "i,j,a,C,residual,norm,L,failure\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& c : result.cells) {
    os << c.i << ',' << c.j << ',' << c.a << ',' << c.C << ',';
    if (std::isfinite(c.residual)) os << c.residual;
    os << ',';
    if (std::isfinite(c.norm)) os << c.norm;
    os << ',';
    if (std::isfinite(c.L)) os << c.L;
    os << ',' << c.failure << '\n';
  }
}

nlohmann::json to_json(const Bracket& b) {
  return {{"j", b.j}, {"i", b.i}, {"C", b.C}, {"a_lo", b.a_lo}, {"a_hi", b.a_hi}, {"r_lo", b.r_lo}, {"r_hi", b.r_hi}};
}

}  // namespace ewb
