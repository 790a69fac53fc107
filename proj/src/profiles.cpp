#include "ewb/profiles.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace ewb {

Grid make_grid(double L, int count) {
  if (count < 8) throw ProfileError(ProfileError::Code::BadCount, "grid needs at least 8 nodes, got " + std::to_string(count));
  if (!(L > 0.0) || !std::isfinite(L)) throw ProfileError(ProfileError::Code::BadLength, "grid length must be positive");

  const int N = count - 1;
  // x_j = cos(pi j / N), written with sin for exact symmetry about the midpoint.
  Eigen::VectorXd x(count);
  for (int j = 0; j <= N; ++j) x[j] = std::sin(std::numbers::pi * (N - 2.0 * j) / (2.0 * N));

  Eigen::VectorXd c = Eigen::VectorXd::Ones(count);
  c[0] = c[N] = 2.0;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(count, count);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      // x_i - x_j via the product formula keeps full relative accuracy.
      const double dx = 2.0 * std::sin(std::numbers::pi * (j + i) / (2.0 * N)) *
                        std::sin(std::numbers::pi * (j - i) / (2.0 * N));
      D(i, j) = (c[i] / c[j]) * sign / dx;
    }
  }
  // Negative-sum trick for the diagonal.
  for (int i = 0; i <= N; ++i) D(i, i) = -(D.row(i).sum());

  Grid grid;
  grid.L = L;
  grid.nodes.resize(count);
  for (int j = 0; j <= N; ++j) grid.nodes[j] = 0.5 * L * (1.0 - x[j]);
  grid.nodes[0] = 0.0;
  grid.nodes[N] = L;
  // t = L(1 - x)/2, so d/dt = -(2/L) d/dx.
  grid.diff1 = (-2.0 / L) * D;
  grid.diff2 = grid.diff1 * grid.diff1;
  return grid;
}

namespace {
void require_positive_interior(const Eigen::VectorXd& v, const Grid& grid, const char* name) {
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      std::ostringstream os;
      os << name << " not positive at interior node " << i << " (t=" << grid.nodes[i] << ", value " << v[i] << ")";
      throw ProfileError(ProfileError::Code::NonPositiveProfile, os.str());
    }
  }
}
}  // namespace

ProfileJet sample_profile(const Grid& grid, const ScalarFn& f, const ScalarFn& g) {
  ProfileJet jet;
  jet.grid = grid;
  jet.f = grid.nodes.unaryExpr(f);
  jet.g = grid.nodes.unaryExpr(g);
  require_positive_interior(jet.f, grid, "f");
  require_positive_interior(jet.g, grid, "g");
  jet.fp = grid.diff1 * jet.f;
  jet.fpp = grid.diff2 * jet.f;
  jet.gp = grid.diff1 * jet.g;
  jet.gpp = grid.diff2 * jet.g;
  return jet;
}

ProfileJet make_jet(Grid grid, Eigen::VectorXd f, Eigen::VectorXd fp, Eigen::VectorXd fpp,
                    Eigen::VectorXd g, Eigen::VectorXd gp, Eigen::VectorXd gpp) {
  const Eigen::Index n = grid.size();
  for (const auto* v : {&f, &fp, &fpp, &g, &gp, &gpp})
    if (v->size() != n) throw ProfileError(ProfileError::Code::GridMismatch, "jet column length differs from grid size");
  require_positive_interior(f, grid, "f");
  require_positive_interior(g, grid, "g");
  return ProfileJet{std::move(grid), std::move(f), std::move(fp), std::move(fpp),
                    std::move(g), std::move(gp), std::move(gpp)};
}

double jet_consistency(const ProfileJet& jet) {
  auto scaled = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
  };
  const auto& D = jet.grid.diff1;
  return std::max({scaled(D * jet.f, jet.fp), scaled(D * jet.fp, jet.fpp),
                   scaled(D * jet.g, jet.gp), scaled(D * jet.gp, jet.gpp)});
}

std::vector<double> parity_residual(const ProfileJet& jet, const BoundaryConditionSet& bcs) {
  const Eigen::Index last = jet.grid.size() - 1;
  std::vector<double> out;
  for (const auto& bc : bcs.all()) {
    const Eigen::Index i = bc.at == Endpoint::Zero ? 0 : last;
    double value = 0.0;
    switch (bc.quantity) {
      case Quantity::F: value = jet.f[i]; break;
      case Quantity::FP: value = jet.fp[i]; break;
      case Quantity::G: value = jet.g[i]; break;
      case Quantity::GP: value = jet.gp[i]; break;
    }
    out.push_back(value - bc.target);
  }
  return out;
}

double interpolate(const Grid& grid, const Eigen::VectorXd& values, double t) {
  const Eigen::Index n = grid.size();
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double diff = t - grid.nodes[j];
    if (diff == 0.0) return values[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n - 1) w *= 0.5;
    num += w * values[j] / diff;
    den += w / diff;
  }
  return num / den;
}

double extrapolate_to_endpoint(const Grid& grid, const Eigen::VectorXd& values, Endpoint at) {
  const Eigen::Index last = grid.size() - 1;
  std::array<Eigen::Index, 4> idx{};
  for (int k = 0; k < 4; ++k) idx[k] = at == Endpoint::Zero ? 1 + k : last - 1 - k;
  const double t = at == Endpoint::Zero ? grid.nodes[0] : grid.nodes[last];
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double basis = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) basis *= (t - grid.nodes[idx[b]]) / (grid.nodes[idx[a]] - grid.nodes[idx[b]]);
    result += basis * values[idx[a]];
  }
  return result;
}

void write_jet_csv(std::ostream& os, const ProfileJet& jet) {
  os << "t,f,fp,fpp,g,gp,gpp\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < jet.grid.size(); ++i) {
    os << jet.grid.nodes[i] << ',' << jet.f[i] << ',' << jet.fp[i] << ',' << jet.fpp[i] << ','
       << jet.g[i] << ',' << jet.gp[i] << ',' << jet.gpp[i] << '\n';
  }
}

ProfileJet read_jet_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,f,fp,fpp,g,gp,gpp", 0) != 0)
    throw ProfileError(ProfileError::Code::BadCsv, "profile csv: missing header t,f,fp,fpp,g,gp,gpp");
  std::vector<std::array<double, 7>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 7> row{};
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 7; ++c) {
      if (!std::getline(ls, cell, ','))
        throw ProfileError(ProfileError::Code::BadCsv, "profile csv: short row '" + line + "'");
      try {
        row[c] = std::stod(cell);
      } catch (const std::logic_error&) {
        throw ProfileError(ProfileError::Code::BadCsv, "profile csv: bad number '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  if (rows.size() < 8) throw ProfileError(ProfileError::Code::BadCsv, "profile csv: fewer than 8 rows");
  Grid grid = make_grid(rows.back()[0], static_cast<int>(rows.size()));
  const double tol = 1e-12 * grid.L;
  Eigen::VectorXd cols[6];
  for (auto& c : cols) c.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (std::abs(rows[i][0] - grid.nodes[i]) > tol)
      throw ProfileError(ProfileError::Code::GridMismatch, "profile csv: t column is not a Chebyshev-Lobatto grid");
    for (int c = 0; c < 6; ++c) cols[c][i] = rows[i][c + 1];
  }
  return make_jet(std::move(grid), cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]);
}

nlohmann::json to_json(const ProfileJet& jet) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"L", jet.grid.L}, {"t", vec(jet.grid.nodes)}, {"f", vec(jet.f)},   {"fp", vec(jet.fp)},
          {"fpp", vec(jet.fpp)}, {"g", vec(jet.g)},       {"gp", vec(jet.gp)}, {"gpp", vec(jet.gpp)}};
}

}  // namespace ewb
