#include "ewb/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ewb {

EigenTriple ricci_eigenvalues(const ProfilePoint& p, const BundleSpec& spec) {
  if (!(p.f > 0.0) || !(p.g > 0.0)) {
    std::ostringstream os;
    os << "eigenvalue formulas are singular at f=" << p.f << ", g=" << p.g;
    throw SingularPoint(os.str());
  }
  const double n1 = spec.n_complex - 1.0;
  const double s = spec.s_value();
  const double eps = spec.eps();
  const double g2 = p.g * p.g;
  const double bundle = s * s * p.f * p.f / (4.0 * g2 * g2);  // s^2 f^2 / (4 g^4)
  const double cross = p.fp * p.gp / (p.f * p.g);             // f'g' / (fg)

  EigenTriple e;
  e.lambda0 = -2.0 * n1 * p.gpp / p.g - p.fpp / p.f;
  e.lambda1 = -p.fpp / p.f + 2.0 * n1 * (bundle - cross);
  e.lambda2 = -p.gpp / p.g + (bundle - cross) + 2.0 * eps / g2 - 3.0 * bundle -
              (2.0 * n1 - 1.0) * p.gp * p.gp / g2;
  return e;
}

EigenTriple ricci_eigenvalues(const ProfileJet& jet, const BundleSpec& spec, Eigen::Index node) {
  return ricci_eigenvalues(
      ProfilePoint{jet.f[node], jet.fp[node], jet.fpp[node], jet.g[node], jet.gp[node], jet.gpp[node]},
      spec);
}

namespace {
void fill_endpoints(const ProfileJet& jet, std::vector<EigenTriple>& out) {
  const Eigen::Index n = jet.grid.size();
  Eigen::VectorXd l0(n), l1(n), l2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    l0[i] = out[i].lambda0;
    l1[i] = out[i].lambda1;
    l2[i] = out[i].lambda2;
  }
  for (Endpoint at : {Endpoint::Zero, Endpoint::End}) {
    const Eigen::Index i = at == Endpoint::Zero ? 0 : n - 1;
    out[i] = {extrapolate_to_endpoint(jet.grid, l0, at), extrapolate_to_endpoint(jet.grid, l1, at),
              extrapolate_to_endpoint(jet.grid, l2, at)};
  }
}
}  // namespace

std::vector<EigenTriple> eigen_field_serial(const ProfileJet& jet, const BundleSpec& spec) {
  const Eigen::Index n = jet.grid.size();
  std::vector<EigenTriple> out(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) out[i] = ricci_eigenvalues(jet, spec, i);
  fill_endpoints(jet, out);
  return out;
}

std::vector<EigenTriple> eigen_field(const ProfileJet& jet, const BundleSpec& spec) {
  const Eigen::Index n = jet.grid.size();
  std::vector<EigenTriple> out(n);
  bool singular = false;
#pragma omp parallel for schedule(static) reduction(|| : singular)
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    if (jet.f[i] > 0.0 && jet.g[i] > 0.0)
      out[i] = ricci_eigenvalues(jet, spec, i);
    else
      singular = true;
  }
  if (singular) throw SingularPoint("eigen_field: non-positive profile at an interior node");
  fill_endpoints(jet, out);
  return out;
}

GauduchonResiduals gauduchon_residuals(const ProfileJet& jet, const BundleSpec& spec, double C_gap) {
  const Eigen::Index n = jet.grid.size();
  GauduchonResiduals r;
  r.g1.resize(n - 2);
  r.g2.resize(n - 2);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const EigenTriple e = ricci_eigenvalues(jet, spec, i);
    r.nodes.push_back(i);
    r.g1[i - 1] = e.lambda0 - e.lambda2;
    r.g2[i - 1] = e.lambda0 - e.lambda1 - C_gap * C_gap * jet.f[i] * jet.f[i];
  }
  return r;
}

double gray_combination(const EigenTriple& e, RealDim m) {
  const KillingSplit k = killing_split(e);
  return (m.value - 4.0) * k.lambda_other + 2.0 * k.lambda_killing;
}

double gray_constant_residual(std::span<const EigenTriple> triples, const BundleSpec& spec) {
  if (triples.empty()) return 0.0;
  double lo = gray_combination(triples.front(), spec.real_dim()), hi = lo;
  for (const auto& e : triples) {
    const double v = gray_combination(e, spec.real_dim());
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

ScalarEigenvalues eigenvalues_from_scalar(double tau, double C0, RealDim m) {
  const double md = m.value;
  return {(2.0 * tau - C0) / (md + 2.0), ((md - 1.0) * C0 - (md - 4.0) * tau) / (md + 2.0)};
}

double lambda_bar(double Lambda, double div_omega, double norm_omega_sq, RealDim m) {
  return 2.0 * Lambda + div_omega - 0.5 * (m.value - 2.0) * norm_omega_sq;
}

double conformal_scalar(double lambda_killing, RealDim m) { return m.value * lambda_killing; }

double weyl_gap_from_killing(double lambda_other, double lambda_killing, double norm_xi_sq, RealDim m) {
  return (lambda_other - lambda_killing) - 0.25 * (m.value - 2.0) * norm_xi_sq;
}

double c_norm(RealDim m) { return 2.0 * std::sqrt(1.0 / (m.value - 2.0)); }

WeylConstants weyl_constants(const ProfileJet& jet, const BundleSpec& spec, double C_gap) {
  const auto field = eigen_field_serial(jet, spec);
  WeylConstants w;
  w.C_gap = C_gap;
  w.c_norm = c_norm(spec.real_dim());
  w.Lambda.resize(jet.grid.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    w.Lambda[static_cast<Eigen::Index>(i)] = field[i].lambda2;
    if (i > 0 && i + 1 < field.size()) sum += gray_combination(field[i], spec.real_dim());
  }
  w.C0 = sum / static_cast<double>(field.size() - 2);
  return w;
}

}  // namespace ewb
