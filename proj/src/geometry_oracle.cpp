#include "ewb/geometry_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ewb {

namespace {

// Fourth-order central difference of a vector- or matrix-valued function
// along coordinate k.
template <class Fn>
auto partial(const Fn& fn, const PatchPoint& p, int k, double h) {
  auto at = [&](double offset) {
    Vec4 c = p.coords();
    c[k] += offset;
    return fn(PatchPoint::from(c));
  };
  auto result = at(-2.0 * h);
  result = (result - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
  return result;
}

double max_abs(const Christoffel& a) {
  double m = 0.0;
  for (const auto& M : a) m = std::max(m, M.cwiseAbs().maxCoeff());
  return m;
}

Mat4 standard_J() {
  Mat4 J0 = Mat4::Zero();
  J0(1, 0) = 1.0;
  J0(0, 1) = -1.0;
  J0(3, 2) = 1.0;
  J0(2, 3) = -1.0;
  return J0;
}

using ConnectionFn = std::function<Christoffel(const PatchPoint&)>;

// rho_jk = d_i G^i_jk - d_j G^i_ik + G^i_im G^m_jk - G^i_jm G^m_ik
Mat4 ricci_of_connection(const ConnectionFn& connection, const PatchPoint& p, double h) {
  const Christoffel G = connection(p);
  std::array<Christoffel, 4> dG;  // dG[l][k](i, j) = d_l Gamma^k_ij
  for (int l = 0; l < 4; ++l) {
    auto at = [&](double offset) {
      Vec4 c = p.coords();
      c[l] += offset;
      return connection(PatchPoint::from(c));
    };
    const Christoffel m2 = at(-2.0 * h), m1 = at(-h), p1 = at(h), p2 = at(2.0 * h);
    for (int k = 0; k < 4; ++k) dG[l][k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
  }
  Mat4 rho = Mat4::Zero();
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      double v = 0.0;
      for (int i = 0; i < 4; ++i) {
        v += dG[i][i](j, k) - dG[j][i](i, k);
        for (int m = 0; m < 4; ++m) v += G[i](i, m) * G[m](j, k) - G[i](j, m) * G[m](i, k);
      }
      rho(j, k) = v;
    }
  }
  return rho;
}

void check_point(const PatchPoint& p) {
  if (!std::isfinite(p.t) || !std::isfinite(p.psi) || !std::isfinite(p.x) || !std::isfinite(p.y))
    throw OracleError(OracleError::Code::BadPoint, "oracle point has non-finite coordinates");
  if (p.x * p.x + p.y * p.y > kMaxChartRadiusSq)
    throw OracleError(OracleError::Code::BadPoint, "oracle point lies outside the stereographic chart");
}

}  // namespace

MetricField build_patch_metric(const ProfileFunctions& profiles, const BundleSpec& spec, double omega_amplitude) {
  if (spec.n_complex != 2 || spec.epsilon != BaseSign::Positive)
    throw OracleError(OracleError::Code::UnsupportedBase,
                      "coordinate oracle only covers the two-sphere base (n = 2, epsilon = 1)");
  const double s = spec.s_value();
  auto f_of = profiles.f;
  auto g_of = profiles.g;

  auto conformal = [](const PatchPoint& p) {
    const double q = 1.0 + p.x * p.x + p.y * p.y;
    return 2.0 / (q * q);
  };
  // theta = dpsi + s A as a covector in (t, psi, x, y).
  auto theta = [s](const PatchPoint& p) {
    const double q = 1.0 + p.x * p.x + p.y * p.y;
    return Vec4(0.0, 1.0, -s * p.y / q, s * p.x / q);
  };
  auto positive = [](double v, const char* name, const PatchPoint& p) {
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "profile " << name << " is not positive at t=" << p.t;
      throw OracleError(OracleError::Code::BadPoint, os.str());
    }
    return v;
  };

  MetricField field;
  field.component_fn = [=](const PatchPoint& p) {
    const double f = positive(f_of(p.t), "f", p);
    const double g = positive(g_of(p.t), "g", p);
    const Vec4 th = theta(p);
    Mat4 G = f * f * th * th.transpose();
    G(0, 0) += 1.0;
    G(2, 2) += g * g * conformal(p);
    G(3, 3) += g * g * conformal(p);
    return G;
  };
  field.omega_fn = [=](const PatchPoint& p) {
    const double f = f_of(p.t);
    return Vec4(omega_amplitude * f * f * theta(p));
  };
  field.frame_fn = [=](const PatchPoint& p) {
    const double f = positive(f_of(p.t), "f", p);
    const double g = positive(g_of(p.t), "g", p);
    const Vec4 th = theta(p);
    const double scale = 1.0 / (g * std::sqrt(conformal(p)));
    Mat4 E = Mat4::Zero();
    E(0, 0) = 1.0;
    E(1, 1) = 1.0 / f;
    // Horizontal lifts d_x - theta_x d_psi and d_y - theta_y d_psi.
    E(2, 2) = scale;
    E(1, 2) = -th[2] * scale;
    E(3, 3) = scale;
    E(1, 3) = -th[3] * scale;
    return E;
  };
  auto frame = field.frame_fn;
  field.J_fn = [frame](const PatchPoint& p) {
    const Mat4 E = frame(p);
    return Mat4(E * standard_J() * E.inverse());
  };
  return field;
}

MetricField coordinate_metric(std::function<Mat4(const PatchPoint&)> components) {
  MetricField field;
  field.component_fn = components;
  field.omega_fn = [](const PatchPoint&) { return Vec4::Zero().eval(); };
  field.frame_fn = [components](const PatchPoint& p) {
    // G = L L^T, E = L^{-T} gives E^T G E = I.
    const Eigen::LLT<Mat4> llt(components(p));
    const Mat4 Linv = llt.matrixL().solve(Mat4::Identity());
    return Mat4(Linv.transpose());
  };
  auto frame = field.frame_fn;
  field.J_fn = [frame](const PatchPoint& p) {
    const Mat4 E = frame(p);
    return Mat4(E * standard_J() * E.inverse());
  };
  return field;
}

Christoffel christoffel_unchecked(const MetricField& field, const PatchPoint& p, double step) {
  check_point(p);
  const Mat4 Ginv = field.component_fn(p).inverse();
  std::array<Mat4, 4> dG;  // dG[k](i, j) = d_k g_ij
  for (int k = 0; k < 4; ++k) dG[k] = partial(field.component_fn, p, k, step);
  Christoffel out;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double v = 0.0;
        for (int l = 0; l < 4; ++l) v += Ginv(k, l) * (dG[i](l, j) + dG[j](l, i) - dG[l](i, j));
        out[k](i, j) = 0.5 * v;
      }
    }
  }
  return out;
}

Christoffel christoffel(const MetricField& field, const PatchPoint& p, double step) {
  const Christoffel coarse = christoffel_unchecked(field, p, step);
  const Christoffel fine = christoffel_unchecked(field, p, 0.5 * step);
  Christoffel diff;
  for (int k = 0; k < 4; ++k) diff[k] = coarse[k] - fine[k];
  const double err = max_abs(diff) / std::max(1.0, max_abs(fine));
  if (err > 1e-5) {
    std::ostringstream os;
    os << "Christoffel symbols change by " << err << " when the step is halved from " << step;
    throw OracleError(OracleError::Code::StepTooLarge, os.str());
  }
  return fine;
}

Mat4 ricci_numeric(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  check_point(p);
  christoffel(field, p, steps.metric);  // step validation at the centre point
  const ConnectionFn lc = [&](const PatchPoint& q) { return christoffel_unchecked(field, q, steps.metric); };
  const Mat4 rho = ricci_of_connection(lc, p, steps.connection);
  const double asym = (rho - rho.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-5 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "numerical Levi-Civita Ricci tensor is asymmetric by " << asym;
    throw OracleError(OracleError::Code::Asymmetric, os.str());
  }
  return 0.5 * (rho + rho.transpose());
}

Mat4 weyl_ricci(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  check_point(p);
  christoffel(field, p, steps.metric);
  const ConnectionFn weyl = [&](const PatchPoint& q) {
    Christoffel G = christoffel_unchecked(field, q, steps.metric);
    const Mat4 g = field.component_fn(q);
    const Vec4 w = field.omega_fn(q);
    const Vec4 w_up = g.ldlt().solve(w);
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double v = 0.5 * g(i, j) * w_up[k];
          if (k == j) v -= 0.5 * w[i];
          if (k == i) v -= 0.5 * w[j];
          G[k](i, j) += v;
        }
      }
    }
    return G;
  };
  return ricci_of_connection(weyl, p, steps.connection);
}

Mat4 ricci_endomorphism(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  return field.component_fn(p).ldlt().solve(ricci_numeric(field, p, steps));
}

Mat4 frame_components(const MetricField& field, const PatchPoint& p, const Mat4& tensor) {
  const Mat4 E = field.frame_fn(p);
  return E.transpose() * tensor * E;
}

LabeledEigenvalues labeled_eigenvalues(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  const Mat4 G = field.component_fn(p);
  const Mat4 ric = ricci_numeric(field, p, steps);
  const Mat4 S = G.ldlt().solve(ric);
  const Mat4 E = field.frame_fn(p);

  LabeledEigenvalues out;
  std::array<double, 4> rq{};
  for (int a = 0; a < 4; ++a) {
    const Vec4 e = E.col(a);
    rq[a] = e.dot(ric * e);  // frame vectors are unit
    const Vec4 r = S * e - rq[a] * e;
    out.eigvec_residual = std::max(out.eigvec_residual, std::sqrt(std::max(0.0, r.dot(G * r))));
  }
  out.t_dir = rq[0];
  out.fiber = rq[1];
  out.horizontal = 0.5 * (rq[2] + rq[3]);
  out.horizontal_split = rq[2] - rq[3];

  const Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> solver(ric, G);
  const Vec4 ev = solver.eigenvalues();
  for (int a = 0; a < 4; ++a) out.spectrum[a] = ev[a];
  std::sort(out.spectrum.begin(), out.spectrum.end());
  return out;
}

Mat4 d_omega(const MetricField& field, const PatchPoint& p, double step) {
  check_point(p);
  Mat4 dw = Mat4::Zero();
  std::array<Vec4, 4> dk;
  for (int k = 0; k < 4; ++k) dk[k] = partial(field.omega_fn, p, k, step);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) dw(i, j) = dk[i][j] - dk[j][i];
  return dw;
}

double one_one_residual(const MetricField& field, const PatchPoint& p, double step) {
  const Mat4 dw = d_omega(field, p, step);
  const Mat4 J = field.J_fn(p);
  return (J.transpose() * dw * J - dw).cwiseAbs().maxCoeff();
}

double killing_tensor_residual(const MetricField& field, const EndomorphismFn& S, const PatchPoint& p, int trials,
                               std::uint64_t seed, const FdSteps& steps) {
  check_point(p);
  const Mat4 G = field.component_fn(p);
  const Mat4 E = field.frame_fn(p);
  const Christoffel Gamma = christoffel(field, p, steps.metric);
  const Mat4 S0 = S(p);
  // A[k] = (nabla_k S) as an endomorphism.
  std::array<Mat4, 4> A;
  for (int k = 0; k < 4; ++k) {
    Mat4 Gk;  // Gk(i, m) = Gamma^i_km
    for (int i = 0; i < 4; ++i)
      for (int m = 0; m < 4; ++m) Gk(i, m) = Gamma[i](k, m);
    A[k] = partial(S, p, k, steps.tensor) + Gk * S0 - S0 * Gk;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Vec4 c;
    for (int a = 0; a < 4; ++a) c[a] = normal(rng);
    c.normalize();
    const Vec4 X = E * c;
    Vec4 v = Vec4::Zero();
    for (int k = 0; k < 4; ++k) v += X[k] * (A[k] * X);
    worst = std::max(worst, std::abs(X.dot(G * v)));
  }
  return worst;
}

Vec4 mean_curvature_normal(const MetricField& field, Distribution which, const PatchPoint& p, const FdSteps& steps) {
  check_point(p);
  const Mat4 G = field.component_fn(p);
  const Mat4 E = field.frame_fn(p);
  const Christoffel Gamma = christoffel(field, p, steps.metric);
  std::array<Mat4, 4> dE;
  for (int k = 0; k < 4; ++k) dE[k] = partial(field.frame_fn, p, k, steps.connection);

  auto self_derivative = [&](int a) {
    const Vec4 X = E.col(a);
    Vec4 v = Vec4::Zero();
    for (int j = 0; j < 4; ++j) v += X[j] * dE[j].col(a);
    for (int k = 0; k < 4; ++k) v[k] += X.dot(Gamma[k] * X);
    return v;
  };
  const Vec4 U = E.col(1);
  if (which == Distribution::KillingDir) {
    const Vec4 v = self_derivative(1);
    return v - U.dot(G * v) * U;
  }
  Vec4 best = Vec4::Zero();
  for (int a : {0, 2, 3}) {
    const Vec4 proj = U.dot(G * self_derivative(a)) * U;
    if (std::sqrt(proj.dot(G * proj)) > std::sqrt(best.dot(G * best))) best = proj;
  }
  return best;
}

double contracted_bianchi_residual(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  check_point(p);
  const EndomorphismFn S = [&](const PatchPoint& q) { return ricci_endomorphism(field, q, steps); };
  const Christoffel Gamma = christoffel(field, p, steps.metric);
  const Mat4 S0 = S(p);
  std::array<Mat4, 4> dS;
  for (int k = 0; k < 4; ++k) dS[k] = partial(S, p, k, steps.tensor);

  Vec4 r;
  for (int j = 0; j < 4; ++j) {
    double div = 0.0;
    for (int i = 0; i < 4; ++i) {
      div += dS[i](i, j);
      for (int m = 0; m < 4; ++m) div += Gamma[i](i, m) * S0(m, j) - Gamma[m](i, j) * S0(i, m);
    }
    const double dtau = dS[j].trace();
    r[j] = div - 0.5 * dtau;
  }
  const Vec4 frame_r = field.frame_fn(p).transpose() * r;
  return frame_r.cwiseAbs().maxCoeff();
}

EinsteinWeylResidual einstein_weyl_residual(const MetricField& field, const PatchPoint& p, const FdSteps& steps) {
  const Mat4 G = field.component_fn(p);
  const Vec4 w = field.omega_fn(p);
  const double m = 4.0;
  const Mat4 E = ricci_numeric(field, p, steps) + 0.25 * (m - 2.0) * w * w.transpose();
  EinsteinWeylResidual out;
  out.Lambda = G.ldlt().solve(E).trace() / m;
  out.max_frame_residual = frame_components(field, p, E - out.Lambda * G).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace ewb
