#include "cmar/cvar.hpp"

#include <cmath>
#include <stdexcept>

namespace cmar {

namespace {

struct PartialledMoments {
  MatrixXd s00, s11, s01;     // cross moments of the z-partialled residuals
  MatrixXd myz, mxz, mzz;     // raw moments against the z block
  MatrixXd r0, r1;            // partialled residual columns
  int n = 0;
  int zdim = 0;
  bool ridged = false;
};

PartialledMoments partial_out(const MatrixXd& levels, int k, bool include_constant) {
  const int d = static_cast<int>(levels.rows());
  const int T = static_cast<int>(levels.cols());
  if (T < k + 2) throw std::invalid_argument("cvar_fit: T must be at least k + 2");

  const int n = T - 1 - k;
  const int zdim = k * d + (include_constant ? 1 : 0);

  MatrixXd y(d, n), x(d, n), z(zdim, n);
  for (int s = 0; s < n; ++s) {
    const int t = s + k + 1;  // 0-based time of dX_t
    y.col(s) = levels.col(t) - levels.col(t - 1);
    x.col(s) = levels.col(t - 1);
    for (int i = 1; i <= k; ++i)
      z.block((i - 1) * d, s, d, 1) = levels.col(t - i) - levels.col(t - i - 1);
    if (include_constant) z(zdim - 1, s) = 1.0;
  }

  PartialledMoments m;
  m.n = n;
  m.zdim = zdim;
  if (zdim > 0) {
    m.myz = y * z.transpose();
    m.mxz = x * z.transpose();
    m.mzz = z * z.transpose();
    const MatrixXd zy = solve_spd(m.mzz, z * y.transpose(), &m.ridged);
    const MatrixXd zx = solve_spd(m.mzz, z * x.transpose(), &m.ridged);
    m.r0 = y - zy.transpose() * z;
    m.r1 = x - zx.transpose() * z;
  } else {
    m.r0 = y;
    m.r1 = x;
  }
  m.s00 = m.r0 * m.r0.transpose() / n;
  m.s11 = m.r1 * m.r1.transpose() / n;
  m.s01 = m.r0 * m.r1.transpose() / n;
  return m;
}

}  // namespace

CvarModel cvar_fit(const MatrixXd& levels, int r, int k, bool include_constant,
                   CvarWeighting weighting) {
  const int d = static_cast<int>(levels.rows());
  if (r < 0 || r > d) throw std::invalid_argument("cvar_fit: rank must satisfy 0 <= r <= d");
  if (k < 0) throw std::invalid_argument("cvar_fit: k must be non-negative");

  PartialledMoments m = partial_out(levels, k, include_constant);

  CvarModel out;
  out.d = d;
  out.r = r;
  out.k = k;
  out.ridged = m.ridged;

  MatrixXd pi = MatrixXd::Zero(d, d);
  if (r == d) {
    pi = solve_spd(m.s11, m.s01.transpose(), &out.ridged).transpose();
  } else if (r > 0) {
    if (weighting == CvarWeighting::Johansen) {
      // Whitened symmetric form of |lambda S11 - S10 S00^{-1} S01| = 0.
      const MatrixXd w = spd_inv_sqrt(m.s11);
      const MatrixXd s00i_s01 = solve_spd(m.s00, m.s01, &out.ridged);
      const MatrixXd kmat = w * m.s01.transpose() * s00i_s01 * w;
      const MatrixXd v = leading_eigenvectors(kmat, r);
      const MatrixXd beta_raw = w * v;  // beta' S11 beta = I
      const MatrixXd alpha_raw = m.s01 * beta_raw;
      pi = alpha_raw * beta_raw.transpose();
    } else {
      const MatrixXd pi_full = solve_spd(m.s11, m.s01.transpose(), &out.ridged).transpose();
      const MatrixXd u = leading_eigenvectors(pi_full * m.s01.transpose(), r);
      pi = u * u.transpose() * pi_full;
    }
  }

  if (r > 0) {
    // Canonical (alpha, beta): beta = orthonormal sign-fixed row-space basis.
    auto [alpha, beta] = factor_low_rank(pi, r);
    out.alpha = std::move(alpha);
    out.beta = std::move(beta);
  } else {
    out.alpha = MatrixXd::Zero(d, 0);
    out.beta = MatrixXd::Zero(d, 0);
  }

  out.gamma.assign(k, MatrixXd::Zero(d, d));
  out.d_const = VectorXd::Zero(d);
  if (m.zdim > 0) {
    const MatrixXd psi =
        (m.myz - pi * m.mxz) * solve_spd(m.mzz, MatrixXd::Identity(m.zdim, m.zdim), &out.ridged);
    for (int i = 0; i < k; ++i) out.gamma[i] = psi.block(0, i * d, d, d);
    if (include_constant) out.d_const = psi.col(m.zdim - 1);
  }

  const MatrixXd resid = m.r0 - pi * m.r1;
  out.sigma = resid * resid.transpose() / m.n;
  return out;
}

MatrixXd van_loan_rearrangement(const MatrixXd& pi, int d1, int d2) {
  if (pi.rows() != d1 * d2 || pi.cols() != d1 * d2)
    throw std::invalid_argument("van_loan_rearrangement: matrix must be d1*d2 square");
  MatrixXd r(d2 * d2, d1 * d1);
  for (int j = 0; j < d2; ++j)
    for (int i = 0; i < d2; ++i)
      r.row(j * d2 + i) = vec(pi.block(i * d1, j * d1, d1, d1)).transpose();
  return r;
}

std::pair<MatrixXd, MatrixXd> nearest_kronecker(const MatrixXd& pi, int d1, int d2) {
  const MatrixXd r = van_loan_rearrangement(pi, d1, d2);
  Eigen::JacobiSVD<MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = svd.singularValues()(0);
  const MatrixXd a2 = vec_inverse(std::sqrt(s) * svd.matrixU().col(0), d2, d2);
  const MatrixXd a1 = vec_inverse(std::sqrt(s) * svd.matrixV().col(0), d1, d1);
  return {a2, a1};
}

}  // namespace cmar
