// Independent test-side oracles. These deliberately avoid the library code
// paths they are used to check.
#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Kronecker product by direct index expansion.
inline MatrixXd kron_bruteforce(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int s = 0; s < b.rows(); ++s)
        for (int t = 0; t < b.cols(); ++t)
          out(i * b.rows() + s, j * b.cols() + t) = a(i, j) * b(s, t);
  return out;
}

// Column-major vec by explicit loops.
inline VectorXd vec_bruteforce(const MatrixXd& x) {
  VectorXd v(x.size());
  int idx = 0;
  for (int j = 0; j < x.cols(); ++j)
    for (int i = 0; i < x.rows(); ++i) v(idx++) = x(i, j);
  return v;
}

// Characteristic polynomial coefficients via Faddeev-LeVerrier:
// p(z) = z^n + c_1 z^{n-1} + ... + c_n.
inline VectorXd char_poly(const MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  VectorXd c(n);
  MatrixXd mk = MatrixXd::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    const MatrixXd am = a * mk;
    c(k - 1) = -am.trace() / k;
    mk = am + c(k - 1) * MatrixXd::Identity(n, n);
  }
  return c;
}

// Max-modulus root of p via the companion matrix of the polynomial.
inline double max_abs_root(const VectorXd& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  MatrixXd comp = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -coeffs(j);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> es(comp, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Identity-weighted reduced-rank regression of dx_t on x_{t-1} with the
// lagged differences (and optionally a constant) partialled out. Returns the
// rank-r Pi estimate. This is the d2 = 1 reduction the matrix LSE must match.
inline MatrixXd reduced_rank_pi(const MatrixXd& levels, int r, int k, bool include_constant) {
  const int d = static_cast<int>(levels.rows());
  const int T = static_cast<int>(levels.cols());
  const int n = T - 1 - k;
  const int zdim = k * d + (include_constant ? 1 : 0);

  MatrixXd y(d, n), x(d, n), z(std::max(zdim, 1), n);
  z.setZero();
  for (int s = 0; s < n; ++s) {
    const int t = s + k + 1;
    y.col(s) = levels.col(t) - levels.col(t - 1);
    x.col(s) = levels.col(t - 1);
    for (int i = 1; i <= k; ++i)
      z.block((i - 1) * d, s, d, 1) = levels.col(t - i) - levels.col(t - i - 1);
    if (include_constant) z(zdim - 1, s) = 1.0;
  }

  MatrixXd r0 = y, r1 = x;
  if (zdim > 0) {
    const MatrixXd zz = z.topRows(zdim) * z.topRows(zdim).transpose();
    const MatrixXd zzi = zz.ldlt().solve(MatrixXd::Identity(zdim, zdim));
    r0 = y - y * z.topRows(zdim).transpose() * zzi * z.topRows(zdim);
    r1 = x - x * z.topRows(zdim).transpose() * zzi * z.topRows(zdim);
  }

  const MatrixXd sxx = r1 * r1.transpose();
  const MatrixXd syx = r0 * r1.transpose();
  const MatrixXd pi_full = syx * sxx.ldlt().solve(MatrixXd::Identity(d, d));
  if (r >= d) return pi_full;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (pi_full * syx.transpose() +
                                                    (pi_full * syx.transpose()).transpose()));
  MatrixXd u(d, r);
  for (int j = 0; j < r; ++j) u.col(j) = es.eigenvectors().col(d - 1 - j);
  return u * u.transpose() * pi_full;
}

inline MatrixXd randn(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

}  // namespace oracles
