// Dense linear-algebra vocabulary shared by the whole library: Kronecker
// products, column-major vectorization, subspace projections and spectral
// quantities. All functions are pure and accept arbitrary Eigen expressions.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Kronecker product a (x) b. Satisfies kron(A2, A1) * vec(X) = vec(A1 X A2')
// under column-major vec.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Mat = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-major vectorization.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
vec(const Eigen::MatrixBase<Derived>& x) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = x;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(
      m.data(), m.size());
}

// Inverse of vec: reshape a length m*n vector into an m x n matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
vec_inverse(const Eigen::MatrixBase<Derived>& v, Eigen::Index m, Eigen::Index n) {
  if (v.size() != m * n)
    throw std::invalid_argument("vec_inverse: length " + std::to_string(v.size()) +
                                " does not match shape " + std::to_string(m) + "x" +
                                std::to_string(n));
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> tmp = v;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>(
      tmp.data(), m, n);
}

// Orthogonal projection beta (beta' beta)^{-1} beta' onto col(beta).
// Requires full column rank (relative singular-value test).
inline MatrixXd projection(const MatrixXd& beta) {
  if (beta.cols() == 0) return MatrixXd::Zero(beta.rows(), beta.rows());
  Eigen::JacobiSVD<MatrixXd> svd(beta, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * s(0))
    throw std::runtime_error("projection: matrix is rank deficient");
  const MatrixXd u = svd.matrixU();
  return u * u.transpose();
}

// Largest eigenvalue modulus of a square matrix.
inline double spectral_radius(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix not square");
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw std::invalid_argument("spectral_radius: non-finite entries");
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigen solver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Largest singular value.
inline double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// Symmetric part, used before self-adjoint eigensolves of algebraically
// symmetric products.
inline MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Principal square root of an SPD matrix via symmetric eigendecomposition.
// Eigenvalues are floored at `floor_eig` so mildly indefinite inputs survive.
inline MatrixXd spd_sqrt(const MatrixXd& s, double floor_eig = 0.0) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s));
  VectorXd d = es.eigenvalues().cwiseMax(floor_eig);
  return es.eigenvectors() * d.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

// Inverse principal square root of an SPD matrix.
inline MatrixXd spd_inv_sqrt(const MatrixXd& s, double floor_eig = 1e-300) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s));
  VectorXd d = es.eigenvalues().cwiseMax(floor_eig);
  return es.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// Leading r unit eigenvectors (descending eigenvalue) of a symmetric matrix.
inline MatrixXd leading_eigenvectors(const MatrixXd& sym, int r) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(sym));
  const Eigen::Index d = sym.rows();
  MatrixXd u(d, r);
  for (int j = 0; j < r; ++j) u.col(j) = es.eigenvectors().col(d - 1 - j);
  return u;
}

// Solve S x = b for symmetric positive (semi)definite S. If S is numerically
// singular a ridge lambda = 1e-10 * trace/dim is added and *ridged is set.
inline MatrixXd solve_spd(const MatrixXd& s, const MatrixXd& b, bool* ridged = nullptr) {
  MatrixXd sym = symmetrize(s);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  const VectorXd& ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() <= 1e-12 * emax || emax == 0.0) {
    const double lambda = 1e-10 * (sym.trace() / static_cast<double>(sym.rows())) + 1e-300;
    sym += std::abs(lambda) * MatrixXd::Identity(sym.rows(), sym.cols());
    if (ridged) *ridged = true;
    return sym.ldlt().solve(b);
  }
  return es.eigenvectors() *
         ev.cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * b);
}

}  // namespace cmar
