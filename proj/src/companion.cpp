#include "cmar/companion.hpp"

#include <complex>
#include <vector>

namespace cmar {

MatrixXd companion_matrix(const CmarModel& model) {
  const int m = model.dims.r1 * model.dims.r2;
  const int p = model.dims.d1 * model.dims.d2;
  const int k = model.dims.k;

  const MatrixXd beta = kron(model.beta2, model.beta1);
  const MatrixXd alpha = kron(model.alpha2, model.alpha1);

  MatrixXd phi = MatrixXd::Zero(m + k * p, m + k * p);
  phi.topLeftCorner(m, m) = MatrixXd::Identity(m, m) + beta.transpose() * alpha;
  if (k == 0) return phi;

  phi.block(m, 0, p, m) = alpha;
  for (int i = 0; i < k; ++i) {
    const MatrixXd gamma = model.gamma(i);
    phi.block(0, m + i * p, m, p) = beta.transpose() * gamma;
    phi.block(m, m + i * p, p, p) = gamma;
  }
  for (int i = 1; i < k; ++i)
    phi.block(m + i * p, m + (i - 1) * p, p, p) = MatrixXd::Identity(p, p);
  return phi;
}

int unit_root_count(const CmarModel& model, double tol) {
  const int p = model.dims.d1 * model.dims.d2;
  const int k = model.dims.k;
  const MatrixXd pi = model.pi();

  // VECM in levels: x_t = (I + Pi + Gamma_1) x_{t-1}
  //                      + sum_{j=2..k} (Gamma_j - Gamma_{j-1}) x_{t-j}
  //                      - Gamma_k x_{t-k-1}.
  std::vector<MatrixXd> lev(k + 1);
  lev[0] = MatrixXd::Identity(p, p) + pi;
  if (k >= 1) {
    lev[0] += model.gamma(0);
    for (int j = 1; j < k; ++j) lev[j] = model.gamma(j) - model.gamma(j - 1);
    lev[k] = -model.gamma(k - 1);
  }

  const int n = p * (k + 1);
  MatrixXd comp = MatrixXd::Zero(n, n);
  for (int j = 0; j <= k; ++j) comp.block(0, j * p, p, p) = lev[j];
  for (int j = 1; j <= k; ++j)
    comp.block(j * p, (j - 1) * p, p, p) = MatrixXd::Identity(p, p);

  Eigen::EigenSolver<MatrixXd> es(comp, /*computeEigenvectors=*/false);
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0)) < tol) ++count;
  return count;
}

}  // namespace cmar
