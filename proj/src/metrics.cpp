#include "cmar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmar {

namespace {

ProjError log_squared_sum(double sum_sq) {
  if (sum_sq <= 0.0) return {kExactSentinel, true};
  const double v = std::log(sum_sq);
  if (v < kExactSentinel) return {kExactSentinel, true};
  return {v, false};
}

}  // namespace

ProjError projection_error(const MatrixXd& beta1_hat, const MatrixXd& beta1,
                           const MatrixXd& beta2_hat, const MatrixXd& beta2) {
  const double e1 = spectral_norm(projection(beta1_hat) - projection(beta1));
  const double e2 = spectral_norm(projection(beta2_hat) - projection(beta2));
  return log_squared_sum(e1 * e1 + e2 * e2);
}

ProjError cvar_projection_error(const MatrixXd& beta_hat, const MatrixXd& beta1,
                                const MatrixXd& beta2) {
  const double e = spectral_norm(projection(beta_hat) - projection(kron(beta2, beta1)));
  return log_squared_sum(e * e);
}

MatrixXd procrustes_rotation(const MatrixXd& source, const MatrixXd& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols())
    throw std::invalid_argument("procrustes_rotation: shape mismatch");
  Eigen::JacobiSVD<MatrixXd> svd(source.transpose() * target,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double aligned_alpha_error(const MatrixXd& alpha_hat, const MatrixXd& beta_hat,
                           const MatrixXd& alpha, const MatrixXd& beta) {
  const MatrixXd r = procrustes_rotation(beta_hat, beta);
  return (alpha_hat * r - alpha).squaredNorm();
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("regression_slope: need matching inputs of length >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = sxx - sx * sx / n;
  if (denom == 0.0) throw std::invalid_argument("regression_slope: degenerate x values");
  return (sxy - sx * sy / n) / denom;
}

}  // namespace cmar
