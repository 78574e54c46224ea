#include "cmar/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "cmar/companion.hpp"

namespace cmar {

namespace {

constexpr double kStabilityThreshold = 0.98;

MatrixXd standard_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

// Haar-factor low-rank draw Q1 diag(|N(0,1)|) Q2'.
MatrixXd haar_factor_matrix(int d, int r, Rng& rng) {
  const MatrixXd q1 = haar_semi_orthogonal(d, r, rng);
  const MatrixXd q2 = haar_semi_orthogonal(d, r, rng);
  std::normal_distribution<double> n01(0.0, 1.0);
  VectorXd lambda(r);
  for (int i = 0; i < r; ++i) lambda(i) = std::abs(n01(rng));
  return q1 * lambda.asDiagonal() * q2.transpose();
}

// Dense SPD matrix with Haar eigenvectors and eigenvalues equally spaced
// over [lo, hi].
MatrixXd spaced_spd(int d, double lo, double hi, Rng& rng) {
  const MatrixXd q = haar_semi_orthogonal(d, d, rng);
  VectorXd lambda = VectorXd::LinSpaced(d, lo, hi);
  return q * lambda.asDiagonal() * q.transpose();
}

}  // namespace

void SimConfig::validate() const {
  dims.validate();
  if (T < dims.k + 2) throw std::invalid_argument("SimConfig: T must be at least k + 2");
  if (constant_norm < 0.0) throw std::invalid_argument("SimConfig: constant_norm must be >= 0");
  if (max_rejection < 1) throw std::invalid_argument("SimConfig: max_rejection must be >= 1");
}

MatrixXd haar_semi_orthogonal(int d, int r, Rng& rng) {
  if (r > d) throw std::invalid_argument("haar_semi_orthogonal: r must not exceed d");
  const MatrixXd g = standard_normal(d, r, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, r);
  const MatrixXd rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j)
    if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

CmarModel gen_model(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto& dm = cfg.dims;

  ErrorCovSpec cov;
  switch (cfg.error_setting) {
    case ErrorSetting::Identity:
      cov = ErrorCovSpec::identity();
      break;
    case ErrorSetting::I:
      cov = ErrorCovSpec::setting_i(spaced_spd(dm.d1 * dm.d2, 1.0, 10.0, rng));
      break;
    case ErrorSetting::II:
      cov = ErrorCovSpec::setting_ii(spaced_spd(dm.d1, 1.0, 5.0, rng),
                                     spaced_spd(dm.d2, 1.0, 5.0, rng));
      break;
  }

  for (int attempt = 0; attempt < cfg.max_rejection; ++attempt) {
    const MatrixXd a1 = haar_factor_matrix(dm.d1, dm.r1, rng);
    const MatrixXd a2 = haar_factor_matrix(dm.d2, dm.r2, rng);
    std::vector<std::pair<MatrixXd, MatrixXd>> b;
    b.reserve(dm.k);
    for (int i = 0; i < dm.k; ++i)
      b.emplace_back(haar_factor_matrix(dm.d1, dm.d1, rng), haar_factor_matrix(dm.d2, dm.d2, rng));

    MatrixXd d = MatrixXd::Zero(dm.d1, dm.d2);
    if (cfg.include_constant && cfg.constant_norm > 0.0) {
      d = standard_normal(dm.d1, dm.d2, rng);
      d *= cfg.constant_norm / d.norm();
    }

    CmarModel model = model_from_coefficients(dm, a1, a2, b, d, cov);
    if (spectral_radius(companion_matrix(model)) < kStabilityThreshold) return model;
  }
  throw std::runtime_error("gen_model: no stable draw within max_rejection attempts");
}

MatrixSeries simulate_series_with_errors(const CmarModel& model,
                                         const std::vector<MatrixXd>& errors) {
  const auto& dm = model.dims;
  const int T = static_cast<int>(errors.size());
  if (T < dm.k + 2) throw std::invalid_argument("simulate: T must be at least k + 2");

  const MatrixXd a1 = model.a1();
  const MatrixXd a2 = model.a2();

  MatrixSeries out;
  out.d1 = dm.d1;
  out.d2 = dm.d2;
  out.values.reserve(T);

  // X_0 = ... = X_{-k} = 0, so early lagged differences vanish.
  MatrixXd x_prev = MatrixXd::Zero(dm.d1, dm.d2);
  std::vector<MatrixXd> dx_hist(dm.k, MatrixXd::Zero(dm.d1, dm.d2));
  for (int t = 0; t < T; ++t) {
    MatrixXd dx = a1 * x_prev * a2.transpose() + model.D + errors[t];
    for (int i = 0; i < dm.k; ++i)
      dx += model.B[i].first * dx_hist[i] * model.B[i].second.transpose();
    MatrixXd x = x_prev + dx;
    for (int i = dm.k - 1; i > 0; --i) dx_hist[i] = dx_hist[i - 1];
    if (dm.k > 0) dx_hist[0] = dx;
    x_prev = x;
    out.values.push_back(std::move(x));
  }
  out.validate();
  return out;
}

MatrixSeries simulate_series(const CmarModel& model, int T, Rng& rng, double noise_scale) {
  const auto& dm = model.dims;
  if (T < dm.k + 2) throw std::invalid_argument("simulate: T must be at least k + 2");

  std::vector<MatrixXd> errors(T, MatrixXd::Zero(dm.d1, dm.d2));
  if (noise_scale != 0.0) {
    // Innovations via the symmetric square root of Cov(vec(E_t)).
    const MatrixXd cov = model.error_cov.dense(dm.d1, dm.d2);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(cov));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::runtime_error("simulate: error covariance is not positive definite");
    const MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();
    for (int t = 0; t < T; ++t) {
      const VectorXd z = standard_normal(dm.d1 * dm.d2, 1, rng);
      errors[t] = noise_scale * vec_inverse(root * z, dm.d1, dm.d2);
    }
  }
  return simulate_series_with_errors(model, errors);
}

}  // namespace cmar
