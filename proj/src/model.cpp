#include "cmar/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmar {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_spd(const MatrixXd& s, const std::string& name) {
  require(s.rows() == s.cols(), name + " must be square");
  require((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s.cwiseAbs().maxCoeff()),
          name + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s));
  require(es.eigenvalues().minCoeff() > 0.0, name + " must be positive definite");
}

}  // namespace

void Dims::validate() const {
  require(d1 >= 1 && d2 >= 1, "Dims: d1, d2 must be positive");
  require(k >= 0, "Dims: k must be non-negative");
  require(r1 >= 1 && r1 <= d1, "Dims: 0 < r1 <= d1 required");
  require(r2 >= 1 && r2 <= d2, "Dims: 0 < r2 <= d2 required");
}

ErrorCovSpec ErrorCovSpec::setting_i(MatrixXd s) {
  ErrorCovSpec spec;
  spec.variant = Variant::SettingI;
  spec.sigma = std::move(s);
  return spec;
}

ErrorCovSpec ErrorCovSpec::setting_ii(MatrixXd s1, MatrixXd s2) {
  ErrorCovSpec spec;
  spec.variant = Variant::SettingII;
  spec.sigma1 = std::move(s1);
  spec.sigma2 = std::move(s2);
  return spec;
}

MatrixXd ErrorCovSpec::dense(int d1, int d2) const {
  switch (variant) {
    case Variant::Identity:
      return MatrixXd::Identity(d1 * d2, d1 * d2);
    case Variant::SettingI:
      return sigma;
    case Variant::SettingII:
      return kron(sigma2, sigma1);
  }
  throw std::logic_error("ErrorCovSpec: unknown variant");
}

void ErrorCovSpec::validate(int d1, int d2) const {
  switch (variant) {
    case Variant::Identity:
      return;
    case Variant::SettingI:
      require(sigma.rows() == d1 * d2, "ErrorCovSpec: Setting I sigma must be d1*d2 square");
      check_spd(sigma, "ErrorCovSpec.sigma");
      return;
    case Variant::SettingII:
      require(sigma1.rows() == d1 && sigma2.rows() == d2,
              "ErrorCovSpec: Setting II factors must be d1 and d2 square");
      check_spd(sigma1, "ErrorCovSpec.sigma1");
      check_spd(sigma2, "ErrorCovSpec.sigma2");
      return;
  }
}

void CmarModel::validate() const {
  dims.validate();
  require(alpha1.rows() == dims.d1 && alpha1.cols() == dims.r1, "CmarModel: alpha1 shape");
  require(beta1.rows() == dims.d1 && beta1.cols() == dims.r1, "CmarModel: beta1 shape");
  require(alpha2.rows() == dims.d2 && alpha2.cols() == dims.r2, "CmarModel: alpha2 shape");
  require(beta2.rows() == dims.d2 && beta2.cols() == dims.r2, "CmarModel: beta2 shape");
  require(static_cast<int>(B.size()) == dims.k, "CmarModel: expected k lag pairs");
  for (const auto& [b1, b2] : B) {
    require(b1.rows() == dims.d1 && b1.cols() == dims.d1, "CmarModel: B_i1 shape");
    require(b2.rows() == dims.d2 && b2.cols() == dims.d2, "CmarModel: B_i2 shape");
  }
  require(D.rows() == dims.d1 && D.cols() == dims.d2, "CmarModel: D shape");

  const double orth1 = (beta1.transpose() * beta1 - MatrixXd::Identity(dims.r1, dims.r1)).norm();
  const double orth2 = (beta2.transpose() * beta2 - MatrixXd::Identity(dims.r2, dims.r2)).norm();
  require(orth1 < 1e-10 && orth2 < 1e-10, "CmarModel: beta factors must be orthonormal");
  require(std::abs(a1().norm() - 1.0) < 1e-10, "CmarModel: ||A1||_F must equal 1");
  for (const auto& [b1, b2] : B)
    require(std::abs(b1.norm() - 1.0) < 1e-10, "CmarModel: ||B_i1||_F must equal 1");

  Eigen::JacobiSVD<MatrixXd> s1(a1());
  Eigen::JacobiSVD<MatrixXd> s2(a2());
  require(s1.singularValues()(dims.r1 - 1) > 1e-12 * s1.singularValues()(0),
          "CmarModel: A1 must have rank r1");
  require(s2.singularValues()(dims.r2 - 1) > 1e-12 * s2.singularValues()(0),
          "CmarModel: A2 must have rank r2");
  error_cov.validate(dims.d1, dims.d2);
}

void fix_column_signs(MatrixXd& factor, MatrixXd& partner) {
  for (Eigen::Index j = 0; j < factor.cols(); ++j) {
    Eigen::Index imax = 0;
    factor.col(j).cwiseAbs().maxCoeff(&imax);
    if (factor(imax, j) < 0.0) {
      factor.col(j) = -factor.col(j);
      partner.col(j) = -partner.col(j);
    }
  }
}

std::pair<MatrixXd, MatrixXd> factor_low_rank(const MatrixXd& a, int r) {
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (r > s.size() || s(r - 1) <= 1e-12 * s(0))
    throw std::runtime_error("factor_low_rank: matrix rank below requested " + std::to_string(r));
  MatrixXd beta = svd.matrixV().leftCols(r);             // row-space basis
  MatrixXd alpha = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
  fix_column_signs(beta, alpha);
  return {alpha, beta};
}

namespace {

// Make the largest-magnitude entry of `left` positive, flipping `right`
// along so the Kronecker product is preserved.
void fix_pair_sign(MatrixXd& left, MatrixXd& right) {
  Eigen::Index i = 0, j = 0;
  left.cwiseAbs().maxCoeff(&i, &j);
  if (left(i, j) < 0.0) {
    left = -left;
    right = -right;
  }
}

}  // namespace

CmarModel normalize(const CmarModel& model) {
  model.dims.validate();
  MatrixXd a1 = model.alpha1 * model.beta1.transpose();
  MatrixXd a2 = model.alpha2 * model.beta2.transpose();
  std::vector<std::pair<MatrixXd, MatrixXd>> b;
  b.reserve(model.B.size());
  for (const auto& [b1, b2] : model.B) b.emplace_back(b1, b2);
  return model_from_coefficients(model.dims, a1, a2, b, model.D, model.error_cov);
}

CmarModel model_from_coefficients(const Dims& dims, const MatrixXd& a1_in, const MatrixXd& a2_in,
                                  const std::vector<std::pair<MatrixXd, MatrixXd>>& b_in,
                                  const MatrixXd& d, ErrorCovSpec cov) {
  dims.validate();
  MatrixXd a1 = a1_in, a2 = a2_in;
  const double scale = a1.norm();
  if (scale <= 0.0) throw std::runtime_error("normalize: A1 is zero, rank constraint violated");
  a1 /= scale;
  a2 *= scale;
  fix_pair_sign(a1, a2);

  CmarModel out;
  out.dims = dims;
  std::tie(out.alpha1, out.beta1) = factor_low_rank(a1, dims.r1);
  std::tie(out.alpha2, out.beta2) = factor_low_rank(a2, dims.r2);
  out.B.reserve(b_in.size());
  for (const auto& [b1_in, b2_in] : b_in) {
    MatrixXd b1 = b1_in, b2 = b2_in;
    const double bs = b1.norm();
    if (bs <= 0.0) throw std::runtime_error("normalize: B_i1 is zero");
    b1 /= bs;
    b2 *= bs;
    fix_pair_sign(b1, b2);
    out.B.emplace_back(std::move(b1), std::move(b2));
  }
  out.D = d;
  out.error_cov = std::move(cov);
  out.validate();
  return out;
}

void MatrixSeries::validate() const {
  if (values.empty()) throw std::invalid_argument("MatrixSeries: empty series");
  for (const auto& v : values)
    if (v.rows() != d1 || v.cols() != d2)
      throw std::invalid_argument("MatrixSeries: inconsistent matrix shape");
  if (!index.empty() && static_cast<int>(index.size()) != length())
    throw std::invalid_argument("MatrixSeries: index length mismatch");
}

MatrixXd MatrixSeries::vectorized() const {
  MatrixXd out(d1 * d2, length());
  for (int t = 0; t < length(); ++t) out.col(t) = vec(values[t]);
  return out;
}

MatrixSeries MatrixSeries::transposed() const {
  MatrixSeries out;
  out.d1 = d2;
  out.d2 = d1;
  out.values.reserve(values.size());
  for (const auto& v : values) out.values.push_back(v.transpose());
  out.index = index;
  return out;
}

MatrixSeries MatrixSeries::slice(int first, int count) const {
  if (first < 0 || count < 1 || first + count > length())
    throw std::out_of_range("MatrixSeries::slice: range out of bounds");
  MatrixSeries out;
  out.d1 = d1;
  out.d2 = d2;
  out.values.assign(values.begin() + first, values.begin() + first + count);
  if (!index.empty()) out.index.assign(index.begin() + first, index.begin() + first + count);
  return out;
}

}  // namespace cmar
