// Domain types for the cointegrated matrix autoregression: model dimensions,
// the bilinear error-correction model itself, the matrix time series it acts
// on, and the identifiability normalization that makes estimates comparable.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmar/linalg.hpp"

namespace cmar {

struct Dims {
  int d1 = 1;  // row dimension
  int d2 = 1;  // column dimension
  int k = 0;   // lagged-difference terms
  int r1 = 1;  // row cointegration rank, 0 < r1 <= d1
  int r2 = 1;  // column cointegration rank, 0 < r2 <= d2

  void validate() const;
};

// Covariance of vec(E_t). Setting I is a dense SPD matrix, Setting II is the
// Kronecker-separable pair Sigma_e = Sigma2 (x) Sigma1.
struct ErrorCovSpec {
  enum class Variant { Identity, SettingI, SettingII };

  Variant variant = Variant::Identity;
  MatrixXd sigma;    // d1*d2 square, Setting I only
  MatrixXd sigma1;   // d1 square, Setting II only
  MatrixXd sigma2;   // d2 square, Setting II only

  static ErrorCovSpec identity() { return {}; }
  static ErrorCovSpec setting_i(MatrixXd s);
  static ErrorCovSpec setting_ii(MatrixXd s1, MatrixXd s2);

  // Full d1*d2 covariance of vec(E_t).
  MatrixXd dense(int d1, int d2) const;
  void validate(int d1, int d2) const;
};

// Full CMAR parameter set:
//   dX_t = A1 X_{t-1} A2' + sum_i B_i1 dX_{t-i} B_i2' + D + E_t,
// with A_j = alpha_j beta_j' of rank r_j. Stored in normalized form:
// beta_j orthonormal sign-fixed columns, ||A1||_F = ||B_i1||_F = 1.
struct CmarModel {
  Dims dims;
  MatrixXd alpha1;  // d1 x r1
  MatrixXd beta1;   // d1 x r1, orthonormal columns
  MatrixXd alpha2;  // d2 x r2
  MatrixXd beta2;   // d2 x r2, orthonormal columns
  std::vector<std::pair<MatrixXd, MatrixXd>> B;  // k pairs (B_i1 d1 sq, B_i2 d2 sq)
  MatrixXd D;       // d1 x d2 constant, may be zero
  ErrorCovSpec error_cov;

  MatrixXd a1() const { return alpha1 * beta1.transpose(); }
  MatrixXd a2() const { return alpha2 * beta2.transpose(); }

  // Coefficients of the vectorized VECM (4): Pi = A2 (x) A1, Gamma_i = B_i2 (x) B_i1.
  MatrixXd pi() const { return kron(a2(), a1()); }
  MatrixXd gamma(int i) const { return kron(B[i].second, B[i].first); }

  void validate() const;
};

// Flips column signs of an orthonormal factor so the entry of largest
// absolute value in each column is positive; `partner` columns flip along so
// partner * factor' is preserved.
void fix_column_signs(MatrixXd& factor, MatrixXd& partner);

// Factor a rank-r matrix A into alpha beta' with beta the orthonormal
// sign-fixed row-space basis (leading right singular vectors) and alpha
// absorbing the singular values and left factors.
std::pair<MatrixXd, MatrixXd> factor_low_rank(const MatrixXd& a, int r);

// Rebuild a model in canonical form: ||A1||_F = 1 and ||B_i1||_F = 1 with the
// freed scale absorbed into the right-hand partner, beta_j the orthonormal
// sign-fixed row-space bases of A_j, and the residual pair-sign ambiguity of
// (A1, A2) and (B_i1, B_i2) resolved by making the largest-magnitude entry of
// the left partner positive. Leaves Pi and every Gamma_i unchanged.
CmarModel normalize(const CmarModel& model);

// Assemble a model directly from coefficient matrices (A1, A2 need ranks
// r1, r2); the result is normalized.
CmarModel model_from_coefficients(const Dims& dims, const MatrixXd& a1, const MatrixXd& a2,
                                  const std::vector<std::pair<MatrixXd, MatrixXd>>& b,
                                  const MatrixXd& d, ErrorCovSpec cov);

// A length-T sequence of d1 x d2 observations with an optional date index.
struct MatrixSeries {
  int d1 = 0;
  int d2 = 0;
  std::vector<MatrixXd> values;
  std::vector<std::string> index;  // empty or one ISO-8601 / integer label per step

  int length() const { return static_cast<int>(values.size()); }
  void validate() const;

  // Stacked column-major vectorization, one d1*d2 column per time step.
  MatrixXd vectorized() const;
  // The transposed series {X_t'}, used by the right-factor updates.
  MatrixSeries transposed() const;
  // Contiguous sub-range [first, first+count).
  MatrixSeries slice(int first, int count) const;
};

}  // namespace cmar
