// Classical vector error-correction estimation by reduced-rank regression:
// the simulation baseline, the d2 = 1 oracle for the matrix estimators, and
// the warm-start source. Also hosts the nearest-Kronecker-product bridge.
#pragma once

#include <utility>
#include <vector>

#include "cmar/model.hpp"

namespace cmar {

struct CvarModel {
  int d = 0;
  int r = 0;
  int k = 0;
  MatrixXd alpha;               // d x r
  MatrixXd beta;                // d x r, orthonormal sign-fixed columns
  std::vector<MatrixXd> gamma;  // k lag matrices, d x d
  VectorXd d_const;             // d vector (zero when no constant)
  MatrixXd sigma;               // d x d residual covariance
  bool ridged = false;

  MatrixXd pi() const { return alpha * beta.transpose(); }
};

// Weighting of the reduced-rank eigenstep. Johansen solves the canonical
// correlation problem |lambda S11 - S10 S00^{-1} S01| = 0 (the Gaussian ML);
// Identity projects the OLS solution onto the leading eigenvectors of
// S01 S11^{-1} S10, which is the minimizer of the unweighted Frobenius
// residual and the exact d2 = 1 reduction of the matrix LSE.
enum class CvarWeighting { Johansen, Identity };

// Fit dX_t = Pi x_{t-1} + sum Gamma_i dX_{t-i} + d + eps with rank(Pi) = r
// on the columns of `levels` (d x T, one observation per column).
CvarModel cvar_fit(const MatrixXd& levels, int r, int k, bool include_constant,
                   CvarWeighting weighting = CvarWeighting::Johansen);

// Closest Kronecker factorization min ||Pi - A2 (x) A1||_F via the rank-1
// SVD of the Van Loan rearrangement. Returns (A2, A1) for block structure
// (d2, d2) x (d1, d1).
std::pair<MatrixXd, MatrixXd> nearest_kronecker(const MatrixXd& pi, int d1, int d2);

// Van Loan rearrangement: row (column-major block index) holds vec of the
// (i, j) block, so Pi = A2 (x) A1 iff the result equals vec(A2) vec(A1)'.
MatrixXd van_loan_rearrangement(const MatrixXd& pi, int d1, int d2);

}  // namespace cmar
