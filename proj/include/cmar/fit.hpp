// Alternating estimators for the CMAR model. Both the least-squares and the
// maximum-likelihood variants alternate exact conditional solves of the
// left block (A1, B_i1, D) and the mirrored right block; the two differ only
// in the column weighting (Sigma2^{-1}) and the whitening of the eigenstep.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmar/model.hpp"

namespace cmar {

enum class FitMethod { Lse, Mle };

enum class InitStrategy { CvarWarmStart, Random, Provided };

struct FitConfig {
  int r1 = 1;
  int r2 = 1;
  int k = 0;
  bool include_constant = false;
  double tol = 1e-8;       // relative objective-change tolerance
  int max_iter = 200;
  InitStrategy init = InitStrategy::CvarWarmStart;
  std::uint64_t seed = 0;  // for InitStrategy::Random
  std::optional<CmarModel> initial_model;
  bool update_covariance = true;  // MLE only; false freezes Sigma1, Sigma2
  bool record_iterates = false;

  Dims dims(int d1, int d2) const { return Dims{d1, d2, k, r1, r2}; }
  void validate() const;
};

struct EstimationResult {
  CmarModel model;
  int iterations = 0;
  // LSE: Frobenius residual sum (non-increasing). MLE: log-likelihood of (7)
  // generalized to the lagged model (non-decreasing). Entry 0 is the initial
  // value, one entry per sweep after that.
  std::vector<double> objective_trace;
  bool converged = false;
  bool ridged = false;
  MatrixXd sigma1;  // MLE only, trace(sigma2) = d2 convention
  MatrixXd sigma2;
  std::vector<CmarModel> iterate_trace;  // filled when record_iterates
};

// Raw (unnormalized) coefficient iterate used inside the alternation.
struct FitState {
  MatrixXd a1, a2;
  std::vector<MatrixXd> b1, b2;
  MatrixXd d;
};

// Weighted moment blocks of the column regression
//   y_tj = A1 x_tj + Psi1 z_tj + e_tj
// accumulated over t = k+2..T and j = 1..d2 with weight W between the
// factors (W = I for LSE, Sigma2^{-1} for MLE).
struct MomentBlocks {
  MatrixXd sxx, syx;        // d1 x d1
  MatrixXd syz, sxz, szz;   // z block: k*d1 + (const ? d2 : 0)
  MatrixXd syx_z, sxx_z;    // partial-regression matrices
  int n = 0;
  int zdim = 0;
  bool ridged = false;
};

MomentBlocks build_moments(const MatrixSeries& series, const MatrixXd& a2,
                           const std::vector<MatrixXd>& b2, const MatrixXd& w, int k,
                           bool include_constant);

// One left update. `whitener`: empty for the LSE eigenstep, otherwise the
// SPD matrix G whitening the eigenproblem (the full-rank residual covariance
// for the MLE, or the frozen Sigma1 when covariance updates are disabled).
struct LeftUpdate {
  MatrixXd a1;
  std::vector<MatrixXd> b1;
  MatrixXd d;
  bool ridged = false;
};

LeftUpdate update_left(const MatrixSeries& series, const MatrixXd& a2,
                       const std::vector<MatrixXd>& b2, const MatrixXd& w, int k,
                       bool include_constant, int r1, const MatrixXd& whitener);

// Residuals R_t = dX_t - A1 X_{t-1} A2' - sum_i B_i1 dX_{t-i} B_i2' - D,
// one column-major d1 x d2 matrix per usable t.
std::vector<MatrixXd> residuals(const MatrixSeries& series, const FitState& state, int k);

// Frobenius residual sum of squares (the LSE objective).
double lse_objective(const MatrixSeries& series, const FitState& state, int k);

// Log likelihood (7) generalized to the lagged model, apart from a constant:
//   -d2 n log|S1| - d1 n log|S2| - sum_t tr[S1^{-1} R_t S2^{-1} R_t'].
double loglik(const MatrixSeries& series, const FitState& state, int k, const MatrixXd& sigma1,
              const MatrixXd& sigma2);
double loglik(const MatrixSeries& series, const CmarModel& model, const MatrixXd& sigma1,
              const MatrixXd& sigma2);

EstimationResult lse_fit(const MatrixSeries& series, const FitConfig& cfg);
EstimationResult mle_fit(const MatrixSeries& series, const FitConfig& cfg);

// Warm start: CVAR reduced-rank fit on vec(X_t) with rank r1*r2, factored
// through the nearest Kronecker product. Also produces Sigma1, Sigma2 from
// the nearest Kronecker decomposition of the CVAR residual covariance.
FitState warm_start(const MatrixSeries& series, const FitConfig& cfg, MatrixXd* sigma1 = nullptr,
                    MatrixXd* sigma2 = nullptr);

FitState random_start(const MatrixSeries& series, const FitConfig& cfg);

FitState state_from_model(const CmarModel& model);

CmarModel model_from_state(const Dims& dims, const FitState& state, ErrorCovSpec cov);

}  // namespace cmar
