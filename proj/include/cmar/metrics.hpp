// Projection-space error metrics for comparing estimated cointegration
// spaces, plus the small statistics used by the rate experiments.
#pragma once

#include <vector>

#include "cmar/model.hpp"

namespace cmar {

// log of the smallest positive double; stands in for -inf on exact recovery.
inline constexpr double kExactSentinel = -745.0;

struct ProjError {
  double value = 0.0;  // log(||P1hat-P1||_s^2 + ||P2hat-P2||_s^2), or sentinel
  bool exact = false;
};

ProjError projection_error(const MatrixXd& beta1_hat, const MatrixXd& beta1,
                           const MatrixXd& beta2_hat, const MatrixXd& beta2);

// CVAR benchmark variant: one estimated space in R^{d1 d2} compared against
// span(beta2 (x) beta1) through the same log-squared-spectral metric.
ProjError cvar_projection_error(const MatrixXd& beta_hat, const MatrixXd& beta1,
                                const MatrixXd& beta2);

// Orthogonal Procrustes rotation R minimizing ||source R - target||_F.
MatrixXd procrustes_rotation(const MatrixXd& source, const MatrixXd& target);

// ||alpha_hat R - alpha||_F^2 after Procrustes-aligning beta_hat to beta;
// alpha is only identified given a beta basis.
double aligned_alpha_error(const MatrixXd& alpha_hat, const MatrixXd& beta_hat,
                           const MatrixXd& alpha, const MatrixXd& beta);

double median(std::vector<double> values);

// Slope of the least-squares line y ~ a + b x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cmar
