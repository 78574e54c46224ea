// Random CMAR model generation and I(1) path simulation. Coefficients are
// drawn from Haar-factor products, rescaled to the identifiability norms and
// rejection-sampled until the stationary-system companion matrix has spectral
// radius below 0.98.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cmar/model.hpp"

namespace cmar {

using Rng = std::mt19937_64;

enum class ErrorSetting { Identity, I, II };

struct SimConfig {
  Dims dims;
  int T = 400;
  ErrorSetting error_setting = ErrorSetting::II;
  bool include_constant = false;
  double constant_norm = 0.8;
  std::uint64_t seed = 0;
  int max_rejection = 1000;

  void validate() const;
};

// d x r matrix with orthonormal columns distributed per the Haar measure,
// via QR of an iid standard-normal matrix with R-diagonal sign correction.
MatrixXd haar_semi_orthogonal(int d, int r, Rng& rng);

// Draw a model per the simulation recipe: A_j = Q_1 L Q_2' with |N(0,1)|
// diagonal L and Haar factors, full-size Haar factors for the B_ij,
// ||A1||_F = ||B_i1||_F = 1 with scale absorbed rightward, D rescaled to
// config.constant_norm, and the error covariance built for the setting
// (Setting I eigenvalues on [1,10], Setting II factor eigenvalues on [1,5]).
// Draws are rejected until spectral_radius(companion) < 0.98.
CmarModel gen_model(const SimConfig& cfg, Rng& rng);

// Simulate X_1..X_T from zero initial values. noise_scale multiplies the
// innovations; zero gives the deterministic skeleton.
MatrixSeries simulate_series(const CmarModel& model, int T, Rng& rng, double noise_scale = 1.0);

// Same recursion with caller-supplied innovations E_1..E_T.
MatrixSeries simulate_series_with_errors(const CmarModel& model,
                                         const std::vector<MatrixXd>& errors);

}  // namespace cmar
