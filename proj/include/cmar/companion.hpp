// Companion representations of a CMAR model: the transition matrix of the
// stacked stationary system used for stability control, and the levels-VAR
// companion form whose eigenvalues count unit roots.
#pragma once

#include "cmar/model.hpp"

namespace cmar {

// Transition matrix Phi of the stationary state
//   (beta' vec(X_t), dvec(X_t), ..., dvec(X_{t-k+1})),
// size r1*r2 + k*d1*d2, with beta = beta2 (x) beta1, alpha = alpha2 (x) alpha1,
// Gamma_i = B_i2 (x) B_i1:
//   [ I + beta'alpha   beta'Gamma_1 ... beta'Gamma_k ]
//   [ alpha            Gamma_1      ... Gamma_k      ]
//   [ 0                I            ... 0            ]
// For k = 0 the matrix reduces to the I + beta'alpha block.
MatrixXd companion_matrix(const CmarModel& model);

// Number of characteristic roots of A(z) at z = 1 within tol, computed as
// eigenvalues of the companion form of the vectorized process in levels.
// A valid I(1) CMAR model has exactly d1*d2 - r1*r2 of them.
int unit_root_count(const CmarModel& model, double tol = 1e-6);

}  // namespace cmar
