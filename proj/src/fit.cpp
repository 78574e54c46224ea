#include "cmar/fit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cmar/cvar.hpp"

namespace cmar {

namespace {

// Extra block needed by the MLE whitener: Syy = sum_t dX_t W dX_t'.
struct MomentBlocksExt {
  MomentBlocks base;
  MatrixXd syy;
  MatrixXd syy_z;
};

MomentBlocksExt build_moments_ext(const MatrixSeries& series, const MatrixXd& a2,
                                  const std::vector<MatrixXd>& b2, const MatrixXd& w, int k,
                                  bool include_constant) {
  series.validate();
  const int d1 = series.d1;
  const int d2 = series.d2;
  const int T = series.length();
  if (T < k + 2) throw std::invalid_argument("fit: series length must be at least k + 2");
  if (static_cast<int>(b2.size()) != k) throw std::invalid_argument("fit: expected k right lag factors");

  const int zdim = k * d1 + (include_constant ? d2 : 0);
  MomentBlocksExt ext;
  MomentBlocks& m = ext.base;
  m.n = T - 1 - k;
  m.zdim = zdim;
  m.sxx = MatrixXd::Zero(d1, d1);
  m.syx = MatrixXd::Zero(d1, d1);
  ext.syy = MatrixXd::Zero(d1, d1);
  m.syz = MatrixXd::Zero(d1, zdim);
  m.sxz = MatrixXd::Zero(d1, zdim);
  m.szz = MatrixXd::Zero(zdim, zdim);

  const MatrixXd wa2 = w * a2;  // d2 x d2 weight folded into the right factor
  std::vector<MatrixXd> wb2(k);
  for (int i = 0; i < k; ++i) wb2[i] = w * b2[i];

  for (int t = k + 1; t < T; ++t) {
    const MatrixXd dx = series.values[t] - series.values[t - 1];
    const MatrixXd& x = series.values[t - 1];
    m.sxx.noalias() += x * a2.transpose() * wa2 * x.transpose();
    m.syx.noalias() += dx * wa2 * x.transpose();
    ext.syy.noalias() += dx * w * dx.transpose();
    for (int i = 1; i <= k; ++i) {
      const MatrixXd dlag = series.values[t - i] - series.values[t - i - 1];
      m.syz.block(0, (i - 1) * d1, d1, d1).noalias() += dx * wb2[i - 1] * dlag.transpose();
      m.sxz.block(0, (i - 1) * d1, d1, d1).noalias() +=
          x * a2.transpose() * wb2[i - 1] * dlag.transpose();
      for (int j = 1; j <= k; ++j) {
        const MatrixXd dlag_j = series.values[t - j] - series.values[t - j - 1];
        m.szz.block((i - 1) * d1, (j - 1) * d1, d1, d1).noalias() +=
            dlag * b2[i - 1].transpose() * wb2[j - 1] * dlag_j.transpose();
      }
      if (include_constant) {
        m.szz.block((i - 1) * d1, k * d1, d1, d2).noalias() += dlag * b2[i - 1].transpose() * w;
        m.szz.block(k * d1, (i - 1) * d1, d2, d1).noalias() += wb2[i - 1] * dlag.transpose();
      }
    }
    if (include_constant) {
      m.syz.block(0, k * d1, d1, d2).noalias() += dx * w;
      m.sxz.block(0, k * d1, d1, d2).noalias() += x * a2.transpose() * w;
      m.szz.block(k * d1, k * d1, d2, d2) += w;
    }
  }

  if (zdim > 0) {
    const MatrixXd szz_inv_szy = solve_spd(m.szz, m.syz.transpose(), &m.ridged);
    const MatrixXd szz_inv_szx = solve_spd(m.szz, m.sxz.transpose(), &m.ridged);
    m.syx_z = m.syx - m.syz * szz_inv_szx;
    m.sxx_z = m.sxx - m.sxz * szz_inv_szx;
    ext.syy_z = ext.syy - m.syz * szz_inv_szy;
  } else {
    m.syx_z = m.syx;
    m.sxx_z = m.sxx;
    ext.syy_z = ext.syy;
  }
  return ext;
}

MatrixXd svd_truncate(const MatrixXd& m, int r) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd s = svd.singularValues();
  for (Eigen::Index i = r; i < s.size(); ++i) s(i) = 0.0;
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

// Floors eigenvalues at 1e-10; sets *floored when the input was not SPD.
MatrixXd spd_floor(const MatrixXd& s, bool* floored = nullptr) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s));
  if (es.eigenvalues().minCoeff() > 1e-10) return symmetrize(s);
  if (floored) *floored = true;
  VectorXd d = es.eigenvalues().cwiseMax(1e-10);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double log_det_spd(const MatrixXd& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error(std::string(what) + ": covariance is not positive definite");
  return es.eigenvalues().array().log().sum();
}

}  // namespace

void FitConfig::validate() const {
  if (r1 < 1 || r2 < 1) throw std::invalid_argument("FitConfig: ranks must be positive");
  if (k < 0) throw std::invalid_argument("FitConfig: k must be non-negative");
  if (tol <= 0.0) throw std::invalid_argument("FitConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("FitConfig: max_iter must be at least 1");
  if (init == InitStrategy::Provided && !initial_model)
    throw std::invalid_argument("FitConfig: Provided init requires initial_model");
}

MomentBlocks build_moments(const MatrixSeries& series, const MatrixXd& a2,
                           const std::vector<MatrixXd>& b2, const MatrixXd& w, int k,
                           bool include_constant) {
  return build_moments_ext(series, a2, b2, w, k, include_constant).base;
}

LeftUpdate update_left(const MatrixSeries& series, const MatrixXd& a2,
                       const std::vector<MatrixXd>& b2, const MatrixXd& w, int k,
                       bool include_constant, int r1, const MatrixXd& whitener) {
  const int d1 = series.d1;
  const int d2 = series.d2;
  MomentBlocks m = build_moments(series, a2, b2, w, k, include_constant);

  LeftUpdate up;
  up.ridged = m.ridged;
  const MatrixXd a1_full = solve_spd(m.sxx_z, m.syx_z.transpose(), &up.ridged).transpose();

  const bool plain = whitener.size() == 0 ||
                     (whitener - MatrixXd::Identity(d1, d1)).cwiseAbs().maxCoeff() == 0.0;
  if (r1 >= d1) {
    up.a1 = a1_full;
  } else if (plain) {
    const MatrixXd u = leading_eigenvectors(a1_full * m.syx_z.transpose(), r1);
    up.a1 = u * u.transpose() * a1_full;
  } else {
    const MatrixXd gs = spd_sqrt(whitener, 1e-10);
    const MatrixXd gi = spd_inv_sqrt(whitener, 1e-10);
    const MatrixXd u = leading_eigenvectors(gi * a1_full * m.syx_z.transpose() * gi, r1);
    up.a1 = gs * u * u.transpose() * gi * a1_full;
  }

  up.b1.assign(k, MatrixXd::Zero(d1, d1));
  up.d = MatrixXd::Zero(d1, d2);
  if (m.zdim > 0) {
    const MatrixXd psi =
        solve_spd(m.szz, (m.syz - up.a1 * m.sxz).transpose(), &up.ridged).transpose();
    for (int i = 0; i < k; ++i) up.b1[i] = psi.block(0, i * d1, d1, d1);
    if (include_constant) up.d = psi.block(0, k * d1, d1, d2);
  }
  return up;
}

std::vector<MatrixXd> residuals(const MatrixSeries& series, const FitState& state, int k) {
  const int T = series.length();
  std::vector<MatrixXd> out;
  out.reserve(T - 1 - k);
  for (int t = k + 1; t < T; ++t) {
    MatrixXd r = series.values[t] - series.values[t - 1] -
                 state.a1 * series.values[t - 1] * state.a2.transpose() - state.d;
    for (int i = 1; i <= k; ++i)
      r -= state.b1[i - 1] * (series.values[t - i] - series.values[t - i - 1]) *
           state.b2[i - 1].transpose();
    out.push_back(std::move(r));
  }
  return out;
}

double lse_objective(const MatrixSeries& series, const FitState& state, int k) {
  double obj = 0.0;
  for (const auto& r : residuals(series, state, k)) obj += r.squaredNorm();
  return obj;
}

double loglik(const MatrixSeries& series, const FitState& state, int k, const MatrixXd& sigma1,
              const MatrixXd& sigma2) {
  const int d1 = series.d1;
  const int d2 = series.d2;
  const int n = series.length() - 1 - k;
  const double ld1 = log_det_spd(sigma1, "loglik");
  const double ld2 = log_det_spd(sigma2, "loglik");
  bool ridged = false;
  const MatrixXd s1_inv = solve_spd(sigma1, MatrixXd::Identity(d1, d1), &ridged);
  const MatrixXd s2_inv = solve_spd(sigma2, MatrixXd::Identity(d2, d2), &ridged);
  double trace_term = 0.0;
  for (const auto& r : residuals(series, state, k))
    trace_term += (s1_inv * r * s2_inv * r.transpose()).trace();
  return -d2 * n * ld1 - d1 * n * ld2 - trace_term;
}

double loglik(const MatrixSeries& series, const CmarModel& model, const MatrixXd& sigma1,
              const MatrixXd& sigma2) {
  return loglik(series, state_from_model(model), model.dims.k, sigma1, sigma2);
}

FitState state_from_model(const CmarModel& model) {
  FitState s;
  s.a1 = model.a1();
  s.a2 = model.a2();
  for (const auto& [b1, b2] : model.B) {
    s.b1.push_back(b1);
    s.b2.push_back(b2);
  }
  s.d = model.D;
  return s;
}

CmarModel model_from_state(const Dims& dims, const FitState& state, ErrorCovSpec cov) {
  std::vector<std::pair<MatrixXd, MatrixXd>> b;
  for (size_t i = 0; i < state.b1.size(); ++i) b.emplace_back(state.b1[i], state.b2[i]);
  return model_from_coefficients(dims, state.a1, state.a2, b, state.d, std::move(cov));
}

FitState warm_start(const MatrixSeries& series, const FitConfig& cfg, MatrixXd* sigma1,
                    MatrixXd* sigma2) {
  const int d1 = series.d1;
  const int d2 = series.d2;
  const CvarModel base = cvar_fit(series.vectorized(), cfg.r1 * cfg.r2, cfg.k,
                                  cfg.include_constant, CvarWeighting::Johansen);

  FitState s;
  auto [a2, a1] = nearest_kronecker(base.pi(), d1, d2);
  if (!a2.allFinite() || a2.norm() <= 1e-300) {
    a2 = MatrixXd::Identity(d2, d2);
    a1 = MatrixXd::Identity(d1, d1);
  }
  s.a1 = svd_truncate(a1, cfg.r1);
  s.a2 = svd_truncate(a2, cfg.r2);
  for (int i = 0; i < cfg.k; ++i) {
    auto [b2, b1] = nearest_kronecker(base.gamma[i], d1, d2);
    if (!b2.allFinite() || b2.norm() <= 1e-300) {
      b2 = MatrixXd::Identity(d2, d2);
      b1 = MatrixXd::Zero(d1, d1);
    }
    s.b1.push_back(b1);
    s.b2.push_back(b2);
  }
  s.d = cfg.include_constant ? MatrixXd(vec_inverse(base.d_const, d1, d2))
                             : MatrixXd(MatrixXd::Zero(d1, d2));

  if (sigma1 && sigma2) {
    auto [s2, s1] = nearest_kronecker(base.sigma, d1, d2);
    if (s1.trace() < 0.0) {
      s1 = -s1;
      s2 = -s2;
    }
    *sigma1 = spd_floor(s1);
    *sigma2 = spd_floor(s2);
    const double c = sigma2->trace() / d2;
    *sigma2 /= c;
    *sigma1 *= c;
  }
  return s;
}

FitState random_start(const MatrixSeries& series, const FitConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto randn = [&](int rows, int cols) {
    MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
    return m;
  };
  const int d1 = series.d1;
  const int d2 = series.d2;
  FitState s;
  s.a1 = svd_truncate(randn(d1, d1), cfg.r1);
  s.a1 /= s.a1.norm();
  s.a2 = svd_truncate(randn(d2, d2), cfg.r2);
  s.a2 /= s.a2.norm();
  for (int i = 0; i < cfg.k; ++i) {
    MatrixXd b1 = randn(d1, d1);
    MatrixXd b2 = randn(d2, d2);
    s.b1.push_back(b1 / b1.norm());
    s.b2.push_back(0.1 * b2 / b2.norm());
  }
  s.d = MatrixXd::Zero(d1, d2);
  return s;
}

namespace {

FitState initial_state(const MatrixSeries& series, const FitConfig& cfg, MatrixXd* sigma1,
                       MatrixXd* sigma2) {
  switch (cfg.init) {
    case InitStrategy::CvarWarmStart:
      return warm_start(series, cfg, sigma1, sigma2);
    case InitStrategy::Random:
      return random_start(series, cfg);
    case InitStrategy::Provided:
      return state_from_model(*cfg.initial_model);
  }
  throw std::logic_error("fit: unknown init strategy");
}

bool relative_change_below(double prev, double cur, double tol) {
  return std::abs(prev - cur) <= tol * std::max(1.0, std::abs(prev));
}

}  // namespace

EstimationResult lse_fit(const MatrixSeries& series, const FitConfig& cfg) {
  cfg.validate();
  series.validate();
  const int d2 = series.d2;
  const MatrixXd w = MatrixXd::Identity(d2, d2);
  const MatrixXd w_t = MatrixXd::Identity(series.d1, series.d1);
  const MatrixXd no_whitener;
  const MatrixSeries transposed = series.transposed();

  FitState state = initial_state(series, cfg, nullptr, nullptr);
  EstimationResult res;
  res.objective_trace.push_back(lse_objective(series, state, cfg.k));

  for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
    LeftUpdate left =
        update_left(series, state.a2, state.b2, w, cfg.k, cfg.include_constant, cfg.r1, no_whitener);
    state.a1 = left.a1;
    state.b1 = left.b1;
    state.d = left.d;
    res.ridged = res.ridged || left.ridged;

    LeftUpdate right = update_left(transposed, state.a1, state.b1, w_t, cfg.k,
                                   cfg.include_constant, cfg.r2, no_whitener);
    state.a2 = right.a1;
    state.b2 = right.b1;
    state.d = right.d.transpose();
    res.ridged = res.ridged || right.ridged;

    res.iterations = sweep + 1;
    const double obj = lse_objective(series, state, cfg.k);
    const double prev = res.objective_trace.back();
    res.objective_trace.push_back(obj);
    if (cfg.record_iterates)
      res.iterate_trace.push_back(
          model_from_state(cfg.dims(series.d1, d2), state, ErrorCovSpec::identity()));
    if (relative_change_below(prev, obj, cfg.tol)) {
      res.converged = true;
      break;
    }
  }

  res.model = model_from_state(cfg.dims(series.d1, d2), state, ErrorCovSpec::identity());
  return res;
}

EstimationResult mle_fit(const MatrixSeries& series, const FitConfig& cfg) {
  cfg.validate();
  series.validate();
  const int d1 = series.d1;
  const int d2 = series.d2;
  const int n = series.length() - 1 - cfg.k;

  MatrixXd sigma1 = MatrixXd::Identity(d1, d1);
  MatrixXd sigma2 = MatrixXd::Identity(d2, d2);
  FitState state = cfg.update_covariance
                       ? initial_state(series, cfg, &sigma1, &sigma2)
                       : initial_state(series, cfg, nullptr, nullptr);
  const MatrixSeries transposed = series.transposed();

  EstimationResult res;
  res.objective_trace.push_back(loglik(series, state, cfg.k, sigma1, sigma2));

  bool floored = false;
  for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
    // Left block: (A1, B_i1, D, Sigma1) given the right block.
    {
      const MatrixXd w = solve_spd(sigma2, MatrixXd::Identity(d2, d2), &res.ridged);
      MatrixXd whitener;
      if (cfg.update_covariance) {
        const MomentBlocksExt ext =
            build_moments_ext(series, state.a2, state.b2, w, cfg.k, cfg.include_constant);
        bool r = ext.base.ridged;
        const MatrixXd a1_full =
            solve_spd(ext.base.sxx_z, ext.base.syx_z.transpose(), &r).transpose();
        whitener = spd_floor(ext.syy_z - a1_full * ext.base.syx_z.transpose(), &floored);
        res.ridged = res.ridged || r;
      } else {
        whitener = sigma1;
      }
      LeftUpdate left =
          update_left(series, state.a2, state.b2, w, cfg.k, cfg.include_constant, cfg.r1, whitener);
      state.a1 = left.a1;
      state.b1 = left.b1;
      state.d = left.d;
      res.ridged = res.ridged || left.ridged;
      if (cfg.update_covariance) {
        MatrixXd s1 = MatrixXd::Zero(d1, d1);
        for (const auto& rt : residuals(series, state, cfg.k)) s1 += rt * w * rt.transpose();
        sigma1 = spd_floor(s1 / (static_cast<double>(d2) * n), &floored);
      }
    }

    // Right block, mirrored on the transposed series.
    {
      const MatrixXd w = solve_spd(sigma1, MatrixXd::Identity(d1, d1), &res.ridged);
      MatrixXd whitener;
      if (cfg.update_covariance) {
        const MomentBlocksExt ext =
            build_moments_ext(transposed, state.a1, state.b1, w, cfg.k, cfg.include_constant);
        bool r = ext.base.ridged;
        const MatrixXd a2_full =
            solve_spd(ext.base.sxx_z, ext.base.syx_z.transpose(), &r).transpose();
        whitener = spd_floor(ext.syy_z - a2_full * ext.base.syx_z.transpose(), &floored);
        res.ridged = res.ridged || r;
      } else {
        whitener = sigma2;
      }
      LeftUpdate right = update_left(transposed, state.a1, state.b1, w, cfg.k,
                                     cfg.include_constant, cfg.r2, whitener);
      state.a2 = right.a1;
      state.b2 = right.b1;
      state.d = right.d.transpose();
      res.ridged = res.ridged || right.ridged;
      if (cfg.update_covariance) {
        MatrixXd s2 = MatrixXd::Zero(d2, d2);
        for (const auto& rt : residuals(series, state, cfg.k))
          s2 += rt.transpose() * w * rt;
        sigma2 = spd_floor(s2 / (static_cast<double>(d1) * n), &floored);
        // Kronecker scale convention: trace(Sigma2) = d2. The paired rescale
        // leaves the likelihood unchanged.
        const double c = sigma2.trace() / d2;
        sigma2 /= c;
        sigma1 *= c;
      }
    }

    res.iterations = sweep + 1;
    const double ll = loglik(series, state, cfg.k, sigma1, sigma2);
    const double prev = res.objective_trace.back();
    res.objective_trace.push_back(ll);
    if (cfg.record_iterates)
      res.iterate_trace.push_back(
          model_from_state(cfg.dims(d1, d2), state, ErrorCovSpec::identity()));
    if (relative_change_below(prev, ll, cfg.tol)) {
      res.converged = true;
      break;
    }
  }

  res.sigma1 = sigma1;
  res.sigma2 = sigma2;
  res.ridged = res.ridged || floored;
  res.model = model_from_state(cfg.dims(d1, d2), state,
                               ErrorCovSpec::setting_ii(spd_floor(sigma1), spd_floor(sigma2)));
  return res;
}

}  // namespace cmar
