#include "cmar/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmar/cvar.hpp"
#include "cmar/fit.hpp"
#include "cmar/metrics.hpp"
#include "cmar/series_io.hpp"

namespace cmar {

std::string to_string(McMethod m) {
  switch (m) {
    case McMethod::Cvar: return "CVAR";
    case McMethod::Lse: return "LSE";
    case McMethod::Mle: return "MLE";
  }
  throw std::logic_error("unknown method");
}

void McConfig::validate() const {
  if (dims_grid.empty() || t_grid.empty()) throw std::invalid_argument("McConfig: empty grid");
  for (const auto& d : dims_grid) d.validate();
  if (reps < 1) throw std::invalid_argument("McConfig: reps must be at least 1");
  if (methods.empty()) throw std::invalid_argument("McConfig: no methods selected");
}

namespace {

int worker_count(const McConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("CMAR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Pair-sign indeterminacy of (alpha1, alpha2): report the error on the
// quotient, i.e. the better of the two signed matches.
double cmar_alpha_error(const CmarModel& hat, const CmarModel& truth) {
  double best = std::numeric_limits<double>::infinity();
  for (const double s : {1.0, -1.0}) {
    const double e = aligned_alpha_error(s * hat.alpha1, hat.beta1, truth.alpha1, truth.beta1) +
                     aligned_alpha_error(s * hat.alpha2, hat.beta2, truth.alpha2, truth.beta2);
    best = std::min(best, e);
  }
  return best;
}

double cmar_b_error(const CmarModel& hat, const CmarModel& truth) {
  double e = 0.0;
  for (int i = 0; i < truth.dims.k; ++i) e += (hat.gamma(i) - truth.gamma(i)).squaredNorm();
  return e;
}

ReplicateRecord fit_one(McMethod method, const MatrixSeries& series, const CmarModel& truth,
                        const Dims& dims, bool include_constant, bool record_runtime) {
  ReplicateRecord rec;
  rec.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (method == McMethod::Cvar) {
      const CvarModel fit = cvar_fit(series.vectorized(), dims.r1 * dims.r2, dims.k,
                                     include_constant, CvarWeighting::Johansen);
      const auto err = cvar_projection_error(fit.beta, truth.beta1, truth.beta2);
      rec.proj_err_log = err.value;
      rec.exact = err.exact;
      rec.alpha_err = aligned_alpha_error(fit.alpha, fit.beta, kron(truth.alpha2, truth.alpha1),
                                          kron(truth.beta2, truth.beta1));
      rec.b_err = 0.0;
      for (int i = 0; i < dims.k; ++i) rec.b_err += (fit.gamma[i] - truth.gamma(i)).squaredNorm();
      rec.converged = true;
    } else {
      FitConfig cfg;
      cfg.r1 = dims.r1;
      cfg.r2 = dims.r2;
      cfg.k = dims.k;
      cfg.include_constant = include_constant;
      const EstimationResult fit = method == McMethod::Lse ? lse_fit(series, cfg)
                                                           : mle_fit(series, cfg);
      const auto err =
          projection_error(fit.model.beta1, truth.beta1, fit.model.beta2, truth.beta2);
      rec.proj_err_log = err.value;
      rec.exact = err.exact;
      rec.alpha_err = cmar_alpha_error(fit.model, truth);
      rec.b_err = cmar_b_error(fit.model, truth);
      rec.converged = fit.converged;
    }
  } catch (const std::exception&) {
    rec.converged = false;
    rec.proj_err_log = std::numeric_limits<double>::quiet_NaN();
    rec.alpha_err = std::numeric_limits<double>::quiet_NaN();
    rec.b_err = std::numeric_limits<double>::quiet_NaN();
  }
  if (record_runtime) {
    const auto t1 = std::chrono::steady_clock::now();
    rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return rec;
}

}  // namespace

std::vector<ReplicateRecord> run_monte_carlo(const McConfig& cfg) {
  cfg.validate();

  struct Job {
    Dims dims;
    int T = 0;
    int rep = 0;
    const CmarModel* shared_model = nullptr;
  };

  // One fixed coefficient draw per dims configuration unless redrawing.
  std::vector<CmarModel> shared_models;
  shared_models.reserve(cfg.dims_grid.size());
  if (!cfg.redraw_per_rep) {
    for (const auto& dims : cfg.dims_grid) {
      SimConfig sim{dims, *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end()),
                    cfg.error_setting, cfg.include_constant, 0.8, cfg.base_seed, 1000};
      Rng rng(cfg.base_seed);
      shared_models.push_back(gen_model(sim, rng));
    }
  }

  std::vector<Job> jobs;
  for (size_t di = 0; di < cfg.dims_grid.size(); ++di)
    for (int T : cfg.t_grid)
      for (int rep = 0; rep < cfg.reps; ++rep)
        jobs.push_back({cfg.dims_grid[di], T, rep,
                        cfg.redraw_per_rep ? nullptr : &shared_models[di]});

  std::vector<std::vector<ReplicateRecord>> slots(jobs.size());
  std::atomic<size_t> next{0};
  auto run_job = [&](size_t idx) {
    const Job& job = jobs[idx];
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(job.rep);
    Rng rng(seed);
    CmarModel model;
    if (job.shared_model) {
      model = *job.shared_model;
    } else {
      SimConfig sim{job.dims, job.T, cfg.error_setting, cfg.include_constant, 0.8, seed, 1000};
      model = gen_model(sim, rng);
    }
    const MatrixSeries series = simulate_series(model, job.T, rng);
    for (McMethod method : cfg.methods) {
      ReplicateRecord rec =
          fit_one(method, series, model, job.dims, cfg.include_constant, cfg.record_runtime);
      rec.T = job.T;
      rec.dims = job.dims;
      rec.rep = job.rep;
      rec.seed = seed;
      slots[idx].push_back(rec);
    }
  };

  const int workers = std::min<int>(worker_count(cfg), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_job(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<ReplicateRecord> records;
  records.reserve(jobs.size() * cfg.methods.size());
  for (const auto& slot : slots)
    for (const auto& rec : slot) records.push_back(rec);
  return records;
}

std::string records_to_csv(const std::vector<ReplicateRecord>& records) {
  std::ostringstream out;
  out << "method,T,d1,d2,r1,r2,rep,seed,proj_err_log,alpha_err,b_err,runtime_ms,converged,"
         "exact_flag\n";
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.T << ',' << r.dims.d1 << ',' << r.dims.d2 << ','
        << r.dims.r1 << ',' << r.dims.r2 << ',' << r.rep << ',' << r.seed << ','
        << format_double(r.proj_err_log) << ',' << format_double(r.alpha_err) << ','
        << format_double(r.b_err) << ',' << format_double(r.runtime_ms) << ','
        << (r.converged ? 1 : 0) << ',' << (r.exact ? 1 : 0) << '\n';
  }
  return out.str();
}

double median_stat(const std::vector<ReplicateRecord>& records, McMethod method, int T,
                   double ReplicateRecord::*field) {
  std::vector<double> vals;
  for (const auto& r : records)
    if (r.method == method && r.T == T && std::isfinite(r.*field)) vals.push_back(r.*field);
  return median(vals);
}

}  // namespace cmar
