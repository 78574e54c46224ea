// cmar: simulate / fit / montecarlo / backtest front end. JSON configs and
// parameter files, CSV time series and result tables. Every output is
// written atomically and a one-line JSON summary goes to stdout.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>

#include "cmar/companion.hpp"
#include "cmar/cvar.hpp"
#include "cmar/fit.hpp"
#include "cmar/json_io.hpp"
#include "cmar/montecarlo.hpp"
#include "cmar/series_io.hpp"
#include "cmar/simulate.hpp"
#include "cmar/trading.hpp"

namespace {

using nlohmann::json;

int run_simulate(const std::string& out, const std::string& truth_path, cmar::SimConfig cfg) {
  cfg.validate();
  cmar::Rng rng(cfg.seed);
  const cmar::CmarModel model = cmar::gen_model(cfg, rng);
  cmar::MatrixSeries series = cmar::simulate_series(model, cfg.T, rng);
  cmar::write_series_csv(series, out);

  json truth = cmar::to_json(model);
  truth["seed"] = cfg.seed;
  truth["T"] = cfg.T;
  cmar::write_file_atomic(truth_path, truth.dump(2) + "\n");

  json summary = {{"command", "simulate"},
                  {"out", out},
                  {"truth", truth_path},
                  {"T", cfg.T},
                  {"spectral_radius", cmar::spectral_radius(cmar::companion_matrix(model))},
                  {"unit_roots", cmar::unit_root_count(model)}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_fit(const std::string& data, const std::string& method, const std::string& out,
            cmar::FitConfig cfg, const std::string& init, std::uint64_t seed) {
  if (init == "random")
    cfg.init = cmar::InitStrategy::Random;
  else if (init != "cvar")
    throw std::invalid_argument("fit: --init must be cvar or random");
  cfg.seed = seed;
  cfg.validate();

  const cmar::MatrixSeries series = cmar::read_series_csv(data);
  json out_json;
  json summary = {{"command", "fit"}, {"method", method}, {"out", out}};

  if (method == "cvar") {
    const cmar::CvarModel fit =
        cmar::cvar_fit(series.vectorized(), cfg.r1 * cfg.r2, cfg.k, cfg.include_constant);
    out_json["method"] = "cvar";
    out_json["rank"] = fit.r;
    out_json["alpha"] = cmar::to_json(fit.alpha);
    out_json["beta"] = cmar::to_json(fit.beta);
    json gammas = json::array();
    for (const auto& g : fit.gamma) gammas.push_back(cmar::to_json(g));
    out_json["Gamma"] = std::move(gammas);
    out_json["d"] = cmar::to_json(fit.d_const);
    out_json["sigma"] = cmar::to_json(fit.sigma);
    out_json["projection"] = cmar::to_json(cmar::projection(fit.beta));
    out_json["diagnostics"] = {{"ridged", fit.ridged}};
    summary["converged"] = true;
  } else if (method == "lse" || method == "mle") {
    const cmar::EstimationResult res =
        method == "lse" ? cmar::lse_fit(series, cfg) : cmar::mle_fit(series, cfg);
    out_json = cmar::to_json(res, method);
    summary["converged"] = res.converged;
    summary["iterations"] = res.iterations;
    summary["objective"] = res.objective_trace.back();
  } else {
    throw std::invalid_argument("fit: --method must be lse, mle or cvar");
  }

  cmar::write_file_atomic(out, out_json.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_montecarlo(const std::string& config_path, const std::string& out, bool verbose) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("montecarlo: cannot open config '" + config_path + "'");
  json j;
  in >> j;
  const cmar::McConfig cfg = cmar::mc_config_from_json(j);
  if (verbose)
    std::cerr << "montecarlo: " << cfg.dims_grid.size() * cfg.t_grid.size() * cfg.reps
              << " replicates\n";
  const auto records = cmar::run_monte_carlo(cfg);
  cmar::write_file_atomic(out, cmar::records_to_csv(records));

  json summary = {{"command", "montecarlo"},
                  {"out", out},
                  {"records", records.size()},
                  {"reps", cfg.reps}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_backtest(const std::string& data, cmar::BacktestConfig cfg, const std::string& benchmark,
                 bool returns, bool percent, const std::string& out) {
  cfg.validate();
  const cmar::MatrixSeries series = cmar::load_ff_panel(data, returns, percent);
  const bool equal_value = benchmark == "equal-value";
  if (!benchmark.empty() && !equal_value)
    throw std::invalid_argument("backtest: --benchmark only supports equal-value");

  const cmar::TradeLog log = equal_value ? cmar::backtest_equal_value(series, cfg)
                                         : cmar::backtest(series, cfg);
  cmar::write_file_atomic(out, cmar::trade_log_to_csv(log));

  json summary = {{"command", "backtest"},
                  {"out", out},
                  {"strategy", equal_value ? "equal-value" : "proportional"},
                  {"trades", log.events.size()},
                  {"cumulative_return", log.cumulative_return},
                  {"degenerate_beta", log.degenerate_beta},
                  {"no_lookahead", cmar::audit_no_lookahead(log)}};
  if (returns)
    summary["notes"] =
        "levels compounded from daily returns; absolute return figures depend on this "
        "transformation choice";
  std::cout << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cointegrated matrix autoregression toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Progress output on stderr");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a CMAR model and simulate a series");
  cmar::SimConfig sim_cfg;
  std::string sim_out = "series.csv";
  std::string sim_truth;
  std::string sim_setting = "II";
  sim->add_option("--d1", sim_cfg.dims.d1)->required();
  sim->add_option("--d2", sim_cfg.dims.d2)->required();
  sim->add_option("--r1", sim_cfg.dims.r1)->required();
  sim->add_option("--r2", sim_cfg.dims.r2)->required();
  sim->add_option("--k", sim_cfg.dims.k);
  sim->add_option("--T", sim_cfg.T)->required();
  sim->add_option("--setting", sim_setting, "I, II or identity");
  sim->add_flag("--const", sim_cfg.include_constant, "Include the constant term D");
  sim->add_option("--constant-norm", sim_cfg.constant_norm);
  sim->add_option("--seed", sim_cfg.seed);
  sim->add_option("--max-rejection", sim_cfg.max_rejection);
  sim->add_option("--out", sim_out);
  sim->add_option("--truth", sim_truth, "Sidecar JSON with the true parameters");

  // fit
  auto* fit = app.add_subcommand("fit", "Estimate a model from a series CSV");
  std::string fit_data, fit_method = "lse", fit_out = "params.json", fit_init = "cvar";
  std::pair<int, int> fit_ranks{1, 1};
  cmar::FitConfig fit_cfg;
  std::uint64_t fit_seed = 0;
  fit->add_option("--data", fit_data)->required();
  fit->add_option("--method", fit_method, "lse, mle or cvar");
  fit->add_option("--ranks", fit_ranks, "r1,r2")->delimiter(',');
  fit->add_option("--k", fit_cfg.k);
  fit->add_flag("--const", fit_cfg.include_constant);
  fit->add_option("--tol", fit_cfg.tol);
  fit->add_option("--max-iter", fit_cfg.max_iter);
  fit->add_option("--init", fit_init, "cvar or random");
  fit->add_option("--seed", fit_seed);
  fit->add_option("--out", fit_out);

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "Replicated estimator comparison");
  std::string mc_config, mc_out = "results.csv";
  mc->add_option("--config", mc_config)->required();
  mc->add_option("--out", mc_out);

  // backtest
  auto* bt = app.add_subcommand("backtest", "Rolling pairs-trading backtest");
  std::string bt_data, bt_out = "trades.csv", bt_benchmark, bt_method = "mle";
  cmar::BacktestConfig bt_cfg;
  bool bt_returns = false, bt_percent = false, bt_no_const = false;
  bt->add_option("--data", bt_data)->required();
  bt->add_option("--start", bt_cfg.trading_start)->required();
  bt->add_option("--end", bt_cfg.trading_end)->required();
  bt->add_option("--s", bt_cfg.threshold);
  bt->add_option("--method", bt_method, "mle or lse");
  bt->add_option("--formation", bt_cfg.formation_days);
  bt->add_option("--k", bt_cfg.k);
  bt->add_flag("--no-const", bt_no_const, "Drop the constant from the rolling fits");
  bt->add_option("--cost-bps", bt_cfg.cost_per_trade_bps);
  bt->add_option("--benchmark", bt_benchmark, "equal-value");
  bt->add_flag("--returns", bt_returns, "Input cells are daily returns; compound to levels");
  bt->add_flag("--percent", bt_percent, "Returns are percentages (divide by 100)");
  bt->add_option("--out", bt_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) {
      if (sim_setting == "I")
        sim_cfg.error_setting = cmar::ErrorSetting::I;
      else if (sim_setting == "II")
        sim_cfg.error_setting = cmar::ErrorSetting::II;
      else if (sim_setting == "identity")
        sim_cfg.error_setting = cmar::ErrorSetting::Identity;
      else
        throw std::invalid_argument("simulate: --setting must be I, II or identity");
      if (sim_truth.empty()) sim_truth = sim_out + ".truth.json";
      return run_simulate(sim_out, sim_truth, sim_cfg);
    }
    if (fit->parsed()) {
      fit_cfg.r1 = fit_ranks.first;
      fit_cfg.r2 = fit_ranks.second;
      return run_fit(fit_data, fit_method, fit_out, fit_cfg, fit_init, fit_seed);
    }
    if (mc->parsed()) return run_montecarlo(mc_config, mc_out, verbose);
    if (bt->parsed()) {
      bt_cfg.include_constant = !bt_no_const;
      if (bt_method == "mle")
        bt_cfg.method = cmar::FitMethod::Mle;
      else if (bt_method == "lse")
        bt_cfg.method = cmar::FitMethod::Lse;
      else
        throw std::invalid_argument("backtest: --method must be mle or lse");
      return run_backtest(bt_data, bt_cfg, bt_benchmark, bt_returns, bt_percent, bt_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 2;
}
