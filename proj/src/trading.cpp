#include "cmar/trading.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmar/series_io.hpp"

namespace cmar {

void BacktestConfig::validate() const {
  if (threshold <= 0.0) throw std::invalid_argument("BacktestConfig: threshold must be positive");
  if (formation_days < 60)
    throw std::invalid_argument("BacktestConfig: formation window must be at least 60 days");
  if (k < 0) throw std::invalid_argument("BacktestConfig: k must be non-negative");
  if (trading_start.empty() || trading_end.empty() || trading_end < trading_start)
    throw std::invalid_argument("BacktestConfig: bad trading date range");
}

std::string to_string(TradeSide side) {
  return side == TradeSide::LongSpread ? "long-spread" : "short-spread";
}

SpreadWeights spread_weights(const CmarModel& model) {
  if (model.dims.r1 != 1 || model.dims.r2 != 1)
    throw std::invalid_argument("spread_weights: requires r1 = r2 = 1");
  SpreadWeights w;
  w.beta_kron = kron(model.beta2, model.beta1);
  w.beta_plus = w.beta_kron.cwiseMax(0.0);
  w.beta_minus = (-w.beta_kron).cwiseMax(0.0);
  w.degenerate = w.beta_plus.isZero(0.0) || w.beta_minus.isZero(0.0);
  return w;
}

SpreadEstimator default_estimator(const BacktestConfig& cfg) {
  return [cfg](const MatrixSeries& window) {
    FitConfig fit;
    fit.r1 = 1;
    fit.r2 = 1;
    fit.k = cfg.k;
    fit.include_constant = cfg.include_constant;
    const EstimationResult res =
        cfg.method == FitMethod::Mle ? mle_fit(window, fit) : lse_fit(window, fit);
    return spread_weights(res.model).beta_kron;
  };
}

namespace {

struct ActiveParams {
  VectorXd beta;
  double mu = 0.0;
  double sigma = 0.0;
  int window_first = -1;
  int window_last = -1;
  bool degenerate = false;
};

double spread_at(const VectorXd& beta, const MatrixSeries& series, int t) {
  return beta.dot(vec(series.values[t]));
}

// Fit on the formation_days observations strictly before t.
ActiveParams refit(const MatrixSeries& series, const BacktestConfig& cfg,
                   const SpreadEstimator& estimator, int t) {
  ActiveParams p;
  p.window_first = t - cfg.formation_days;
  p.window_last = t - 1;
  const MatrixSeries window = series.slice(p.window_first, cfg.formation_days);
  p.beta = estimator(window);
  if (p.beta.size() != series.d1 * series.d2)
    throw std::runtime_error("backtest: estimator returned weights of wrong length");
  p.degenerate = p.beta.cwiseMax(0.0).isZero(0.0) || (-p.beta).cwiseMax(0.0).isZero(0.0);

  double sum = 0.0;
  for (int i = 0; i < cfg.formation_days; ++i)
    sum += p.beta.dot(vec(window.values[i]));
  p.mu = sum / cfg.formation_days;
  double ss = 0.0;
  for (int i = 0; i < cfg.formation_days; ++i) {
    const double d = p.beta.dot(vec(window.values[i])) - p.mu;
    ss += d * d;
  }
  p.sigma = std::sqrt(ss / (cfg.formation_days - 1));
  return p;
}

// share-proportional sizing: hold |beta_i| shares of cell i, so the position
// P&L is exactly the spread change; return on gross capital at open.
double proportional_return(const TradeEvent& ev, const VectorXd& beta, const MatrixSeries& series) {
  const VectorXd open_levels = vec(series.values[ev.open_index]);
  const double gross = beta.cwiseAbs().dot(open_levels.cwiseAbs());
  if (gross <= 0.0) throw std::runtime_error("backtest: zero gross capital at open");
  const double pnl = ev.spread_close - ev.spread_open;
  return (ev.side == TradeSide::LongSpread ? pnl : -pnl) / gross;
}

// one dollar in each leg: (long-leg return - short-leg return) / 2.
double equal_value_return(const TradeEvent& ev, const VectorXd& beta, const MatrixSeries& series) {
  const VectorXd plus = beta.cwiseMax(0.0);
  const VectorXd minus = (-beta).cwiseMax(0.0);
  const VectorXd open_levels = vec(series.values[ev.open_index]);
  const VectorXd close_levels = vec(series.values[ev.close_index]);
  auto leg_return = [&](const VectorXd& leg) {
    const double v0 = leg.dot(open_levels);
    if (v0 == 0.0) return 0.0;  // empty leg of a degenerate beta
    return leg.dot(close_levels) / v0 - 1.0;
  };
  const double plus_ret = leg_return(plus);
  const double minus_ret = leg_return(minus);
  return ev.side == TradeSide::LongSpread ? 0.5 * (plus_ret - minus_ret)
                                          : 0.5 * (minus_ret - plus_ret);
}

TradeLog run_backtest(const MatrixSeries& series, const BacktestConfig& cfg,
                      SpreadEstimator estimator, bool equal_value) {
  cfg.validate();
  series.validate();
  if (series.index.empty())
    throw std::invalid_argument("backtest: series needs a date index");
  if (!estimator) estimator = default_estimator(cfg);

  int start = -1, end = -1;
  for (int t = 0; t < series.length(); ++t) {
    if (start < 0 && series.index[t] >= cfg.trading_start) start = t;
    if (series.index[t] <= cfg.trading_end) end = t;
  }
  if (start < 0 || end < start)
    throw std::invalid_argument("backtest: trading window not covered by the series");
  if (start < cfg.formation_days)
    throw std::invalid_argument("backtest: insufficient formation data before trading start");

  TradeLog log;
  log.equal_value = equal_value;
  ActiveParams params = refit(series, cfg, estimator, start);
  log.degenerate_beta = log.degenerate_beta || params.degenerate;

  bool open = false;
  TradeEvent ev;
  double compounded = 1.0;

  for (int t = start; t <= end; ++t) {
    double spread = spread_at(params.beta, series, t);

    if (open) {
      const bool hit = ev.side == TradeSide::ShortSpread
                           ? spread <= params.mu - cfg.threshold * params.sigma
                           : spread >= params.mu + cfg.threshold * params.sigma;
      if (hit || t == end) {
        ev.close_date = series.index[t];
        ev.close_index = t;
        ev.spread_close = spread;
        ev.forced_close = !hit;
        ev.trade_return = equal_value ? equal_value_return(ev, params.beta, series)
                                      : proportional_return(ev, params.beta, series);
        ev.trade_return -= cfg.cost_per_trade_bps / 1e4;
        compounded *= 1.0 + ev.trade_return;
        log.events.push_back(ev);
        open = false;
        if (t < end) {
          // Rolling re-estimation at the close; t becomes the new t0.
          params = refit(series, cfg, estimator, t);
          log.degenerate_beta = log.degenerate_beta || params.degenerate;
          spread = spread_at(params.beta, series, t);
        }
      }
    }

    // No new entries on the final day: a position could not outlive it.
    if (!open && t < end) {
      const double upper = params.mu + cfg.threshold * params.sigma;
      const double lower = params.mu - cfg.threshold * params.sigma;
      if (spread >= upper || spread <= lower) {
        ev = TradeEvent{};
        ev.side = spread >= upper ? TradeSide::ShortSpread : TradeSide::LongSpread;
        ev.open_date = series.index[t];
        ev.open_index = t;
        ev.spread_open = spread;
        ev.mu = params.mu;
        ev.sigma = params.sigma;
        ev.beta = params.beta;
        ev.fit_window_first = params.window_first;
        ev.fit_window_last = params.window_last;
        open = true;
      }
    }
  }

  log.cumulative_return = compounded - 1.0;
  return log;
}

}  // namespace

TradeLog backtest(const MatrixSeries& series, const BacktestConfig& cfg,
                  SpreadEstimator estimator) {
  return run_backtest(series, cfg, std::move(estimator), /*equal_value=*/false);
}

TradeLog backtest_equal_value(const MatrixSeries& series, const BacktestConfig& cfg,
                              SpreadEstimator estimator) {
  return run_backtest(series, cfg, std::move(estimator), /*equal_value=*/true);
}

bool audit_no_lookahead(const TradeLog& log) {
  int prev_close = -1;
  for (const auto& ev : log.events) {
    if (ev.fit_window_last >= ev.open_index) return false;
    if (ev.close_index < ev.open_index) return false;
    if (ev.open_index < prev_close) return false;  // overlap
    prev_close = ev.close_index;
  }
  return true;
}

namespace {

std::string normalize_date(const std::string& raw) {
  // YYYYMMDD -> ISO; anything else passes through.
  if (raw.size() == 8 && raw.find_first_not_of("0123456789") == std::string::npos)
    return raw.substr(0, 4) + "-" + raw.substr(4, 2) + "-" + raw.substr(6, 2);
  return raw;
}

}  // namespace

MatrixSeries load_ff_panel(const std::string& path, bool returns_to_levels, bool percent) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ff panel: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ff panel: empty file");
  {
    std::stringstream header(line);
    std::string field;
    int ncols = 0;
    while (std::getline(header, field, ',')) ++ncols;
    if (ncols != 26)
      throw std::runtime_error(
          "ff panel: expected a date column plus 25 portfolio columns "
          "(profitability quintile fastest, book-to-market quintile outer), got " +
          std::to_string(ncols) + " columns");
  }

  MatrixSeries s;
  s.d1 = 5;
  s.d2 = 5;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) {
      while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
      fields.push_back(field);
    }
    if (fields.size() != 26) continue;
    MatrixXd m(5, 5);
    bool ok = true;
    for (int j = 0; j < 25 && ok; ++j) {
      try {
        const double v = std::stod(fields[j + 1]);
        if (v <= -99.0) ok = false;  // Fama-French missing code
        m(j % 5, j / 5) = v;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) continue;
    s.values.push_back(std::move(m));
    s.index.push_back(normalize_date(fields[0]));
  }
  if (s.values.empty()) throw std::runtime_error("ff panel: no usable rows");

  if (returns_to_levels) {
    MatrixXd level = MatrixXd::Ones(5, 5);
    for (auto& v : s.values) {
      MatrixXd r = percent ? MatrixXd(v / 100.0) : v;
      level = level.cwiseProduct(MatrixXd::Ones(5, 5) + r);
      v = level;
    }
  }
  s.validate();
  return s;
}

std::string trade_log_to_csv(const TradeLog& log) {
  std::ostringstream out;
  out << "open_date,side,close_date,spread_open,spread_close,mu,sigma,trade_return,cum_return\n";
  double compounded = 1.0;
  for (const auto& ev : log.events) {
    compounded *= 1.0 + ev.trade_return;
    out << ev.open_date << ',' << to_string(ev.side) << ',' << ev.close_date << ','
        << format_double(ev.spread_open) << ',' << format_double(ev.spread_close) << ','
        << format_double(ev.mu) << ',' << format_double(ev.sigma) << ','
        << format_double(ev.trade_return) << ',' << format_double(compounded - 1.0) << '\n';
  }
  return out.str();
}

}  // namespace cmar
