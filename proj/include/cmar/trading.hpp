// Rolling pairs-trading backtest driven by the estimated bilinear
// cointegrating vectors: threshold entries on the spread beta'vec(X_t),
// opposite-threshold exits, re-estimation on the trailing formation window
// at every close, and compounded reinvestment. The equal-value benchmark
// shares the identical signal path and differs only in position sizing.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmar/fit.hpp"
#include "cmar/model.hpp"

namespace cmar {

struct BacktestConfig {
  int formation_days = 252;  // trailing estimation window
  double threshold = 1.0;    // entry/exit width s in units of sigma
  int k = 1;
  bool include_constant = true;
  FitMethod method = FitMethod::Mle;
  std::string trading_start;  // ISO-8601, inclusive
  std::string trading_end;    // ISO-8601, inclusive; any open position is force-closed here
  double cost_per_trade_bps = 0.0;  // hook, zero by default

  void validate() const;
};

enum class TradeSide { LongSpread, ShortSpread };

std::string to_string(TradeSide side);

struct TradeEvent {
  std::string open_date;
  std::string close_date;
  TradeSide side = TradeSide::LongSpread;
  bool forced_close = false;  // closed by the end of the trading period
  double spread_open = 0.0;
  double spread_close = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  VectorXd beta;  // snapshot of the weights the trade used
  double trade_return = 0.0;
  int open_index = -1;
  int close_index = -1;
  int fit_window_first = -1;
  int fit_window_last = -1;  // last observation the estimate saw
};

struct TradeLog {
  std::vector<TradeEvent> events;
  double cumulative_return = 0.0;
  bool degenerate_beta = false;  // an all-one-sign beta was traded
  bool equal_value = false;
};

struct SpreadWeights {
  VectorXd beta_kron;   // beta2 (x) beta1, sign-fixed
  VectorXd beta_plus;   // max(beta, 0)
  VectorXd beta_minus;  // max(-beta, 0)
  bool degenerate = false;  // one side is identically zero
};

// Requires r1 = r2 = 1.
SpreadWeights spread_weights(const CmarModel& model);

// Maps a formation window to the spread weights. The default fits the
// configured estimator with ranks (1,1); tests may inject fixed weights.
using SpreadEstimator = std::function<VectorXd(const MatrixSeries& window)>;

SpreadEstimator default_estimator(const BacktestConfig& cfg);

TradeLog backtest(const MatrixSeries& series, const BacktestConfig& cfg,
                  SpreadEstimator estimator = {});
TradeLog backtest_equal_value(const MatrixSeries& series, const BacktestConfig& cfg,
                              SpreadEstimator estimator = {});

// Every trade's parameters must come from data strictly before its open.
bool audit_no_lookahead(const TradeLog& log);

// Fama-French 25-portfolio daily panel: date column followed by 25 value
// columns mapped column-major onto a 5x5 matrix (row = profitability
// quintile, column = book-to-market quintile). Rows with missing cells or
// the -99/-999 missing codes are dropped. With returns_to_levels the cells
// are compounded into cumulative price levels, dividing by 100 first when
// `percent` is set.
MatrixSeries load_ff_panel(const std::string& path, bool returns_to_levels = false,
                           bool percent = false);

// Columns: open_date,side,close_date,spread_open,spread_close,mu,sigma,
//          trade_return,cum_return
std::string trade_log_to_csv(const TradeLog& log);

}  // namespace cmar
