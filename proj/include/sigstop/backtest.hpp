#pragma once

// Price ingestion, the moving-band baseline, equity accounting and the
// performance metric set used to compare strategies.

#include <Eigen/Dense>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sigstop/engine.hpp"

namespace sigstop {

using Date = std::chrono::year_month_day;

Date parse_date(const std::string& text);  // YYYY-MM-DD
std::string format_date(const Date& date);

struct PriceSeries {
    std::string symbol;
    std::vector<Date> dates;
    Eigen::VectorXd closes;

    Index size() const { return closes.size(); }
};

// CSV with header `date,close`. Rows are re-sorted by date.
PriceSeries parse_prices(std::istream& in, const std::string& symbol);
PriceSeries load_prices(const std::filesystem::path& file, std::string symbol = "");

struct AlignedPrices {
    std::vector<Date> dates;
    Eigen::VectorXd a;
    Eigen::VectorXd b;
};

// Inner join on dates.
AlignedPrices align(const PriceSeries& a, const PriceSeries& b);

struct BaselineConfig {
    double band_mult = 0.1;
    Index window = 100;

    void validate() const;
};

// Long-only: enter below MA - k*Std, exit above MA + k*Std, statistics over the
// preceding `window` values (current value excluded).
TradeSchedule baseline_strategy(const Eigen::VectorXd& spread, const BaselineConfig& config);

struct EquityCurve {
    double initial_capital = 1.0;
    Eigen::VectorXd values;
    Eigen::VectorXd daily_returns;  // values[j+1] - values[j]
};

EquityCurve equity_curve(const Eigen::VectorXd& spread, const TradeSchedule& schedule, const TradingCosts& costs);

struct PerformanceReport {
    double daily_ret = 0.0;  // %
    double daily_std = 0.0;  // %
    std::optional<double> sharpe;
    double max_dd = 0.0;   // %
    double cum_pnl = 0.0;  // %
    Index trade_num = 0;
    double annual_ret = 0.0;  // daily_ret * 252
    double annual_std = 0.0;  // daily_std * sqrt(252)
    std::optional<double> annual_sharpe;
};

PerformanceReport compute_metrics(const EquityCurve& curve, const TradeSchedule& schedule);

struct Comparison {
    PerformanceReport strategy;
    PerformanceReport baseline;
    EquityCurve strategy_curve;
    EquityCurve baseline_curve;
};

Comparison compare(const Eigen::VectorXd& spread, const TradeSchedule& strategy, const TradeSchedule& baseline,
                   const TradingCosts& costs);

}  // namespace sigstop
