#include "sigstop/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sigstop/errors.hpp"

namespace sigstop {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_number(text.substr(0, 4), y) ||
        !parse_number(text.substr(5, 2), m) || !parse_number(text.substr(8, 2), d))
        throw ParseError("malformed date '" + text + "' (expected YYYY-MM-DD)");
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) throw ParseError("invalid calendar date '" + text + "'");
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

PriceSeries parse_prices(std::istream& in, const std::string& symbol) {
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<std::pair<Date, double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line == "date,close") continue;
            throw ParseError("expected header 'date,close'", line_no);
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError("expected 2 fields 'date,close'", line_no);
        const std::string date_text = trim(line.substr(0, comma));
        const std::string close_text = trim(line.substr(comma + 1));
        if (close_text.empty()) throw ParseError("missing close", line_no);
        Date date;
        try {
            date = parse_date(date_text);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        double close = 0.0;
        if (!parse_number(close_text, close)) throw ParseError("malformed close '" + close_text + "'", line_no);
        if (!(close > 0.0) || !std::isfinite(close))
            throw ValidationError("non-positive or non-finite close on line " + std::to_string(line_no));
        rows.emplace_back(date, close);
    }
    if (!header_seen) throw ParseError("empty price file");
    std::stable_sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first)
            throw ValidationError("duplicate date " + format_date(rows[i].first));

    PriceSeries series;
    series.symbol = symbol;
    series.closes.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        series.dates.push_back(rows[i].first);
        series.closes[static_cast<Index>(i)] = rows[i].second;
    }
    return series;
}

PriceSeries load_prices(const std::filesystem::path& file, std::string symbol) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open price file " + file.string());
    if (symbol.empty()) symbol = file.stem().string();
    try {
        return parse_prices(in, symbol);
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(file.string() + ": " + e.what());
    }
}

AlignedPrices align(const PriceSeries& a, const PriceSeries& b) {
    AlignedPrices out;
    std::vector<double> va;
    std::vector<double> vb;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.dates.size() && j < b.dates.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            out.dates.push_back(a.dates[i]);
            va.push_back(a.closes[static_cast<Index>(i++)]);
            vb.push_back(b.closes[static_cast<Index>(j++)]);
        }
    }
    out.a = Eigen::Map<Eigen::VectorXd>(va.data(), static_cast<Index>(va.size()));
    out.b = Eigen::Map<Eigen::VectorXd>(vb.data(), static_cast<Index>(vb.size()));
    return out;
}

void BaselineConfig::validate() const {
    if (!(band_mult >= 0.0) || !std::isfinite(band_mult)) throw InvalidArgument("band multiplier must be >= 0");
    if (window < 2) throw InvalidArgument("baseline window must be >= 2");
}

TradeSchedule baseline_strategy(const Eigen::VectorXd& spread, const BaselineConfig& config) {
    config.validate();
    if (spread.size() <= config.window) throw InvalidArgument("spread must be longer than the baseline window");
    const Index last = spread.size() - 1;
    const double w = static_cast<double>(config.window);

    TradeSchedule schedule;
    schedule.side = Side::Long;
    bool holding = false;
    Trade open;
    for (Index j = config.window; j <= last; ++j) {
        const auto past = spread.segment(j - config.window, config.window).array();
        const double ma = past.mean();
        const double sd = std::sqrt((past - ma).square().sum() / (w - 1.0));
        const double x = spread[j];
        if (!holding && j < last && x < ma - config.band_mult * sd) {
            holding = true;
            open = Trade{j, j, x, x};
        } else if (holding && x > ma + config.band_mult * sd) {
            holding = false;
            open.exit_index = j;
            open.exit_value = x;
            schedule.trades.push_back(open);
        }
    }
    if (holding) {
        open.exit_index = last;
        open.exit_value = spread[last];
        schedule.trades.push_back(open);
        schedule.forced_close = true;
    }
    return schedule;
}

EquityCurve equity_curve(const Eigen::VectorXd& spread, const TradeSchedule& schedule, const TradingCosts& costs) {
    if (spread.size() < 2) throw InvalidArgument("equity curve needs at least 2 points");
    schedule.validate(spread.size() - 1);
    const double sign = schedule.side == Side::Long ? 1.0 : -1.0;

    // change[j] is the step ending at j. The entry cost is charged on the first
    // holding step so values[0] always equals the initial capital.
    Eigen::VectorXd change = Eigen::VectorXd::Zero(spread.size());
    for (const auto& t : schedule.trades) {
        change[t.entry_index + 1] -= costs.entry_cost;
        for (Index j = t.entry_index + 1; j <= t.exit_index; ++j) change[j] += sign * (spread[j] - spread[j - 1]);
        change[t.exit_index] -= costs.exit_cost;
    }
    EquityCurve curve;
    curve.values.resize(spread.size());
    double equity = curve.initial_capital;
    for (Index j = 0; j < spread.size(); ++j) {
        equity += change[j];
        curve.values[j] = equity;
    }
    curve.daily_returns = curve.values.tail(spread.size() - 1) - curve.values.head(spread.size() - 1);
    return curve;
}

PerformanceReport compute_metrics(const EquityCurve& curve, const TradeSchedule& schedule) {
    if (curve.values.size() < 2) throw InvalidArgument("metrics need an equity curve with >= 2 points");
    const double capital = curve.initial_capital;
    const Eigen::ArrayXd r = (curve.values.tail(curve.values.size() - 1) - curve.values.head(curve.values.size() - 1))
                                 .array() /
                             capital;
    const double mean = r.mean();
    const double sd = r.size() > 1 ? std::sqrt((r - mean).square().sum() / static_cast<double>(r.size() - 1)) : 0.0;

    double peak = capital;
    double max_dd = 0.0;
    for (Index j = 0; j < curve.values.size(); ++j) {
        peak = std::max(peak, curve.values[j]);
        max_dd = std::min(max_dd, (curve.values[j] - peak) / capital);
    }

    PerformanceReport rep;
    rep.daily_ret = 100.0 * mean;
    rep.daily_std = 100.0 * sd;
    if (sd > 0.0) {
        rep.sharpe = mean / sd;
        rep.annual_sharpe = *rep.sharpe * std::sqrt(252.0);
    }
    rep.max_dd = 100.0 * max_dd;
    rep.cum_pnl = 100.0 * (curve.values[curve.values.size() - 1] - capital) / capital;
    rep.trade_num = static_cast<Index>(schedule.trades.size());
    rep.annual_ret = rep.daily_ret * 252.0;
    rep.annual_std = rep.daily_std * std::sqrt(252.0);
    return rep;
}

Comparison compare(const Eigen::VectorXd& spread, const TradeSchedule& strategy, const TradeSchedule& baseline,
                   const TradingCosts& costs) {
    Comparison out;
    out.strategy_curve = equity_curve(spread, strategy, costs);
    out.baseline_curve = equity_curve(spread, baseline, costs);
    out.strategy = compute_metrics(out.strategy_curve, strategy);
    out.baseline = compute_metrics(out.baseline_curve, baseline);
    return out;
}

}  // namespace sigstop
