#pragma once

// Sequential entry/exit stopping. Each problem trains a fresh policy on paths
// sampled from the anchor value over the remaining horizon, then applies it to
// the observed path; the stop becomes the anchor of the next problem.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigstop/models.hpp"
#include "sigstop/policy.hpp"

namespace sigstop {

enum class Side { Long, Short };
enum class PayoffKind { LongEntry, LongExit, ShortEntry, ShortExit };
enum class GeneratorKind { OuFit, Bootstrap };

std::string to_string(Side side);
std::string to_string(PayoffKind kind);
std::string to_string(GeneratorKind kind);
Side parse_side(const std::string& text);
GeneratorKind parse_generator(const std::string& text);

struct TradingCosts {
    double entry_cost = 0.0;
    double exit_cost = 0.0;
    double entry_discount = 0.0;  // per unit time
    double exit_discount = 0.0;

    void validate() const;
};

struct StrategyConfig {
    Side side = Side::Long;
    int order = 3;
    double threshold = 0.05;
    double sharpness = 20.0;
    Index sample_count = 100;
    GeneratorKind generator = GeneratorKind::OuFit;
    OptimizerConfig optimizer;
    Index min_window = 10;
    std::uint64_t seed = 0;
    Index block_length = 0;  // bootstrap only; 0 means default_block_length(formation steps)

    void validate() const;
};

struct Trade {
    Index entry_index = 0;
    Index exit_index = 0;
    double entry_value = 0.0;
    double exit_value = 0.0;
};

// One solved stopping problem, kept for auditing the entry/exit ordering.
struct ProblemRecord {
    PayoffKind kind;
    Index window_start = 0;
    Index window_length = 0;
    double anchor = 0.0;
    Index stop_index = 0;  // relative to window_start
    double best_loss = 0.0;
};

struct TradeSchedule {
    Side side = Side::Long;
    std::vector<Trade> trades;
    bool forced_close = false;
    std::vector<LinearPolicy> policies;  // in solve order: entry, exit, entry, ...
    std::vector<ProblemRecord> audit;

    // Throws InvalidArgument unless 0 <= entry < exit <= last_index and trades strictly interleave.
    void validate(Index last_index) const;
};

// Discounted payoffs on the segment's local clock (t measured from its first point).
Eigen::VectorXd entry_payoff(const Pathd& segment, const TradingCosts& costs, Side side);
Eigen::VectorXd exit_payoff(const Pathd& segment, const TradingCosts& costs, Side side);
Eigen::VectorXd problem_payoff(const Pathd& segment, const TradingCosts& costs, PayoffKind kind);

struct StopDecision {
    LinearPolicy policy;
    Index index = 0;  // relative to the window start
    double best_loss = 0.0;
};

// Empty result when the window is shorter than config.min_window.
std::optional<StopDecision> solve_stopping_problem(double anchor, const Pathd& window, PayoffKind kind,
                                                   const StrategyConfig& config, const TradingCosts& costs,
                                                   const SampleGenerator& sampler);

// `model` supplies the sampling law (OU parameters or bootstrap source); per-problem
// seeds are derived from config.seed.
TradeSchedule run_sequential(const Pathd& observed, const StrategyConfig& config, const TradingCosts& costs,
                             const std::variant<OUParams, BootstrapSource>& model);

// Raw per-trade PnL: side-signed price change minus both costs.
double trade_pnl(const Trade& trade, Side side, const TradingCosts& costs);

}  // namespace sigstop
