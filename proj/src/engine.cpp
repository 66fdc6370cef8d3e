#include "sigstop/engine.hpp"

#include <algorithm>
#include <cmath>

#include "sigstop/errors.hpp"
#include "sigstop/random.hpp"

namespace sigstop {

std::string to_string(Side side) { return side == Side::Long ? "long" : "short"; }

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::LongEntry: return "long_entry";
        case PayoffKind::LongExit: return "long_exit";
        case PayoffKind::ShortEntry: return "short_entry";
        case PayoffKind::ShortExit: return "short_exit";
    }
    return "unknown";
}

std::string to_string(GeneratorKind kind) { return kind == GeneratorKind::OuFit ? "ou-fit" : "bootstrap"; }

Side parse_side(const std::string& text) {
    if (text == "long") return Side::Long;
    if (text == "short") return Side::Short;
    throw InvalidArgument("unknown side '" + text + "' (expected long or short)");
}

GeneratorKind parse_generator(const std::string& text) {
    if (text == "ou-fit") return GeneratorKind::OuFit;
    if (text == "bootstrap") return GeneratorKind::Bootstrap;
    throw InvalidArgument("unknown generator '" + text + "' (expected ou-fit or bootstrap)");
}

void TradingCosts::validate() const {
    for (double v : {entry_cost, exit_cost, entry_discount, exit_discount})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("trading costs and discount rates must be finite and >= 0");
}

void StrategyConfig::validate() const {
    if (order < 1 || order > 6) throw InvalidArgument("signature order must lie in 1..6");
    if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
    if (!(sharpness > 0.0)) throw InvalidArgument("sharpness must be positive");
    if (sample_count < 1) throw InvalidArgument("sample count must be >= 1");
    if (min_window < 2) throw InvalidArgument("min_window must be >= 2");
    if (block_length < 0) throw InvalidArgument("block length must be >= 0");
    optimizer.validate();
}

void TradeSchedule::validate(Index last_index) const {
    Index previous_exit = -1;
    for (const auto& t : trades) {
        if (t.entry_index < 0 || t.exit_index > last_index || !(t.entry_index < t.exit_index))
            throw InvalidArgument("trade indices out of range or not ordered");
        if (!(t.entry_index > previous_exit)) throw InvalidArgument("trades overlap");
        previous_exit = t.exit_index;
    }
}

namespace {

Eigen::VectorXd discounted(const Pathd& segment, double rate, double sign, double cost) {
    const Eigen::VectorXd& t = segment.times();
    const auto x = segment.values().col(0).array();
    return ((-rate * (t.array() - t[0])).exp() * (sign * x - cost)).matrix();
}

}  // namespace

Eigen::VectorXd entry_payoff(const Pathd& segment, const TradingCosts& costs, Side side) {
    // Long entry pays X + c; short entry receives X - c.
    return discounted(segment, costs.entry_discount, side == Side::Long ? -1.0 : 1.0, costs.entry_cost);
}

Eigen::VectorXd exit_payoff(const Pathd& segment, const TradingCosts& costs, Side side) {
    return discounted(segment, costs.exit_discount, side == Side::Long ? 1.0 : -1.0, costs.exit_cost);
}

Eigen::VectorXd problem_payoff(const Pathd& segment, const TradingCosts& costs, PayoffKind kind) {
    switch (kind) {
        case PayoffKind::LongEntry: return entry_payoff(segment, costs, Side::Long);
        case PayoffKind::LongExit: return exit_payoff(segment, costs, Side::Long);
        case PayoffKind::ShortEntry: return entry_payoff(segment, costs, Side::Short);
        case PayoffKind::ShortExit: return exit_payoff(segment, costs, Side::Short);
    }
    throw InvalidArgument("unknown payoff kind");
}

std::optional<StopDecision> solve_stopping_problem(double anchor, const Pathd& window, PayoffKind kind,
                                                   const StrategyConfig& config, const TradingCosts& costs,
                                                   const SampleGenerator& sampler) {
    config.validate();
    if (window.size() < config.min_window) return std::nullopt;
    if (window.dimension() != 1) throw InvalidArgument("stopping problems are defined on 1-D paths");

    const TimeGrid grid{window.size() - 1, window.times()[window.size() - 1] - window.times()[0]};
    const auto payoff = [&costs, kind](const Pathd& p) { return problem_payoff(p, costs, kind); };
    const TrainingSet set =
        generate_training_set(sampler, anchor, grid, config.sample_count, payoff, config.order);

    OptimizerConfig opt = config.optimizer;
    opt.threshold = config.threshold;
    opt.sharpness = config.sharpness;
    TrainResult trained = train(set, opt);

    const Index index = stopping_index(trained.policy, observe(trained.policy, window));
    return StopDecision{std::move(trained.policy), index, trained.best_loss};
}

TradeSchedule run_sequential(const Pathd& observed, const StrategyConfig& config, const TradingCosts& costs,
                             const std::variant<OUParams, BootstrapSource>& model) {
    config.validate();
    costs.validate();
    if (observed.dimension() != 1) throw InvalidArgument("sequential trading needs a 1-D path");
    if (observed.size() < config.min_window) throw InvalidArgument("observed path is shorter than min_window");

    const Index last = observed.size() - 1;
    const auto& x = observed.values();
    const PayoffKind open_kind = config.side == Side::Long ? PayoffKind::LongEntry : PayoffKind::ShortEntry;
    const PayoffKind close_kind = config.side == Side::Long ? PayoffKind::LongExit : PayoffKind::ShortExit;

    TradeSchedule schedule;
    schedule.side = config.side;

    std::uint64_t problem = 0;
    auto solve = [&](Index start, PayoffKind kind) -> std::optional<StopDecision> {
        auto rng = substream(config.seed, problem++);
        StrategyConfig sub = config;
        sub.optimizer.seed = rng();
        SampleGenerator sampler{model, rng()};
        const double anchor = x(start, 0);
        auto decision = solve_stopping_problem(anchor, observed.slice(start, last), kind, sub, costs, sampler);
        if (decision) {
            schedule.audit.push_back(
                ProblemRecord{kind, start, last - start + 1, anchor, decision->index, decision->best_loss});
            schedule.policies.push_back(decision->policy);
        }
        return decision;
    };

    Index position = 0;
    bool first = true;
    while (true) {
        auto open = solve(position, open_kind);
        if (!open) break;
        // A follow-up action cannot share the grid point of the previous one.
        const Index entry = position + (first ? open->index : std::max<Index>(open->index, 1));
        if (entry >= last) break;

        Trade trade{entry, last, x(entry, 0), x(last, 0)};
        auto close = solve(entry, close_kind);
        if (close) trade.exit_index = entry + std::max<Index>(close->index, 1);
        trade.exit_value = x(trade.exit_index, 0);
        schedule.trades.push_back(trade);
        if (trade.exit_index == last) {
            schedule.forced_close = true;
            break;
        }
        position = trade.exit_index;
        first = false;
    }
    schedule.validate(last);
    return schedule;
}

double trade_pnl(const Trade& trade, Side side, const TradingCosts& costs) {
    const double move = trade.exit_value - trade.entry_value;
    return (side == Side::Long ? move : -move) - costs.entry_cost - costs.exit_cost;
}

}  // namespace sigstop
