#include "sigstop/pipeline.hpp"

#include <fstream>

#include "sigstop/errors.hpp"
#include "sigstop/io.hpp"
#include "sigstop/random.hpp"

namespace sigstop {

void OUExperimentConfig::validate() const {
    grid.validate();
    if (order < 1 || order > 6) throw InvalidArgument("signature order must lie in 1..6");
    if (train_samples < 1 || test_samples < 1) throw InvalidArgument("sample counts must be >= 1");
    if (seeds < 1) throw InvalidArgument("seed count must be >= 1");
    optimizer.validate();
}

OUExperimentResult run_ou_experiment(const OUExperimentRow& row, const OUExperimentConfig& config) {
    config.validate();
    row.params.validate();
    OUExperimentResult result{row, {}, 0.0, 0.0, 0.0};
    double first = 0.0;
    double last = 0.0;
    for (int s = 0; s < config.seeds; ++s) {
        auto rng = substream(config.seed, static_cast<std::uint64_t>(s));
        const SampleGenerator train_gen{row.params, rng()};
        const SampleGenerator test_gen{row.params, rng()};
        OptimizerConfig opt = config.optimizer;
        opt.seed = rng();

        const TrainingSet set =
            generate_training_set(train_gen, row.x0, config.grid, config.train_samples, identity_payoff, config.order);
        const LinearPolicy policy = train(set, opt).policy;

        double total = 0.0;
        for (const auto& path : generate_paths(test_gen, row.x0, config.grid, config.test_samples)) {
            const Index j = stopping_index(policy, observe(policy, path));
            total += path.values()(j, 0);
            first += path.values()(0, 0);
            last += path.values()(path.size() - 1, 0);
        }
        result.per_seed.push_back(total / static_cast<double>(config.test_samples));
    }
    double sum = 0.0;
    for (double v : result.per_seed) sum += v;
    const double draws = static_cast<double>(config.seeds * config.test_samples);
    result.mean = sum / static_cast<double>(config.seeds);
    result.baseline_first = first / draws;
    result.baseline_last = last / draws;
    return result;
}

std::vector<OUExperimentRow> table1_rows() {
    std::vector<OUExperimentRow> rows;
    for (double mean : {1.0, 5.0, 10.0, 15.0, 20.0}) rows.push_back({OUParams{mean, 10.0, 1.0}, mean});
    for (double vol : {0.1, 0.5, 1.0, 1.5, 2.0}) rows.push_back({OUParams{10.0, 10.0, vol}, 10.0});
    return rows;
}

PairManifest load_manifest(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open manifest " + file.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("manifest " + file.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("a") || !j.contains("b"))
        throw ValidationError("manifest " + file.string() + " must name price files 'a' and 'b'");
    if (j.value("config_version", 1) != 1) throw ValidationError("unsupported manifest config_version");
    const auto base = file.parent_path();
    PairManifest m;
    m.file_a = base / j.at("a").get<std::string>();
    m.file_b = base / j.at("b").get<std::string>();
    m.symbol_a = j.value("symbol_a", m.file_a.stem().string());
    m.symbol_b = j.value("symbol_b", m.file_b.stem().string());
    m.formation_length = j.value("formation_length", Index{252});
    m.dt = j.value("dt", 1.0 / 252.0);
    for (const auto& f : {m.file_a, m.file_b})
        if (!std::filesystem::exists(f)) throw ValidationError("manifest references missing file " + f.string());
    if (m.formation_length < 3) throw ValidationError("formation_length must be >= 3");
    if (!(m.dt > 0.0)) throw ValidationError("manifest dt must be positive");
    return m;
}

PairData load_pair(const PairManifest& manifest) {
    const PriceSeries a = load_prices(manifest.file_a, manifest.symbol_a);
    const PriceSeries b = load_prices(manifest.file_b, manifest.symbol_b);
    PairData data{align(a, b), manifest.formation_length};
    const Index total = static_cast<Index>(data.prices.dates.size());
    if (total - manifest.formation_length < 2)
        throw ValidationError("trading window is empty: " + std::to_string(total) + " aligned dates, formation uses " +
                              std::to_string(manifest.formation_length));
    return data;
}

TradeRun run_trade(const PairManifest& manifest, const StrategyConfig& config, const TradingCosts& costs) {
    config.validate();
    costs.validate();
    const PairData data = load_pair(manifest);
    const Index formation = data.formation_length;
    const Index total = static_cast<Index>(data.prices.dates.size());
    const Index trading = total - formation;

    const Eigen::VectorXd a = data.prices.a / data.prices.a[0];
    const Eigen::VectorXd b = data.prices.b / data.prices.b[0];

    std::vector<Date> dates(data.prices.dates.begin() + formation, data.prices.dates.end());
    Eigen::VectorXd times(trading);
    for (Index j = 0; j < trading; ++j) times[j] = manifest.dt * static_cast<double>(j);

    if ((a.head(formation) - b.head(formation)).cwiseAbs().maxCoeff() <= 1e-12) {
        // Identical normalized legs hedge perfectly: the spread is constant and nothing is traded.
        const Eigen::VectorXd full = a - b;
        TradeSchedule empty;
        empty.side = config.side;
        return TradeRun{SpreadSpec{manifest.symbol_a, manifest.symbol_b, 1.0, OUParams{0.0, 1.0, 0.0}, 0.0},
                        std::move(dates),
                        Pathd::scalar(times, full.tail(trading)),
                        full,
                        std::move(empty),
                        true,
                        "identical normalized price series; constant spread, no trades"};
    }

    const Eigen::VectorXd fa = data.prices.a.head(formation);
    const Eigen::VectorXd fb = data.prices.b.head(formation);
    const Spread spread = construct_spread(fa, fb, default_beta_grid(fa, fb), manifest.dt, manifest.symbol_a,
                                           manifest.symbol_b);
    const Eigen::VectorXd full = a - spread.spec.hedge_ratio * b;
    Pathd observed = Pathd::scalar(times, full.tail(trading));

    std::variant<OUParams, BootstrapSource> model;
    if (config.generator == GeneratorKind::OuFit) {
        model = spread.spec.fitted;
    } else {
        const Index block = config.block_length > 0 ? config.block_length : default_block_length(formation - 1);
        model = BootstrapSource{full.head(formation), std::min(block, formation)};
    }
    if (trading < config.min_window) throw ValidationError("trading window is shorter than min_window");
    TradeSchedule schedule = run_sequential(observed, config, costs, model);
    return TradeRun{spread.spec, std::move(dates), std::move(observed), full, std::move(schedule), false, ""};
}

TradeSchedule run_baseline(const TradeRun& run, const BaselineConfig& config) {
    config.validate();
    const Index trading = run.spread.size();
    const Index formation = run.full_spread.size() - trading;
    if (formation < config.window)
        throw ValidationError("formation window (" + std::to_string(formation) + ") is shorter than the baseline window");
    const Eigen::VectorXd tail = run.full_spread.tail(trading + config.window);
    TradeSchedule schedule = baseline_strategy(tail, config);
    for (auto& t : schedule.trades) {
        t.entry_index -= config.window;
        t.exit_index -= config.window;
    }
    return schedule;
}

}  // namespace sigstop
