#pragma once

// End-to-end recipes shared by the command line tool and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sigstop/backtest.hpp"
#include "sigstop/engine.hpp"
#include "sigstop/models.hpp"
#include "sigstop/policy.hpp"

namespace sigstop {

// ---- single-stop OU experiment ------------------------------------------------

struct OUExperimentRow {
    OUParams params;
    double x0 = 0.0;
};

struct OUExperimentConfig {
    TimeGrid grid{100, 1.0};
    int order = 3;
    Index train_samples = 100;
    Index test_samples = 10;
    int seeds = 10;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;  // threshold / sharpness live here

    void validate() const;
};

struct OUExperimentResult {
    OUExperimentRow row;
    std::vector<double> per_seed;  // mean stopped value on the test samples, one per seed
    double mean = 0.0;
    double baseline_first = 0.0;  // mean of X at index 0 over all test samples
    double baseline_last = 0.0;   // mean of X at index n
};

// Trains on simulated OU paths with payoff Y = X and reports the mean value of
// held-out paths at the hard stopping index. Seeds are shared across rows.
OUExperimentResult run_ou_experiment(const OUExperimentRow& row, const OUExperimentConfig& config);

// The two parameter sweeps: long-run mean {1,5,10,15,20} at vol 1, and vol
// {0.1,0.5,1,1.5,2} at mean 10; speed 10 and x0 equal to the mean throughout.
std::vector<OUExperimentRow> table1_rows();

// ---- pair trading ---------------------------------------------------------------

struct PairManifest {
    std::filesystem::path file_a;
    std::filesystem::path file_b;
    std::string symbol_a;
    std::string symbol_b;
    Index formation_length = 252;
    double dt = 1.0 / 252.0;
};

// {"config_version":1,"a":"A.csv","b":"B.csv","formation_length":252}; file paths
// are relative to the manifest's directory.
PairManifest load_manifest(const std::filesystem::path& file);

struct PairData {
    AlignedPrices prices;
    Index formation_length = 0;
};

PairData load_pair(const PairManifest& manifest);

struct TradeRun {
    SpreadSpec spec;
    std::vector<Date> dates;  // trading window
    Pathd spread;             // trading window, clock in years from the first trading day
    Eigen::VectorXd full_spread;  // formation + trading, same hedge ratio
    TradeSchedule schedule;
    bool degenerate = false;
    std::string note;
};

TradeRun run_trade(const PairManifest& manifest, const StrategyConfig& config, const TradingCosts& costs);

// Baseline on the trading window with look-back reaching into the formation window.
TradeSchedule run_baseline(const TradeRun& run, const BaselineConfig& config);

}  // namespace sigstop
