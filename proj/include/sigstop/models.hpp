#pragma once

// Mean-reversion models and sample generation: exact OU simulation, AR(1)
// maximum-likelihood fitting, likelihood-driven spread construction and
// block bootstrap of increments.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "sigstop/policy.hpp"
#include "sigstop/signature.hpp"

namespace sigstop {

struct OUParams {
    double mean_level = 0.0;
    double speed = 1.0;
    double vol = 0.0;

    void validate() const;
};

// n + 1 equidistant points over [start, start + horizon].
struct TimeGrid {
    Index steps = 1;
    double horizon = 1.0;

    double dt() const { return horizon / static_cast<double>(steps); }
    Eigen::VectorXd times(double start = 0.0) const;
    void validate() const;
};

// Exact Gaussian transition; sample `stream` of the batch identified by `seed`.
Pathd simulate_ou(const OUParams& params, double x0, const TimeGrid& grid, std::uint64_t seed,
                  std::uint64_t stream = 0);

struct OUFit {
    OUParams params;
    double ar_coefficient = 0.0;
    double log_likelihood = 0.0;
};

OUFit fit_ou_mle(const Eigen::VectorXd& values, double dt);

struct SpreadSpec {
    std::string symbol_a;
    std::string symbol_b;
    double hedge_ratio = 0.0;
    OUParams fitted;
    double log_likelihood = 0.0;
};

struct Spread {
    SpreadSpec spec;
    Pathd path;
};

// OLS ratio of normalized A on normalized B plus 101 points spanning +-3 around it.
std::vector<double> default_beta_grid(const Eigen::VectorXd& prices_a, const Eigen::VectorXd& prices_b);

// Spread A/A_0 - beta * B/B_0 with beta chosen from the grid by OU log-likelihood.
Spread construct_spread(const Eigen::VectorXd& prices_a, const Eigen::VectorXd& prices_b,
                        const std::vector<double>& beta_grid, double dt, std::string symbol_a = "A",
                        std::string symbol_b = "B");

struct BootstrapConfig {
    Index block_length = 5;
    Index sample_count = 1;
    std::uint64_t seed = 0;
};

inline Index default_block_length(Index steps) { return std::max<Index>(5, steps / 10); }

// Paths on `grid` anchored at x0 built from resampled blocks of the source's increments.
std::vector<Pathd> block_bootstrap(const Eigen::VectorXd& source, const BootstrapConfig& config,
                                   const TimeGrid& grid, double x0);

struct BootstrapSource {
    Eigen::VectorXd values;
    Index block_length = 5;
};

struct SampleGenerator {
    std::variant<OUParams, BootstrapSource> model;
    std::uint64_t seed = 0;
};

std::vector<Pathd> generate_paths(const SampleGenerator& generator, double x0, const TimeGrid& grid, Index count);

// Payoff process evaluated on a raw sample path (local clock starting at 0).
using PayoffFn = std::function<Eigen::VectorXd(const Pathd&)>;

Eigen::VectorXd identity_payoff(const Pathd& path);

// Mean/std of all values across the paths; scale falls back to 1 for constant data.
Normalizer fit_normalizer(const std::vector<Pathd>& paths);

TrainingSet make_training_set(const std::vector<Pathd>& paths, const PayoffFn& payoff, int order);

TrainingSet generate_training_set(const SampleGenerator& generator, double x0, const TimeGrid& grid, Index count,
                                  const PayoffFn& payoff, int order);

}  // namespace sigstop
