#pragma once

// Linear signature stopping policies.
//
// A policy l stops a discretized path at the first grid index j where the
// running sum sum_{i<=j} <l, S_{0,t_i}>^2 reaches the threshold k. Training
// replaces the hard indicator of that rule with a sigmoid of sharpness mu and
// maximizes the resulting expected payoff over sampled paths.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sigstop/signature.hpp"

namespace sigstop {

// Affine standardization applied to raw path values before augmentation.
struct Normalizer {
    double mean = 0.0;
    double scale = 1.0;

    Eigen::VectorXd apply(const Eigen::VectorXd& raw) const { return (raw.array() - mean) / scale; }
    Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const { return (raw.array() - mean) / scale; }
};

struct LinearPolicy {
    DualVectord coefficients;
    double threshold = 0.05;
    double sharpness = 20.0;
    Normalizer normalizer;

    Index dimension() const { return coefficients.dimension(); }
    int order() const { return coefficients.order(); }
    void validate() const;
};

// Standardize -> augment (time on [0,1]) -> prefix signatures, exactly as the
// training pipeline does for sampled paths.
SignatureStreamd observe(const Pathd& raw, const Normalizer& normalizer, int order);
inline SignatureStreamd observe(const LinearPolicy& policy, const Pathd& raw) {
    return observe(raw, policy.normalizer, policy.order());
}

struct TrainingSample {
    SignatureStreamd prefixes;
    Eigen::VectorXd payoff;  // Y_0..Y_n on raw values
};

class TrainingSet {
public:
    TrainingSet(std::vector<TrainingSample> samples, Normalizer normalizer);

    Index dimension() const { return samples_.front().prefixes.dimension(); }
    int order() const { return samples_.front().prefixes.order(); }
    Index steps() const { return samples_.front().prefixes.steps(); }
    Index size() const { return static_cast<Index>(samples_.size()); }
    const std::vector<TrainingSample>& samples() const { return samples_; }
    const Normalizer& normalizer() const { return normalizer_; }

private:
    std::vector<TrainingSample> samples_;
    Normalizer normalizer_;
};

struct OptimizerConfig {
    int iterations = 200;
    double step_size = 0.01;
    // Standard deviation of the initial coefficients; unset means 0.1 / graded length.
    std::optional<double> init_scale;
    std::uint64_t seed = 0;
    double sharpness = 20.0;
    double threshold = 0.05;

    void validate() const;
};

struct TrainResult {
    LinearPolicy policy;     // lowest-loss iterate
    double best_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> loss_history;  // one entry per evaluated iterate
};

// Law of the randomization level Z. Only the unit-rate exponential is provided.
struct RandomizationSource {
    double rate = 1.0;
    std::uint64_t seed = 0;

    double cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }
    double survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-rate * x); }
    template <typename Rng>
    double draw(Rng& rng) const {
        std::exponential_distribution<double> dist(rate);
        double z = 0.0;
        while (z <= 0.0) z = dist(rng);
        return z;
    }
};

// Running sums C_j = sum_{i<=j} <l, S_i>^2 for j = 0..n.
Eigen::VectorXd cumulative_scores(const DualVectord& coefficients, const SignatureStreamd& prefixes);

Index stopping_index(const LinearPolicy& policy, const SignatureStreamd& prefixes);
Index randomized_stopping_index(const LinearPolicy& policy, const SignatureStreamd& prefixes, double z);

double smoothed_cdf(double x, double threshold, double sharpness);

double smoothed_expected_payoff(const LinearPolicy& policy, const SignatureStreamd& prefixes,
                                const Eigen::VectorXd& payoff);

// Y_0 + sum_j G_Z(C_j)(Y_{j+1} - Y_j) for the randomized rule with Z ~ source.
double randomized_expected_payoff(const DualVectord& coefficients, const SignatureStreamd& prefixes,
                                  const Eigen::VectorXd& payoff, const RandomizationSource& source);

double loss(const LinearPolicy& policy, const TrainingSet& set);
DualVectord loss_gradient(const LinearPolicy& policy, const TrainingSet& set);

TrainResult train(const TrainingSet& set, const OptimizerConfig& config);

}  // namespace sigstop
