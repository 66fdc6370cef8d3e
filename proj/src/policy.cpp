#include "sigstop/policy.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sigstop/random.hpp"

namespace sigstop {

void LinearPolicy::validate() const {
    if (!(threshold > 0.0)) throw InvalidArgument("policy threshold must be positive");
    if (!(sharpness > 0.0)) throw InvalidArgument("policy sharpness must be positive");
    if (!coefficients.coefficients().allFinite()) throw InvalidArgument("policy coefficients must be finite");
    if (!(normalizer.scale > 0.0) || !std::isfinite(normalizer.mean))
        throw InvalidArgument("policy normalizer must have finite mean and positive scale");
}

void OptimizerConfig::validate() const {
    if (iterations < 1) throw InvalidArgument("optimizer iterations must be >= 1");
    if (!(step_size > 0.0)) throw InvalidArgument("optimizer step size must be positive");
    if (init_scale && !(*init_scale >= 0.0)) throw InvalidArgument("optimizer init scale must be >= 0");
    if (!(sharpness > 0.0)) throw InvalidArgument("sharpness must be positive");
    if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
}

SignatureStreamd observe(const Pathd& raw, const Normalizer& normalizer, int order) {
    Pathd standardized(raw.times(), normalizer.apply(raw.values()));
    return SignatureStreamd::from(augment(standardized), order);
}

TrainingSet::TrainingSet(std::vector<TrainingSample> samples, Normalizer normalizer)
    : samples_(std::move(samples)), normalizer_(normalizer) {
    if (samples_.empty()) throw InvalidArgument("training set is empty");
    const auto& first = samples_.front().prefixes;
    for (const auto& s : samples_) {
        if (s.prefixes.dimension() != first.dimension() || s.prefixes.order() != first.order() ||
            s.prefixes.steps() != first.steps())
            throw InvalidArgument("training samples must share (dimension, order, grid length)");
        if (s.payoff.size() != s.prefixes.steps() + 1)
            throw InvalidArgument("payoff length does not match the sample grid");
        if (!s.payoff.allFinite()) throw InvalidArgument("payoff contains non-finite values");
    }
}

namespace {

void check_shape(const DualVectord& l, const SignatureStreamd& prefixes) {
    if (l.dimension() != prefixes.dimension() || l.order() != prefixes.order())
        throw InvalidArgument("policy and signatures differ in (dimension, order)");
}

Index first_crossing(const Eigen::VectorXd& cumulative, double level) {
    for (Index j = 0; j < cumulative.size(); ++j)
        if (cumulative[j] >= level) return j;
    return cumulative.size() - 1;
}

struct SampleTerms {
    double payoff = 0.0;
    Eigen::VectorXd gradient;  // d payoff / d l, only when requested
};

// Smoothed expected payoff of one sample and optionally its gradient.
SampleTerms smoothed_terms(const Eigen::VectorXd& l, double threshold, double sharpness,
                           const SignatureStreamd& prefixes, const Eigen::VectorXd& payoff, bool with_gradient) {
    const Eigen::MatrixXd& rows = prefixes.rows();
    const Index n = prefixes.steps();
    const Eigen::VectorXd p = rows * l;

    SampleTerms out;
    out.payoff = payoff[0];
    Eigen::VectorXd weights(n);  // dG/dC_j * (Y_{j+1} - Y_j)
    double running = 0.0;
    for (Index j = 0; j < n; ++j) {
        running += p[j] * p[j];
        const double f = smoothed_cdf(running, threshold, sharpness);
        const double dy = payoff[j + 1] - payoff[j];
        out.payoff += (1.0 - f) * dy;
        weights[j] = -sharpness * f * (1.0 - f) * dy;
    }
    if (with_gradient) {
        // d C_j / d l = sum_{i<=j} 2 p_i S_i, so S_i collects the suffix sum of weights from i.
        Eigen::VectorXd coeff = Eigen::VectorXd::Zero(n + 1);
        double suffix = 0.0;
        for (Index i = n - 1; i >= 0; --i) {
            suffix += weights[i];
            coeff[i] = 2.0 * p[i] * suffix;
        }
        out.gradient = rows.transpose() * coeff;
    }
    return out;
}

double evaluate(const Eigen::VectorXd& l, double threshold, double sharpness, const TrainingSet& set,
                Eigen::VectorXd* gradient) {
    double total = 0.0;
    if (gradient) gradient->setZero(l.size());
    // Fixed sample order keeps the reduction deterministic.
    for (const auto& s : set.samples()) {
        auto terms = smoothed_terms(l, threshold, sharpness, s.prefixes, s.payoff, gradient != nullptr);
        total += terms.payoff;
        if (gradient) *gradient += terms.gradient;
    }
    const double m = static_cast<double>(set.size());
    if (gradient) *gradient /= -m;
    return -total / m;
}

void check_set(const LinearPolicy& policy, const TrainingSet& set) {
    policy.validate();
    if (policy.dimension() != set.dimension() || policy.order() != set.order())
        throw InvalidArgument("policy and training set differ in (dimension, order)");
}

}  // namespace

Eigen::VectorXd cumulative_scores(const DualVectord& coefficients, const SignatureStreamd& prefixes) {
    check_shape(coefficients, prefixes);
    const Eigen::VectorXd p = prefixes.rows() * coefficients.coefficients();
    Eigen::VectorXd c(p.size());
    double running = 0.0;
    for (Index j = 0; j < p.size(); ++j) {
        running += p[j] * p[j];
        c[j] = running;
    }
    return c;
}

Index stopping_index(const LinearPolicy& policy, const SignatureStreamd& prefixes) {
    return first_crossing(cumulative_scores(policy.coefficients, prefixes), policy.threshold);
}

Index randomized_stopping_index(const LinearPolicy& policy, const SignatureStreamd& prefixes, double z) {
    if (!(z > 0.0)) throw InvalidArgument("randomization level must be positive");
    return first_crossing(cumulative_scores(policy.coefficients, prefixes), z);
}

double smoothed_cdf(double x, double threshold, double sharpness) {
    const double z = sharpness * (x - threshold);
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double smoothed_expected_payoff(const LinearPolicy& policy, const SignatureStreamd& prefixes,
                                const Eigen::VectorXd& payoff) {
    check_shape(policy.coefficients, prefixes);
    if (payoff.size() != prefixes.steps() + 1) throw InvalidArgument("payoff length does not match the grid");
    return smoothed_terms(policy.coefficients.coefficients(), policy.threshold, policy.sharpness, prefixes, payoff,
                          false)
        .payoff;
}

double randomized_expected_payoff(const DualVectord& coefficients, const SignatureStreamd& prefixes,
                                  const Eigen::VectorXd& payoff, const RandomizationSource& source) {
    if (payoff.size() != prefixes.steps() + 1) throw InvalidArgument("payoff length does not match the grid");
    const Eigen::VectorXd c = cumulative_scores(coefficients, prefixes);
    double value = payoff[0];
    for (Index j = 0; j + 1 < payoff.size(); ++j) value += source.survival(c[j]) * (payoff[j + 1] - payoff[j]);
    return value;
}

double loss(const LinearPolicy& policy, const TrainingSet& set) {
    check_set(policy, set);
    return evaluate(policy.coefficients.coefficients(), policy.threshold, policy.sharpness, set, nullptr);
}

DualVectord loss_gradient(const LinearPolicy& policy, const TrainingSet& set) {
    check_set(policy, set);
    Eigen::VectorXd g;
    evaluate(policy.coefficients.coefficients(), policy.threshold, policy.sharpness, set, &g);
    return DualVectord(policy.dimension(), policy.order(), std::move(g));
}

TrainResult train(const TrainingSet& set, const OptimizerConfig& config) {
    config.validate();
    const Index length = graded_length(set.dimension(), set.order());
    const double init_scale = config.init_scale.value_or(0.1 / static_cast<double>(length));

    auto rng = substream(config.seed, streams::kPolicyInit);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd l(length);
    for (Index i = 0; i < length; ++i) l[i] = init_scale * normal(rng);

    // Adam with the usual moment decay rates.
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(length);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(length);
    Eigen::VectorXd grad;

    TrainResult result{LinearPolicy{DualVectord(set.dimension(), set.order(), l), config.threshold,
                                    config.sharpness, set.normalizer()},
                       std::numeric_limits<double>::infinity(), 0.0, {}};
    result.loss_history.reserve(static_cast<std::size_t>(config.iterations) + 1);

    double b1 = 1.0;
    double b2 = 1.0;
    for (int it = 0; it <= config.iterations; ++it) {
        const bool last = it == config.iterations;
        const double value = evaluate(l, config.threshold, config.sharpness, set, last ? nullptr : &grad);
        if (!std::isfinite(value) || (!last && !grad.allFinite())) throw TrainingDiverged(it);
        result.loss_history.push_back(value);
        if (value < result.best_loss) {
            result.best_loss = value;
            result.policy.coefficients.coefficients() = l;
        }
        if (last) {
            result.final_loss = value;
            break;
        }
        b1 *= beta1;
        b2 *= beta2;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
        const Eigen::VectorXd m_hat = m / (1.0 - b1);
        const Eigen::VectorXd v_hat = v / (1.0 - b2);
        l -= config.step_size * (m_hat.array() / (v_hat.array().sqrt() + eps)).matrix();
    }
    return result;
}

}  // namespace sigstop
