#include "sigstop/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sigstop/errors.hpp"
#include "sigstop/random.hpp"

namespace sigstop {

void OUParams::validate() const {
    if (!(speed > 0.0) || !std::isfinite(speed)) throw InvalidArgument("OU speed must be positive");
    if (!(vol >= 0.0) || !std::isfinite(vol)) throw InvalidArgument("OU vol must be non-negative");
    if (!std::isfinite(mean_level)) throw InvalidArgument("OU mean level must be finite");
}

void TimeGrid::validate() const {
    if (steps < 1) throw InvalidArgument("time grid needs at least one step");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("time grid horizon must be positive");
}

Eigen::VectorXd TimeGrid::times(double start) const {
    Eigen::VectorXd t(steps + 1);
    for (Index j = 0; j <= steps; ++j) t[j] = start + horizon * static_cast<double>(j) / static_cast<double>(steps);
    return t;
}

Pathd simulate_ou(const OUParams& params, double x0, const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) {
    params.validate();
    grid.validate();
    const double dt = grid.dt();
    const double decay = std::exp(-params.speed * dt);
    const double step_sd = params.vol * std::sqrt(-std::expm1(-2.0 * params.speed * dt) / (2.0 * params.speed));

    auto rng = substream(seed, stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(grid.steps + 1);
    x[0] = x0;
    for (Index j = 0; j < grid.steps; ++j) {
        const double xi = normal(rng);
        x[j + 1] = params.mean_level + (x[j] - params.mean_level) * decay + step_sd * xi;
    }
    return Pathd::scalar(grid.times(), x);
}

OUFit fit_ou_mle(const Eigen::VectorXd& values, double dt) {
    if (values.size() < 3) throw InvalidArgument("OU fit needs at least 3 observations");
    if (!(dt > 0.0)) throw InvalidArgument("OU fit needs a positive time step");
    if (!values.allFinite()) throw InvalidArgument("OU fit input contains non-finite values");

    const Index n = values.size() - 1;
    const auto x = values.head(n).array();
    const auto y = values.tail(n).array();
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x - mx).square().sum();
    const double sxy = ((x - mx) * (y - my)).sum();
    if (!(sxx > 0.0)) throw FitDegenerate("OU fit: path has zero variance");

    // Exact OU transition is a Gaussian AR(1): y = a x + b + eps, eps ~ N(0, s2).
    const double a = sxy / sxx;
    const double b = my - a * mx;
    const double s2 = ((y - a * x - b).square()).sum() / static_cast<double>(n);
    if (a >= 1.0) throw NonMeanReverting("OU fit: AR coefficient " + std::to_string(a) + " >= 1");
    if (!(a > 0.0)) throw FitDegenerate("OU fit: AR coefficient " + std::to_string(a) + " <= 0");
    if (!(s2 > 0.0)) throw FitDegenerate("OU fit: zero residual variance");

    OUFit fit;
    fit.ar_coefficient = a;
    fit.params.speed = -std::log(a) / dt;
    fit.params.mean_level = b / (1.0 - a);
    fit.params.vol = std::sqrt(s2 * 2.0 * fit.params.speed / (1.0 - a * a));
    fit.log_likelihood = -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
    return fit;
}

namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& prices, const char* name) {
    if ((prices.array() <= 0.0).any() || !prices.allFinite())
        throw InvalidArgument(std::string("spread: ") + name + " prices must be positive and finite");
    return prices / prices[0];
}

}  // namespace

std::vector<double> default_beta_grid(const Eigen::VectorXd& prices_a, const Eigen::VectorXd& prices_b) {
    if (prices_a.size() != prices_b.size() || prices_a.size() < 2)
        throw InvalidArgument("beta grid: price series must be aligned with >= 2 points");
    const Eigen::VectorXd a = normalized(prices_a, "A");
    const Eigen::VectorXd b = normalized(prices_b, "B");
    const double ma = a.mean();
    const double mb = b.mean();
    const double sbb = (b.array() - mb).square().sum();
    const double ols = sbb > 0.0 ? ((a.array() - ma) * (b.array() - mb)).sum() / sbb : 1.0;
    std::vector<double> grid;
    grid.reserve(101);
    for (int i = 0; i <= 100; ++i) grid.push_back(ols + (-300.0 + 6.0 * i) / 100.0);
    return grid;
}

Spread construct_spread(const Eigen::VectorXd& prices_a, const Eigen::VectorXd& prices_b,
                        const std::vector<double>& beta_grid, double dt, std::string symbol_a, std::string symbol_b) {
    if (prices_a.size() != prices_b.size()) throw InvalidArgument("spread: price series are not aligned");
    if (prices_a.size() < 3) throw InvalidArgument("spread: need at least 3 aligned prices");
    if (beta_grid.empty()) throw InvalidArgument("spread: beta grid is empty");

    const Eigen::VectorXd a = normalized(prices_a, "A");
    const Eigen::VectorXd b = normalized(prices_b, "B");

    bool found = false;
    double best_beta = 0.0;
    OUFit best;
    for (double beta : beta_grid) {
        if (!std::isfinite(beta)) throw InvalidArgument("spread: non-finite beta candidate");
        OUFit fit;
        try {
            fit = fit_ou_mle(a - beta * b, dt);
        } catch (const FitDegenerate&) {
            continue;
        } catch (const NonMeanReverting&) {
            continue;
        }
        const double tol = 1e-9 * std::max(1.0, std::abs(fit.log_likelihood));
        const bool better = !found || fit.log_likelihood > best.log_likelihood + tol ||
                            (std::abs(fit.log_likelihood - best.log_likelihood) <= tol &&
                             std::abs(beta) < std::abs(best_beta));
        if (better) {
            found = true;
            best_beta = beta;
            best = fit;
        }
    }
    if (!found) throw ConstructionFailed("spread: every hedge-ratio candidate gave a degenerate or non-mean-reverting fit");

    Eigen::VectorXd times(a.size());
    for (Index j = 0; j < a.size(); ++j) times[j] = dt * static_cast<double>(j);
    return Spread{SpreadSpec{std::move(symbol_a), std::move(symbol_b), best_beta, best.params, best.log_likelihood},
                  Pathd::scalar(times, a - best_beta * b)};
}

std::vector<Pathd> block_bootstrap(const Eigen::VectorXd& source, const BootstrapConfig& config, const TimeGrid& grid,
                                   double x0) {
    grid.validate();
    if (grid.steps + 1 < 2) throw InvalidArgument("bootstrap horizon must have at least 2 points");
    if (source.size() < 2) throw InvalidArgument("bootstrap source needs at least 2 points");
    if (config.block_length < 1 || config.block_length > source.size())
        throw InvalidArgument("bootstrap block length must lie in [1, source length]");
    if (config.sample_count < 1) throw InvalidArgument("bootstrap sample count must be >= 1");

    const Eigen::VectorXd diffs = source.tail(source.size() - 1) - source.head(source.size() - 1);
    const Index block = std::min<Index>(config.block_length, diffs.size());
    const Index starts = diffs.size() - block + 1;
    const Eigen::VectorXd times = grid.times();

    std::vector<Pathd> out;
    out.reserve(static_cast<std::size_t>(config.sample_count));
    for (Index m = 0; m < config.sample_count; ++m) {
        auto rng = substream(config.seed, streams::kBootstrap + static_cast<std::uint64_t>(m));
        std::uniform_int_distribution<Index> pick(0, starts - 1);
        Eigen::VectorXd x(grid.steps + 1);
        x[0] = x0;
        Index j = 0;
        while (j < grid.steps) {
            const Index start = pick(rng);
            for (Index k = 0; k < block && j < grid.steps; ++k, ++j) x[j + 1] = x[j] + diffs[start + k];
        }
        out.push_back(Pathd::scalar(times, x));
    }
    return out;
}

std::vector<Pathd> generate_paths(const SampleGenerator& generator, double x0, const TimeGrid& grid, Index count) {
    if (count < 1) throw InvalidArgument("sample count must be >= 1");
    if (const auto* ou = std::get_if<OUParams>(&generator.model)) {
        std::vector<Pathd> out;
        out.reserve(static_cast<std::size_t>(count));
        for (Index m = 0; m < count; ++m)
            out.push_back(simulate_ou(*ou, x0, grid, generator.seed, static_cast<std::uint64_t>(m)));
        return out;
    }
    const auto& boot = std::get<BootstrapSource>(generator.model);
    return block_bootstrap(boot.values, BootstrapConfig{boot.block_length, count, generator.seed}, grid, x0);
}

Eigen::VectorXd identity_payoff(const Pathd& path) { return path.values().col(0); }

Normalizer fit_normalizer(const std::vector<Pathd>& paths) {
    if (paths.empty()) throw InvalidArgument("normalizer needs at least one path");
    double sum = 0.0;
    double count = 0.0;
    for (const auto& p : paths) {
        sum += p.values().sum();
        count += static_cast<double>(p.values().size());
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& p : paths) ss += (p.values().array() - mean).square().sum();
    const double sd = std::sqrt(ss / count);
    return Normalizer{mean, sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0};
}

TrainingSet make_training_set(const std::vector<Pathd>& paths, const PayoffFn& payoff, int order) {
    if (paths.empty()) throw InvalidArgument("training set needs at least one path");
    const Normalizer normalizer = fit_normalizer(paths);
    std::vector<TrainingSample> samples;
    samples.reserve(paths.size());
    for (const auto& p : paths) {
        // Payoffs see raw values on a clock starting at zero.
        Pathd local(p.times().array() - p.times()[0], p.values());
        samples.push_back(TrainingSample{observe(p, normalizer, order), payoff(local)});
    }
    return TrainingSet(std::move(samples), normalizer);
}

TrainingSet generate_training_set(const SampleGenerator& generator, double x0, const TimeGrid& grid, Index count,
                                  const PayoffFn& payoff, int order) {
    return make_training_set(generate_paths(generator, x0, grid, count), payoff, order);
}

}  // namespace sigstop
