#pragma once

// Small builders shared by the unit tests and the acceptance runner.

#include <random>

#include "sigstop/models.hpp"
#include "sigstop/policy.hpp"

namespace fixtures {

using namespace sigstop;

inline TrainingSet ou_set(std::uint64_t seed, Index samples, Index steps, int order,
                          OUParams params = OUParams{10.0, 10.0, 1.0}) {
    return generate_training_set(SampleGenerator{params, seed}, params.mean_level, TimeGrid{steps, 1.0}, samples,
                                 identity_payoff, order);
}

inline LinearPolicy random_policy(const TrainingSet& set, std::mt19937_64& rng, double scale, double threshold = 0.05,
                                  double sharpness = 20.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd c(graded_length(set.dimension(), set.order()));
    for (Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
    return LinearPolicy{DualVectord(set.dimension(), set.order(), c), threshold, sharpness, set.normalizer()};
}

inline LinearPolicy with_coefficients(const LinearPolicy& base, const Eigen::VectorXd& c) {
    LinearPolicy p = base;
    p.coefficients = DualVectord(base.dimension(), base.order(), c);
    return p;
}

}  // namespace fixtures
