#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "sigstop/errors.hpp"
#include "sigstop/signature.hpp"

using namespace sigstop;
using Vec = Eigen::VectorXd;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

AugmentedPathd points_path(const std::vector<std::vector<double>>& pts) {
    const Index n = static_cast<Index>(pts.size());
    const Index d = static_cast<Index>(pts.front().size());
    Eigen::MatrixXd values(n, d);
    Vec times(n);
    for (Index j = 0; j < n; ++j) {
        times[j] = static_cast<double>(j);
        for (Index i = 0; i < d; ++i) values(j, i) = pts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    return AugmentedPathd(Pathd(times, values));
}

std::vector<std::vector<oracle::Real>> as_real(const AugmentedPathd& p) {
    std::vector<std::vector<oracle::Real>> out;
    for (Index j = 0; j < p.size(); ++j) {
        std::vector<oracle::Real> row;
        for (Index i = 0; i < p.dimension(); ++i) row.push_back(p.inner().values()(j, i));
        out.push_back(row);
    }
    return out;
}

double max_diff(const Signatured& s, const oracle::Levels& ref) {
    double worst = 0.0;
    for (int n = 0; n <= s.order(); ++n) {
        const auto lvl = s.level(n);
        for (Index w = 0; w < lvl.size(); ++w)
            worst = std::max(worst, static_cast<double>(std::fabs(lvl[w] - ref[static_cast<std::size_t>(n)][static_cast<std::size_t>(w)])));
    }
    return worst;
}

AugmentedPathd random_walk(std::mt19937_64& rng, Index points, Index coords) {
    std::normal_distribution<double> step(0.0, 1.0);
    Vec t(points);
    Eigen::MatrixXd x(points, coords);
    for (Index j = 0; j < points; ++j) {
        t[j] = static_cast<double>(j) / static_cast<double>(points - 1);
        for (Index i = 0; i < coords; ++i) x(j, i) = j == 0 ? 0.0 : x(j - 1, i) + step(rng);
    }
    return augment(Pathd(t, x));
}

}  // namespace

TEST_CASE("layout helpers") {
    CHECK(level_size(3, 0) == 1);
    CHECK(level_size(3, 2) == 9);
    CHECK(level_offset(2, 2) == 3);
    CHECK(graded_length(2, 3) == 15);
    CHECK(graded_length(1, 4) == 5);
}

TEST_CASE("tensor product worked example") {
    const auto t = tensor_product<double>({vec({1, 2}), vec({3, 4}), vec({5, 6})});
    REQUIRE(t.shape == std::vector<Index>{2, 2, 2});
    const std::vector<double> expected{15, 18, 20, 24, 30, 36, 40, 48};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(t.data[static_cast<Index>(i)] == expected[i]);
    CHECK(t({1, 0, 1}) == 36);
}

TEST_CASE("tensor product basis and identity cases") {
    const auto e = tensor_product<double>(vec({1, 0}), vec({0, 1, 0}));
    REQUIRE(e.shape == std::vector<Index>{2, 3});
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) CHECK(e({i, j}) == (i == 0 && j == 1 ? 1.0 : 0.0));

    const auto u = tensor_product<double>(vec({2, -1, 4}), vec({1}));
    REQUIRE(u.shape == std::vector<Index>{3, 1});
    CHECK(u.data == vec({2, -1, 4}));

    CHECK_THROWS_AS(tensor_product<double>({}), InvalidArgument);
}

TEST_CASE("augmentation") {
    const Pathd p = Pathd::scalar(vec({0, 1}), vec({5, 6}));
    const auto raw = augment(p, false);
    CHECK(raw.inner().values()(0, 0) == 0.0);
    CHECK(raw.inner().values()(1, 0) == 1.0);
    CHECK(raw.inner().values()(1, 1) == 6.0);

    const auto scaled = augment(Pathd::scalar(vec({0, 5, 10}), vec({1, 1, 1})));
    CHECK(scaled.inner().values().col(0) == vec({0, 0.5, 1.0}));
    CHECK(scaled.inner().values().col(1) == vec({1, 1, 1}));

    CHECK_THROWS_AS(Pathd::scalar(vec({0}), vec({1})), InvalidArgument);
    CHECK_THROWS_AS(Pathd::scalar(vec({0, 0}), vec({1, 2})), InvalidArgument);
}

TEST_CASE("segment closed forms") {
    const auto s = segment_signature<double>(vec({1, 2}), 2);
    CHECK(s.level(1) == vec({1, 2}));
    CHECK(s.level(2) == vec({0.5, 1, 1, 2}));

    const auto z = segment_signature<double>(vec({0, 0, 0}), 3);
    CHECK(z.coefficients()[0] == 1.0);
    CHECK(z.coefficients().tail(z.size() - 1).isZero());

    const auto one = segment_signature<double>(vec({3}), 3);
    CHECK(one.coefficients() == vec({1, 3, 4.5, 4.5}));
}

TEST_CASE("signature matches quadrature on the area example") {
    const auto path = points_path({{0, 0}, {1, 1}, {2, 0}});
    const auto s = signature(path, 2);
    CHECK(s.level(1)[0] == doctest::Approx(2.0));
    CHECK(s.level(1)[1] == doctest::Approx(0.0).epsilon(1e-15));
    // level 2 in row-major order: (1,1), (1,2), (2,1), (2,2)
    CHECK(s.level(2)[0] == doctest::Approx(2.0));
    // S^{12} = int x dy = 1/2 - 3/2 and S^{21} = int y dx = 1/2 + 1/2
    CHECK(s.level(2)[1] == doctest::Approx(-1.0));
    CHECK(s.level(2)[2] == doctest::Approx(1.0));
    CHECK(s.level(2)[3] == doctest::Approx(0.0).epsilon(1e-15));

    const auto ref = oracle::quadrature_signature(as_real(path), 2);
    CHECK(max_diff(s, ref) < 1e-9);
}

TEST_CASE("signature agrees with quadrature on random paths up to order 4") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto path = random_walk(rng, 6, 2);
        const auto s = signature(path, 4);
        const auto ref = oracle::quadrature_signature(as_real(path), 4);
        const double scale = s.coefficients().cwiseAbs().maxCoeff();
        CHECK(max_diff(s, ref) < 1e-6 * scale);
        CHECK(max_diff(s, oracle::exact_signature(as_real(path), 4)) < 1e-12);
    }
}

TEST_CASE("single segment path equals segment signature") {
    const auto path = points_path({{0, 1.5, -2}, {0.5, 0.25, 1}});
    const auto s = signature(path, 3);
    const auto seg = segment_signature<double>(vec({0.5, -1.25, 3}), 3);
    CHECK((s.coefficients() - seg.coefficients()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(points_path({{0, 0}}), InvalidArgument);
}

TEST_CASE("Chen identity against the reference product") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Index coords = 1 + trial % 2;
        const auto path = random_walk(rng, 9, coords);
        const int order = 2 + trial % 3;
        const Index split = 1 + trial % 7;
        const auto a = signature(path.slice(0, split), order);
        const auto b = signature(path.slice(split, path.size() - 1), order);
        const auto joined = chen_concat(a, b);
        const auto full = signature(path, order);
        const double scale = full.coefficients().cwiseAbs().maxCoeff();
        CHECK((joined.coefficients() - full.coefficients()).cwiseAbs().maxCoeff() <= 1e-12 * scale);

        const std::size_t d = static_cast<std::size_t>(path.dimension());
        oracle::Levels la, lb;
        for (int n = 0; n <= order; ++n) {
            la.push_back(oracle::to_real(a.level(n)));
            lb.push_back(oracle::to_real(b.level(n)));
        }
        CHECK(max_diff(joined, oracle::concat(la, lb, d)) <= 1e-12 * scale);
    }
    CHECK_THROWS_AS(chen_concat(Signatured::unit(2, 2), Signatured::unit(2, 3)), InvalidArgument);
}

TEST_CASE("level-2 shuffle identity") {
    std::mt19937_64 rng(9);
    const auto path = random_walk(rng, 12, 2);
    const auto s = signature(path, 2);
    const Index d = s.dimension();
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            CHECK(s.level(1)[i] * s.level(1)[j] == doctest::Approx(s.level(2)[i * d + j] + s.level(2)[j * d + i]));
}

TEST_CASE("inserting a collinear midpoint leaves the signature unchanged") {
    const auto coarse = points_path({{0, 0}, {1, 2}, {3, 1}});
    const auto fine = points_path({{0, 0}, {0.5, 1}, {1, 2}, {3, 1}});
    const auto a = signature(coarse, 4);
    const auto b = signature(fine, 4);
    CHECK((a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("prefix signatures and stream") {
    std::mt19937_64 rng(3);
    const auto path = random_walk(rng, 8, 1);
    const auto prefixes = prefix_signatures(path, 3);
    REQUIRE(prefixes.size() == 8);
    CHECK(prefixes.front().coefficients() == Signatured::unit(2, 3).coefficients());
    for (Index j = 1; j < path.size(); ++j) {
        const auto direct = signature(path.slice(0, j), 3);
        CHECK((direct.coefficients() - prefixes[static_cast<std::size_t>(j)].coefficients()).cwiseAbs().maxCoeff() <
              1e-13);
    }
    const auto stream = SignatureStreamd::from(path, 3);
    CHECK(stream.steps() == 7);
    CHECK(stream.rows().row(7).transpose() == prefixes.back().coefficients());
}

TEST_CASE("pairing") {
    std::mt19937_64 rng(4);
    const auto path = random_walk(rng, 5, 2);
    const auto s = signature(path, 2);
    auto l = DualVectord::zero(3, 2);
    CHECK(pair(l, s) == 0.0);
    Vec c = Vec::Zero(graded_length(3, 2));
    c[0] = 1.0;
    CHECK(pair(DualVectord(3, 2, c), s) == 1.0);
    c.setZero();
    c[level_offset(3, 1) + 2] = 1.0;
    const double increment = path.inner().values()(4, 2) - path.inner().values()(0, 2);
    CHECK(pair(DualVectord(3, 2, c), s) == doctest::Approx(increment));
    CHECK_THROWS_AS(pair(DualVectord::zero(3, 3), s), InvalidArgument);
}

TEST_CASE("scalar template instantiates for long double") {
    using LPath = Path<long double>;
    LPath::Vector t(3), x(3);
    t << 0, 1, 2;
    x << 0, 1, 0;
    const auto s = signature(augment(LPath::scalar(t, x), false), 2);
    CHECK(static_cast<double>(s.level(2)[1]) == doctest::Approx(-1.0));
}
