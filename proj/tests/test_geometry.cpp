#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "geoscore/error.hpp"
#include "geoscore/geometry.hpp"
#include "oracles.hpp"

using namespace geoscore;

namespace {

AssessmentPoint pt(std::vector<double> x) { return AssessmentPoint::from_frequencies(std::move(x)); }

EffortWeights random_weights(std::mt19937_64& rng, std::size_t steps) {
    std::uniform_real_distribution<double> u(0.05, 5.0);
    std::vector<double> a(steps);
    for (auto& v : a) v = u(rng);
    return EffortWeights(a);
}

}  // namespace

TEST_CASE("delta at the vertices and hand-evaluated points") {
    const auto b = EffortWeights::preset("B");
    CHECK(delta(pt({1, 0, 0, 0, 0}), b) == doctest::Approx(0.0));
    CHECK(delta(pt({0, 0, 0, 0, 1}), EffortWeights::unit(4)) == doctest::Approx(4.0));
    CHECK(delta(pt({0.3, 0.3, 0.2, 0.1, 0.1}), b) == doctest::Approx(4.0).epsilon(1e-14));

    const double r2 = std::sqrt(2.0);
    const EffortWeights w({r2, r2});
    CHECK(std::abs(delta(pt({0.25, 0.75, 0}), w) - 3 * r2 / 4) <= 1e-12);
}

TEST_CASE("delta_unit") {
    CHECK(delta_unit(pt({1, 0, 0})) == 0.0);
    CHECK(delta_unit(pt({0, 1, 0, 0, 0})) == doctest::Approx(1.0));
    CHECK(delta_unit(pt({0.2, 0.2, 0.2, 0.2, 0.2})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("path construction on small cases") {
    for (double x1 : {0.0, 0.1, 0.5, 0.93, 1.0}) {
        const EffortWeights w({2.5});
        CHECK(std::abs(delta_path_oracle(pt({x1, 1 - x1}), w) - 2.5 * (1 - x1)) <= 1e-12);
    }
    CHECK(std::abs(delta_path_oracle(pt({0.2, 0.47, 0.33}), EffortWeights::unit(2)) - 1.13) <= 1e-12);
    CHECK(std::abs(delta_path_oracle(pt({0, 0, 1}), EffortWeights({0.7, 1.9})) - 2.6) <= 1e-12);
    CHECK(std::abs(delta_path_oracle(pt({0.3, 0.3, 0.2, 0.1, 0.1}), EffortWeights::preset("B")) - 4.0) <=
          1e-12);
}

TEST_CASE("cumulative_map") {
    auto c = cumulative_map(pt({1, 0, 0}));
    CHECK(c == std::vector<double>{1, 1, 1});
    c = cumulative_map(pt({0.2, 0.3, 0.5}));
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(0.2));
    CHECK(c[1] == doctest::Approx(0.5));
    CHECK(c[2] == 1.0);
    CHECK(cumulative_map(pt({0, 0, 1})) == std::vector<double>{0, 0, 1});
}

TEST_CASE("minkowski identity on fixed points") {
    CHECK(minkowski_identity_check(pt({1, 0, 0, 0, 0})));
    CHECK(minkowski_identity_check(pt({0.2, 0.2, 0.2, 0.2, 0.2})));
}

TEST_CASE("pseudo-distance and score classes") {
    const double r2 = std::sqrt(2.0);
    const EffortWeights w({r2, r2});
    const auto p = pt({0.25, 0.75, 0});
    const auto q = pt({0.5, 0.25, 0.25});
    CHECK(pseudo_distance(p, p, w) == 0.0);
    CHECK(pseudo_distance(p, q, w) <= 1e-12);
    CHECK(same_score_class(p, q, w, 1e-12));
    CHECK(same_score_class(p, p, w, 0.0));
    const auto u = EffortWeights::unit(2);
    CHECK(pseudo_distance(pt({1, 0, 0}), pt({0, 0, 1}), u) == doctest::Approx(2.0));
    CHECK_FALSE(same_score_class(pt({1, 0, 0}), pt({0, 1, 0}), u, 1e-12));
}

TEST_CASE("construction and contract errors") {
    CHECK_THROWS_AS(pt({1.0}), ValidationError);
    CHECK_THROWS_AS(pt({0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(pt({-0.1, 1.1}), ValidationError);
    CHECK_THROWS_AS(pt({std::numeric_limits<double>::quiet_NaN(), 1.0}), ValidationError);
    CHECK_THROWS_AS(AssessmentPoint::from_counts(ClassCount::zeros(3)), ValidationError);
    CHECK_THROWS_AS(ClassCount({1, -1}), ValidationError);
    CHECK_THROWS_AS(EffortWeights({1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(EffortWeights({1.0, std::numeric_limits<double>::infinity()}), ValidationError);
    CHECK_THROWS_AS(delta(pt({0.5, 0.5}), EffortWeights::unit(2)), ContractViolation);
    CHECK_THROWS_AS(delta_path_oracle(pt({0.5, 0.5}), EffortWeights::unit(3)), ContractViolation);
    CHECK_THROWS_AS(pseudo_distance(pt({0.5, 0.5}), pt({1, 0, 0}), EffortWeights::unit(1)),
                    ContractViolation);

    // Small drift is renormalized, not rejected.
    const auto p = pt({0.5 + 4e-10, 0.5});
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weight presets and parsing") {
    const auto a = EffortWeights::preset("A");
    CHECK(std::vector<double>(a.weights().begin(), a.weights().end()) == std::vector<double>{1, 1, 1, 1});
    const auto b = EffortWeights::preset("B");
    CHECK(std::vector<double>(b.weights().begin(), b.weights().end()) == std::vector<double>{3, 3, 3, 1});
    const auto c = EffortWeights::preset("C");
    CHECK(std::vector<double>(c.weights().begin(), c.weights().end()) ==
          std::vector<double>{1, 1, 1.5, 1});
    CHECK(EffortWeights::preset("A", 3).steps() == 2);
    CHECK_THROWS(EffortWeights::preset("B", 4));
    CHECK_THROWS(EffortWeights::preset("Z"));
    const auto custom = EffortWeights::parse("1,1,1.5,1", 5);
    CHECK(custom.total() == doctest::Approx(4.5));
    CHECK_THROWS(EffortWeights::parse("1,1", 5));
    CHECK_THROWS(EffortWeights::parse("1,x,1,1", 5));
}

TEST_CASE("property: closed form agrees with the path construction") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> classes(2, 12);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const std::size_t k = classes(rng);
        const auto p = pt(oracle::random_simplex_point(rng, k));
        const auto w = random_weights(rng, k - 1);
        worst = std::max(worst, std::abs(delta(p, w) - delta_path_oracle(p, w)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("property: closed form agrees with the cumulative-sum reference") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + i % 11;
        const auto x = oracle::random_simplex_point(rng, k);
        const auto w = random_weights(rng, k - 1);
        const std::vector<double> a(w.weights().begin(), w.weights().end());
        REQUIRE(std::abs(delta(pt(x), w) - oracle::delta_cumulative(x, a)) <= 1e-12);
    }
}

TEST_CASE("property: vertices are ordered and bound the range") {
    std::mt19937_64 rng(11);
    for (std::size_t k = 2; k <= 12; ++k) {
        const auto w = random_weights(rng, k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            CHECK(delta(AssessmentPoint::vertex(k, i), w) < delta(AssessmentPoint::vertex(k, i + 1), w));
        }
        CHECK(delta(AssessmentPoint::vertex(k, 0), w) == 0.0);
        CHECK(delta(AssessmentPoint::vertex(k, k - 1), w) == doctest::Approx(w.total()).epsilon(1e-14));
        for (int r = 0; r < 500; ++r) {
            const auto p = pt(oracle::random_simplex_point(rng, k));
            const double d = delta(p, w);
            CHECK(d > 0.0);
            CHECK(d < w.total());
        }
    }
}

TEST_CASE("property: delta is affine on the simplex") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + i % 11;
        const auto x = oracle::random_simplex_point(rng, k);
        const auto y = oracle::random_simplex_point(rng, k);
        const auto w = random_weights(rng, k - 1);
        const double l = lam(rng);
        std::vector<double> mix(k);
        for (std::size_t j = 0; j < k; ++j) mix[j] = l * x[j] + (1 - l) * y[j];
        const double lhs = delta(pt(mix), w);
        const double rhs = l * delta(pt(x), w) + (1 - l) * delta(pt(y), w);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, w.total()));
    }
}

TEST_CASE("property: minkowski identity on random points") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 10000; ++i) {
        REQUIRE(minkowski_identity_check(pt(oracle::random_simplex_point(rng, 2 + i % 11))));
    }
}

TEST_CASE("property: pseudo-distance symmetry and triangle inequality") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + i % 11;
        const auto w = random_weights(rng, k - 1);
        const auto p = pt(oracle::random_simplex_point(rng, k));
        const auto q = pt(oracle::random_simplex_point(rng, k));
        const auto r = pt(oracle::random_simplex_point(rng, k));
        REQUIRE(pseudo_distance(p, q, w) == pseudo_distance(q, p, w));
        REQUIRE(pseudo_distance(p, r, w) <= pseudo_distance(p, q, w) + pseudo_distance(q, r, w) + 1e-12);
    }
}

TEST_CASE("property: cumulative map is monotone and marks facets") {
    std::mt19937_64 rng(23);
    std::bernoulli_distribution zero(0.3);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + i % 11;
        auto x = oracle::random_simplex_point(rng, k);
        for (std::size_t j = 0; j + 1 < k; ++j) {
            if (zero(rng)) x[j] = 0.0;
        }
        double sum = 0.0;
        for (double v : x) sum += v;
        if (sum == 0.0) continue;
        for (auto& v : x) v /= sum;
        const auto p = pt(x);
        const auto c = cumulative_map(p);
        REQUIRE(c.back() == 1.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double prev = j == 0 ? 0.0 : c[j - 1];
            REQUIRE(c[j] >= prev);
            REQUIRE((p[j] == 0.0) == (c[j] == prev));
        }
    }
}

TEST_CASE("property: integer form matches the frequency form") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<std::int64_t> count(0, 400);
    for (int i = 0; i < 5000; ++i) {
        const std::size_t k = 2 + i % 11;
        std::vector<std::int64_t> c(k);
        for (auto& v : c) v = count(rng);
        c[0] += 1;
        const ClassCount cc(c);
        const auto w = random_weights(rng, k - 1);
        const double t = static_cast<double>(cc.total());
        REQUIRE(std::abs(delta_numerator(cc, w) / t - delta(AssessmentPoint::from_counts(cc), w)) <=
                1e-12 * w.total());
    }
}
