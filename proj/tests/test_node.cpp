#include <cmath>
#include <random>

#include "doctest.h"

#include "bsssom/errors.hpp"
#include "bsssom/node.hpp"
#include "support.hpp"

using namespace bsssom;
using testing::make_node;

TEST_CASE("weighted_distance") {
    const Node n = make_node(0, {0.0, 0.0}, {1.0, 1.0});
    CHECK(weighted_distance(std::vector<double>{0.0, 0.0}, n) == 0.0);
    CHECK(weighted_distance(std::vector<double>{1.0, 0.0}, n) == doctest::Approx(1.0));

    const Node quarter = make_node(0, {0.0, 0.0}, {0.25, 0.25});
    CHECK(weighted_distance(std::vector<double>{1.0, 1.0}, quarter) == doctest::Approx(std::sqrt(0.5)));

    const Node partial = make_node(0, {0.2, 0.4}, {1.0, 0.5});
    CHECK(weighted_distance(std::vector<double>{0.2, 0.4}, partial) == 0.0);

    CHECK_THROWS_AS(weighted_distance(std::vector<double>{1.0}, n), InputError);
}

TEST_CASE("activation") {
    const Node n = make_node(0, {0.3, 0.7}, {0.5, 1.0});
    CHECK(activation(std::vector<double>{0.3, 0.7}, n, 1e-8) == 1.0);

    // D == sum(omega) with eps -> 0 gives 1/2.
    const Node unit = make_node(0, {0.0}, {1.0});
    CHECK(activation(std::vector<double>{1.0}, unit, 0.0) == doctest::Approx(0.5));

    const Node full = make_node(0, {0.0, 0.0}, {1.0, 1.0});
    CHECK(activation(std::vector<double>{1.0, 0.0}, full, 1e-8) ==
          doctest::Approx(1.0 / (1.0 + 1.0 / 2.00000001)).epsilon(1e-12));
    CHECK(activation(std::vector<double>{1.0, 0.0}, full, 1e-8) == doctest::Approx(0.6667).epsilon(1e-4));

    CHECK_THROWS_AS(activation(std::vector<double>{1.0, 0.0, 0.0}, full, 1e-8), InputError);
}

TEST_CASE("recompute_relevance") {
    SUBCASE("uniform dispersion gives full relevance") {
        const auto w = recompute_relevance(std::vector<double>{0.3, 0.3, 0.3}, 0.05);
        for (double v : w) CHECK(v == 1.0);
    }
    SUBCASE("two dimensions") {
        // mean 0.5, spread 1, s 0.1: logistic arguments are -5 and +5, so after
        // rescaling the second weight is (1 + e^-5) / (1 + e^5) = e^-5.
        const auto w = recompute_relevance(std::vector<double>{0.0, 1.0}, 0.1);
        CHECK(w[0] == 1.0);
        CHECK(w[1] < 1.0);
        CHECK(w[1] == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
    }
    SUBCASE("ordering reverses delta and keeps ties") {
        const auto w = recompute_relevance(std::vector<double>{0.2, 0.05, 0.2, 0.4}, 0.05);
        CHECK(w[1] == 1.0);
        CHECK(w[0] == w[2]);
        CHECK(w[1] > w[0]);
        CHECK(w[0] > w[3]);
    }
    SUBCASE("tiny smoothness stays positive") {
        const auto w = recompute_relevance(std::vector<double>{0.0, 1.0}, 1e-6);
        CHECK(w[1] > 0.0);
        CHECK(w[0] == 1.0);
    }
    CHECK_THROWS_AS(recompute_relevance(std::vector<double>{0.1, 0.2}, 0.0), ParameterError);
    CHECK_THROWS_AS(recompute_relevance(std::vector<double>{0.1, 0.2}, -1.0), ParameterError);
}

TEST_CASE("update_node") {
    SUBCASE("full step without dispersion update lands on the target") {
        Node n = make_node(0, {0.1, 0.9}, {1.0, 1.0});
        n.delta = {0.2, 0.4};
        const std::vector<double> target{0.6, 0.3};
        update_node(n, target, 1.0, 0.0, 0.05);
        CHECK(n.c[0] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(n.c[1] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(n.delta == std::vector<double>{0.2, 0.4});
    }
    SUBCASE("half step, beta one") {
        Node n = make_node(0, {0.0}, {1.0});
        update_node(n, std::vector<double>{1.0}, 0.5, 1.0, 0.05);
        CHECK(n.delta[0] == doctest::Approx(0.5));
        CHECK(n.c[0] == doctest::Approx(0.5));
    }
    SUBCASE("delta uses the pre-update center") {
        Node n = make_node(0, {0.2, 0.2}, {1.0, 1.0});
        update_node(n, std::vector<double>{1.0, 0.2}, 0.5, 0.5, 0.05);
        // |1.0 - 0.2| * 0.25 = 0.2 (post-update center would give 0.1)
        CHECK(n.delta[0] == doctest::Approx(0.2));
        CHECK(n.delta[1] == 0.0);
        CHECK(n.c[0] == doctest::Approx(0.6));
        CHECK(n.omega[1] == 1.0);
        CHECK(n.omega[0] < 1.0);
    }
    SUBCASE("fixed point of the center") {
        Node n = make_node(0, {0.4, 0.6}, {1.0, 1.0});
        n.delta = {0.2, 0.1};
        update_node(n, std::vector<double>{0.4, 0.6}, 0.3, 0.5, 0.05);
        CHECK(n.c == std::vector<double>{0.4, 0.6});
        CHECK(n.delta[0] == doctest::Approx(0.2 * 0.85));
        CHECK(n.delta[1] == doctest::Approx(0.1 * 0.85));
    }
    Node n = make_node(0, {0.0}, {1.0});
    CHECK_THROWS_AS(update_node(n, std::vector<double>{1.0}, 0.0, 0.1, 0.05), ParameterError);
    CHECK_THROWS_AS(update_node(n, std::vector<double>{1.0}, 1.5, 0.1, 0.05), ParameterError);
    CHECK_THROWS_AS(update_node(n, std::vector<double>{1.0, 0.0}, 0.5, 0.1, 0.05), InputError);
}

TEST_CASE("relevance_distance is normalized by sqrt(d)") {
    CHECK(relevance_distance(std::vector<double>{1, 1, 1, 1}, std::vector<double>{0, 0, 0, 0}) ==
          doctest::Approx(1.0));
    CHECK(relevance_distance(std::vector<double>{1, 0.5}, std::vector<double>{1, 0.5}) == 0.0);
}

TEST_CASE("property: activation and relevance ranges (1000 cases)") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> dims(1, 12);
    std::uniform_real_distribution<double> smooth(0.005, 0.5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = dims(rng);
        auto delta = testing::random_vector(rng, d, 0.0, 0.5);
        if (trial % 7 == 0) delta[0] = delta[d - 1];  // force ties now and then
        const auto w = recompute_relevance(delta, smooth(rng));
        double top = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            REQUIRE(w[i] > 0.0);
            REQUIRE(w[i] <= 1.0);
            top = std::max(top, w[i]);
            for (std::size_t j = 0; j < d; ++j) {
                if (delta[i] < delta[j]) REQUIRE(w[i] >= w[j]);
                if (delta[i] == delta[j]) REQUIRE(w[i] == w[j]);
            }
        }
        REQUIRE(top == 1.0);

        Node n = make_node(0, testing::random_vector(rng, d), w);
        const auto x = testing::random_vector(rng, d);
        const double a = activation(x, n, 1e-8);
        REQUIRE(a > 0.0);
        REQUIRE(a <= 1.0);
        REQUIRE((a == 1.0) == (weighted_distance(x, n) == 0.0));
        REQUIRE(activation(n.c, n, 1e-8) == 1.0);
    }
}
