#include <doctest.h>

#include <cmath>

#include "iemo/dm.hpp"

using namespace iemo;

TEST_CASE("noiseless oracle prefers the smaller golden value") {
    DMOracle dm(equal_weight(3));
    CHECK(dm.golden_value(std::vector<double>{0.2, 0.5, 0.1}) == doctest::Approx(0.5));
    CHECK(dm.compare(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{0.1, 0.1, 0.9}).c == 1);
    CHECK(dm.compare(std::vector<double>{0.1, 0.1, 0.9}, std::vector<double>{0.3, 0.3, 0.3}).c == -1);
    CHECK(dm.compare(std::vector<double>{0.5, 0.1, 0.1}, std::vector<double>{0.1, 0.5, 0.2}).c == 0);
}

TEST_CASE("biased weights") {
    CHECK(biased_weight(3, 1) == ObjectiveVector{1, 5, 1});
    CHECK_THROWS(biased_weight(3, 3));
    DMOracle dm(biased_weight(2, 0));
    // psi = max(f1/5, f2): (0.5, 0.2) -> 0.2 beats (0.2, 0.3) -> 0.3
    CHECK(dm.compare(std::vector<double>{0.5, 0.2}, std::vector<double>{0.2, 0.3}).c == 1);
}

TEST_CASE("noisy oracle flips with probability exp(-kappa delta)") {
    const double kappa = 10.0;
    DMOracle dm(equal_weight(2), kappa, 99);
    const std::vector<double> a{0.1, 0.1}, b{0.2, 0.2};  // delta = 0.1
    int flips = 0;
    const int trials = 40000;
    for (int t = 0; t < trials; ++t) {
        const auto j = dm.compare(a, b);
        CHECK(j.c == (j.flipped ? -1 : 1));
        flips += j.flipped;
    }
    const double expected = std::exp(-kappa * 0.1);
    CHECK(std::abs(flips / static_cast<double>(trials) - expected) < 0.01);
}

TEST_CASE("oracle validation") {
    CHECK_THROWS(DMOracle(ObjectiveVector{1, 0}));
    CHECK_THROWS(DMOracle(ObjectiveVector{1, 1}, 0.0, 1));
    CHECK_THROWS_AS(DMOracle(ObjectiveVector{1, 1}, ObjectiveVector{0}, 1.0, 1), DimensionError);
}

TEST_CASE("query enumeration") {
    const auto q = enumerate_queries(10);
    CHECK(q.size() == 45);
    CHECK(q.front() == QueryPair{0, 1});
    CHECK(q.back() == QueryPair{8, 9});
    for (const auto& [i, j] : q) CHECK(i < j);
    CHECK_THROWS(enumerate_queries(1));
}

namespace {
Population population_of(const std::vector<ObjectiveVector>& fs) {
    Population p;
    for (const auto& f : fs) p.members.push_back({{}, f, std::nullopt, std::nullopt});
    p.capacity = fs.size();
    return p;
}
}  // namespace

TEST_CASE("bootstrap candidates spread over the first front and skip duplicates") {
    const auto pop = population_of({{0, 1}, {1, 0}, {0.5, 0.5}, {0.5, 0.5}, {0.9, 0.9}, {0.25, 0.75}});
    const auto pick = bootstrap_candidates(pop, 3);
    REQUIRE(pick.size() == 3);
    // no duplicate objective vectors and the dominated member is not needed for three picks
    CHECK(std::find(pick.begin(), pick.end(), 3) == pick.end());
    CHECK(std::find(pick.begin(), pick.end(), 4) == pick.end());
    CHECK(std::find(pick.begin(), pick.end(), 0) != pick.end());
    CHECK(std::find(pick.begin(), pick.end(), 1) != pick.end());
}

TEST_CASE("model-based candidates are the top-mu distinct members") {
    auto pop = population_of({{0.1, 0.9}, {0.9, 0.1}, {0.5, 0.5}, {0.5, 0.5}, {0.3, 0.7}});
    PreferenceModel linear(2, 0);
    linear.parameters()[0] = -1.0;  // u = -f1
    linear.parameters()[1] = 0.0;
    const auto pick = select_candidates(pop, &linear, 3);
    CHECK(pick == std::vector<std::size_t>{0, 4, 2});
}
