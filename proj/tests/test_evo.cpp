#include <doctest.h>

#include <random>

#include "iemo/evo.hpp"
#include "oracles.hpp"

using namespace iemo;

TEST_CASE("dominance") {
    CHECK(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 3}));
    CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
    CHECK_FALSE(dominates(std::vector<double>{0, 3}, std::vector<double>{1, 2}));
}

TEST_CASE("fast nondominated sort equals brute-force peeling") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const std::size_t m = 2 + rng() % 4;
        std::uniform_int_distribution<int> coarse(0, 6);  // many duplicates and ties
        std::vector<ObjectiveVector> pts(n, ObjectiveVector(m));
        for (auto& p : pts)
            for (auto& v : p) v = coarse(rng);
        const auto fronts = fast_nondominated_sort(pts);
        const auto expected = oracle::front_index(pts);
        std::vector<std::size_t> got(n, 999);
        std::size_t covered = 0;
        for (std::size_t r = 0; r < fronts.size(); ++r) {
            CHECK(std::is_sorted(fronts[r].begin(), fronts[r].end()));
            for (std::size_t i : fronts[r]) got[i] = r;
            covered += fronts[r].size();
        }
        CHECK(covered == n);
        CHECK(got == expected);
    }
}

TEST_CASE("crowding distance gives boundary members infinity") {
    std::vector<ObjectiveVector> pts{{0, 4}, {1, 3}, {2, 1}, {4, 0}};
    std::vector<std::size_t> front{0, 1, 2, 3};
    const auto d = crowding_distance(pts, front);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[3]));
    CHECK(d[1] == doctest::Approx(2.0 / 4.0 + 3.0 / 4.0));
    CHECK(d[2] == doctest::Approx(3.0 / 4.0 + 3.0 / 4.0));
}

TEST_CASE("variation operators respect bounds over 1e5 trials") {
    std::mt19937_64 rng(17);
    std::vector<Interval> bounds{{0, 1}, {-2, 3}, {0, 0.001}, {5, 5}, {-1e3, 1e3}};
    VariationConfig cfg = VariationConfig::defaults(bounds.size());
    cfg.p_m = 1.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&] {
        std::vector<double> x(bounds.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = unit(rng);
            x[i] = r < 0.1 ? bounds[i].lower : (r < 0.2 ? bounds[i].upper : bounds[i].lower + unit(rng) * (bounds[i].upper - bounds[i].lower));
        }
        return x;
    };
    std::size_t violations = 0;
    for (int t = 0; t < 100000; ++t) {
        const auto a = draw(), b = draw();
        const auto [c1, c2] = sbx_crossover(a, b, cfg, bounds, rng);
        const auto mu = polynomial_mutation(c1, cfg, bounds, rng);
        for (const auto* x : {&c1, &c2, &mu})
            for (std::size_t i = 0; i < bounds.size(); ++i)
                if (!((*x)[i] >= bounds[i].lower && (*x)[i] <= bounds[i].upper)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("variation config defaults and validation") {
    const auto cfg = VariationConfig::defaults(12);
    CHECK(cfg.p_c == 1.0);
    CHECK(cfg.eta_c == 30.0);
    CHECK(cfg.p_m == doctest::Approx(1.0 / 12.0));
    CHECK(cfg.eta_m == 20.0);
    VariationConfig bad = cfg;
    bad.p_m = 1.5;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("random decisions lie within bounds") {
    const auto spec = ProblemSpec::make(Family::wfg3, 3);
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_decision(spec, rng);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(x[i] >= spec.bounds[i].lower);
            CHECK(x[i] <= spec.bounds[i].upper);
        }
    }
}
