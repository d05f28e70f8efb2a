#include <doctest.h>

#include <cmath>
#include <random>

#include "iemo/problems.hpp"

using namespace iemo;

TEST_CASE("DTLZ1 and DTLZ2 at the centre of the distance variables") {
    const auto p1 = ProblemSpec::make(Family::dtlz1, 3);
    CHECK(p1.n == 7);
    std::vector<double> x(p1.n, 0.5);
    const auto f1 = evaluate(p1, x);
    CHECK(f1[0] == doctest::Approx(0.125));
    CHECK(f1[1] == doctest::Approx(0.125));
    CHECK(f1[2] == doctest::Approx(0.25));

    const auto p2 = ProblemSpec::make(Family::dtlz2, 3);
    CHECK(p2.n == 12);
    std::vector<double> y(p2.n, 0.5);
    y[0] = 0.0;
    y[1] = 0.0;
    const auto f2 = evaluate(p2, y);
    CHECK(f2[0] == doctest::Approx(1.0));
    CHECK(f2[1] == doctest::Approx(0.0));
    CHECK(f2[2] == doctest::Approx(0.0));
}

TEST_CASE("DTLZ1 g term away from the front") {
    const auto p = ProblemSpec::make(Family::dtlz1, 2, 2);
    // g = 100 (1 + (0-0.5)^2 - cos(20 pi (-0.5))) = 100 * 0.25 = 25
    const auto f = evaluate(p, std::vector<double>{0.5, 0.0});
    CHECK(f[0] == doctest::Approx(0.5 * 0.5 * 26.0));
    CHECK(f[1] == doctest::Approx(0.5 * 0.5 * 26.0));
}

TEST_CASE("Pareto-optimal decisions land on the front for every family") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::pair<Family, std::size_t>> cases{
        {Family::dtlz1, 3},    {Family::dtlz2, 3},    {Family::dtlz3, 5},    {Family::dtlz4, 3},
        {Family::dtlz5, 4},    {Family::dtlz6, 3},    {Family::dtlz1inv, 3}, {Family::dtlz2inv, 4},
        {Family::dtlz3inv, 3}, {Family::dtlz4inv, 3}, {Family::mdtlz1, 3},   {Family::mdtlz2, 3},
        {Family::mdtlz3, 3},   {Family::mdtlz4, 3},   {Family::wfg3, 3},     {Family::wfg3, 5}};
    for (const auto& [family, m] : cases) {
        CAPTURE(to_string(family));
        CAPTURE(m);
        const auto spec = ProblemSpec::make(family, m);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> pos(m - 1);
            for (auto& p : pos) p = unit(rng);
            const auto f = evaluate(spec, pareto_decision(spec, pos));
            CHECK(std::abs(pf_residual(spec, f)) < 1e-9);
            for (double v : f) CHECK(v >= -1e-12);
        }
    }
}

TEST_CASE("family names round-trip") {
    for (Family f : {Family::dtlz1, Family::dtlz4, Family::dtlz2inv, Family::mdtlz3, Family::wfg3})
        CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS_AS(parse_family("zdt1"), UnsupportedError);
}

TEST_CASE("spec validation and evaluation errors") {
    CHECK_THROWS_AS(ProblemSpec::make(Family::dtlz2, 1), DimensionError);
    CHECK_THROWS_AS(ProblemSpec::make(Family::mdtlz2, 4), DimensionError);
    CHECK_THROWS_AS(ProblemSpec::make(Family::wfg3, 3, 5), DimensionError);
    const auto spec = ProblemSpec::make(Family::dtlz2, 3);
    CHECK_THROWS_AS(evaluate(spec, std::vector<double>(5, 0.5)), DimensionError);
    std::vector<double> x(spec.n, 0.5);
    x[3] = 1.5;
    try {
        evaluate(spec, x);
        FAIL("expected BoundsError");
    } catch (const BoundsError& e) {
        CHECK(e.index() == 3);
    }
}

TEST_CASE("golden points in closed form") {
    const auto d1 = golden_point(ProblemSpec::make(Family::dtlz1, 3), std::vector<double>{1, 1, 1});
    for (double v : d1) CHECK(v == doctest::Approx(1.0 / 6.0));
    const auto d2 = golden_point(ProblemSpec::make(Family::dtlz2, 3), std::vector<double>{1, 1, 1});
    for (double v : d2) CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)));
    const auto b = golden_point(ProblemSpec::make(Family::dtlz2, 2), std::vector<double>{5, 1});
    CHECK(b[0] / b[1] == doctest::Approx(5.0));
}

TEST_CASE("searched golden points beat every sampled front point") {
    for (Family family : {Family::dtlz2inv, Family::mdtlz2, Family::wfg3, Family::dtlz5}) {
        CAPTURE(to_string(family));
        const auto spec = ProblemSpec::make(family, 3);
        const std::vector<double> w{1.0, 2.0, 1.5};
        const auto g = golden_point(spec, w);
        CHECK(std::abs(pf_residual(spec, g)) < 1e-8);
        auto psi = [&](const ObjectiveVector& f) {
            double s = 0;
            for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, f[i] / w[i]);
            return s;
        };
        const double best = psi(g);
        for (const auto& f : sample_pf(spec, 2000, 3)) CHECK(best <= psi(f) + 1e-9);
    }
}

TEST_CASE("golden point rejects non-positive weights") {
    const auto spec = ProblemSpec::make(Family::dtlz2, 3);
    CHECK_THROWS(golden_point(spec, std::vector<double>{1, 0, 1}));
    CHECK_THROWS_AS(golden_point(spec, std::vector<double>{1, 1}), DimensionError);
}
