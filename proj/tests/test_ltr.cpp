#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "iemo/harness.hpp"
#include "iemo/ltr.hpp"
#include "oracles.hpp"

using namespace iemo;

namespace {

PreferenceModel random_model(std::size_t m, std::size_t hidden, std::mt19937_64& rng) {
    PreferenceModel model(m, hidden, 1.0);
    std::uniform_real_distribution<double> init(-1.0, 1.0);
    for (auto& p : model.parameters()) p = init(rng);
    return model;
}

}  // namespace

TEST_CASE("parameter layout") {
    CHECK(PreferenceModel::parameter_count(3, 10) == 10 * 3 + 10 + 10 + 1);
    CHECK(PreferenceModel::parameter_count(4, 0) == 4);
    PreferenceModel linear(2, 0);
    linear.parameters()[0] = 2.0;
    linear.parameters()[1] = -1.0;
    CHECK(linear.score(std::vector<double>{3.0, 4.0}) == doctest::Approx(2.0));
}

TEST_CASE("pair loss matches the cross-entropy definition") {
    std::mt19937_64 rng(1);
    const auto model = random_model(3, 4, rng);
    const ObjectiveVector a{0.2, 0.5, 0.1}, b{0.7, 0.1, 0.3};
    const double du = model.score(a) - model.score(b);
    const double p = 1.0 / (1.0 + std::exp(-du));
    CHECK(pair_probability(model, a, b) == doctest::Approx(p));
    for (int c : {-1, 0, 1}) {
        const double target = (1.0 + c) / 2.0;
        const double ce = -target * std::log(p) - (1.0 - target) * std::log(1.0 - p);
        CHECK(pair_loss(model, {a, b, c}) == doctest::Approx(ce).epsilon(1e-12));
    }
}

TEST_CASE("softplus is stable for large arguments") {
    CHECK(softplus(800.0) == doctest::Approx(800.0));
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("factorized gradient equals the naive per-pair gradient") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng() % 8;
        const auto model = random_model(m, trial % 3 == 0 ? 0 : 10, rng);
        const auto records = oracle::random_records(m, 5 + rng() % 40, rng);
        GradientStats stats;
        const auto fast = gradient(model, records, &stats);
        const auto slow = oracle::naive_gradient(model, records);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t p = 0; p < fast.size(); ++p) CHECK(std::abs(fast[p] - slow[p]) <= 1e-10);
        CHECK(stats.forward_passes == stats.distinct_solutions);
        CHECK(stats.backward_passes <= stats.distinct_solutions);
    }
}

TEST_CASE("gradient agrees with central finite differences on 100 instances") {
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng() % 5;
        const auto model = random_model(m, 10, rng);
        const auto records = oracle::random_records(m, 20, rng);
        const auto g = gradient(model, records);
        const auto fd = oracle::finite_difference_gradient(model, records, 1e-6);
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            num += (g[p] - fd[p]) * (g[p] - fd[p]);
            den += g[p] * g[p];
        }
        worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("training on the working example orders the four solutions") {
    const auto pts = working_example_points();
    const auto model = train(working_example_records(), 3, TrainConfig{});
    CHECK(model.score(pts[0]) > model.score(pts[1]));
    CHECK(model.score(pts[1]) > model.score(pts[2]));
    CHECK(model.score(pts[2]) > model.score(pts[3]));
}

TEST_CASE("training keeps the lowest-loss parameters and is seed-deterministic") {
    std::mt19937_64 rng(2);
    const auto records = oracle::random_records(3, 30, rng);
    TrainConfig cfg;
    cfg.epochs = 50;
    const auto a = train(records, 3, cfg);
    const auto b = train(records, 3, cfg);
    CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));

    PreferenceModel start(3, cfg.hidden_dim, cfg.sigma);
    start.set_normalization(a.normalization());
    std::mt19937_64 init(cfg.init_seed);
    std::uniform_real_distribution<double> u(-cfg.init_range, cfg.init_range);
    for (auto& p : start.parameters()) p = u(init);
    CHECK(total_loss(a, records) <= total_loss(start, records));
}

TEST_CASE("training rejects uninformative or malformed input") {
    const ObjectiveVector a{0.1, 0.2}, b{0.3, 0.1};
    CHECK_THROWS(train(std::vector<ComparisonRecord>{}, 2, TrainConfig{}));
    CHECK_THROWS(train(std::vector<ComparisonRecord>{{a, b, 0}}, 2, TrainConfig{}));
    TrainConfig lenient;
    lenient.allow_all_indifferent = true;
    CHECK_NOTHROW(train(std::vector<ComparisonRecord>{{a, b, 0}}, 2, lenient));
    CHECK_THROWS_AS(train(std::vector<ComparisonRecord>{{a, b, 1}}, 3, TrainConfig{}), DimensionError);
    CHECK_THROWS(train(std::vector<ComparisonRecord>{{a, b, 2}}, 2, TrainConfig{}));
}

TEST_CASE("model JSON round trip preserves scores") {
    std::mt19937_64 rng(3);
    auto model = random_model(3, 10, rng);
    model.set_normalization({{0.0, 0.0, 0.0}, {2.0, 4.0, 1.0}});
    const auto copy = PreferenceModel::from_json(model.to_json());
    const ObjectiveVector f{0.3, 1.7, 0.2};
    CHECK(copy.score(f) == model.score(f));
    CHECK(copy.hidden_dim() == 10);
}

TEST_CASE("normalization maps the bounding box onto the unit cube") {
    const std::vector<ObjectiveVector> pts{{1, 10}, {3, 20}, {2, 15}};
    const auto n = Normalization::from_bounds(pts);
    std::vector<double> out(2);
    n.apply(pts[1], out);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(1.0));
    n.apply(pts[0], out);
    CHECK(out[0] == doctest::Approx(0.0));
}

TEST_CASE("records_within keeps records near the box") {
    const Normalization n{{0.0, 0.0}, {1.0, 1.0}};
    const std::vector<ComparisonRecord> records{
        {{0.5, 0.5}, {2.5, 0.5}, 1}, {{0.5, 0.5}, {3.5, 0.5}, 1}, {{-2.0, 0.5}, {0.5, 0.5}, -1}};
    CHECK(records_within(records, n, 2.0).size() == 2);
    CHECK(records_within(records, n, 0.0).empty());
    CHECK(records_within(records, n, std::numeric_limits<double>::infinity()).size() == 3);
}
