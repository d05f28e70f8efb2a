#include <doctest.h>

#include <random>

#include "iemo/algorithms.hpp"
#include "iemo/seed.hpp"
#include "oracles.hpp"

using namespace iemo;

namespace {

std::vector<ObjectiveVector> random_points(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ObjectiveVector> pts(n, ObjectiveVector(m));
    for (auto& p : pts)
        for (auto& v : p) v = unit(rng);
    return pts;
}

RunConfig small(Algorithm a, Family f = Family::dtlz2) {
    RunConfig cfg = RunConfig::defaults(a, ProblemSpec::make(f, 3));
    cfg.N = 20;
    cfg.max_fe = 20 * 60;
    cfg.tau = 5;
    cfg.warmup_gens = 10;
    cfg.elicitation.mu = 5;
    cfg.train.epochs = 100;
    return cfg;
}

class ThrowingDM : public DecisionMaker {
public:
    Judgment answer(std::span<const double>, std::span<const double>) override {
        throw DecisionMakerAborted("gone");
    }
};

class ShortDM : public DecisionMaker {
public:
    Judgment answer(std::span<const double>, std::span<const double>) override { return {}; }
    std::vector<Judgment> consult(std::span<const ObjectiveVector>, std::span<const QueryPair>) override {
        return {Judgment{1, false}};
    }
};

}  // namespace

TEST_CASE("R2 indicator equals the nested-loop oracle") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 40; ++t) {
        const std::size_t m = 2 + rng() % 4;
        const auto pts = random_points(1 + rng() % 30, m, rng);
        const auto w = har_sample(m, 1 + rng() % 25, rng());
        const ObjectiveVector z(m, -0.1);
        CHECK(r2_indicator(pts, w, z) == oracle::r2(pts, w, z));
    }
}

TEST_CASE("R2 contributions equal leave-one-out recomputation") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 30; ++t) {
        const std::size_t m = 2 + rng() % 3;
        const auto pts = random_points(2 + rng() % 15, m, rng);
        const auto w = har_sample(m, 10, rng());
        const ObjectiveVector z(m, 0.0);
        const auto c = r2_contributions(pts, w, z);
        const double full = oracle::r2(pts, w, z);
        for (std::size_t a = 0; a < pts.size(); ++a) {
            auto rest = pts;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(a));
            CHECK(c[a] == doctest::Approx(oracle::r2(rest, w, z) - full).epsilon(1e-12));
        }
    }
}

TEST_CASE("greedy R2 survivors match a brute-force greedy") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 15; ++t) {
        const auto pts = random_points(12, 3, rng);
        const auto w = har_sample(3, 8, rng());
        const ObjectiveVector z(3, 0.0);
        std::vector<std::size_t> alive(pts.size());
        std::iota(alive.begin(), alive.end(), 0);
        while (alive.size() > 5) {
            std::vector<ObjectiveVector> cur;
            for (std::size_t i : alive) cur.push_back(pts[i]);
            const double base = oracle::r2(cur, w, z);
            std::size_t victim = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < alive.size(); ++k) {
                auto rest = cur;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
                const double inc = oracle::r2(rest, w, z) - base;
                if (inc < best - 1e-15) {
                    best = inc;
                    victim = k;
                }
            }
            alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(victim));
        }
        CHECK(r2_survivors(pts, w, z, 5) == alive);
    }
}

TEST_CASE("weight neighborhoods contain the vector itself and the T nearest") {
    const auto w = das_dennis(2, 9);  // 10 evenly spaced vectors
    const auto nb = weight_neighborhoods(w, 3);
    REQUIRE(nb.size() == 10);
    CHECK(nb[0].front() == 0);
    CHECK(std::vector<std::size_t>(nb[5].begin(), nb[5].end()).size() == 3);
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::find(nb[i].begin(), nb[i].end(), i) != nb[i].end());
    CHECK(weight_neighborhoods(w, 50)[0].size() == 10);
}

TEST_CASE("NSGA-II survivors: whole fronts first, then the split front by key") {
    Population merged;
    for (const ObjectiveVector& f : std::vector<ObjectiveVector>{{0, 1}, {1, 0}, {0.5, 0.5}, {2, 2}, {0.2, 1.5}, {1.5, 0.2}})
        merged.members.push_back({{}, f, std::nullopt, std::nullopt});
    const auto plain = nsga2_survivors(merged, 4, nullptr);
    CHECK(std::vector<std::size_t>(plain.begin(), plain.begin() + 3) == std::vector<std::size_t>{0, 1, 2});
    CHECK((plain[3] == 4 || plain[3] == 5));

    PreferenceModel linear(2, 0);
    linear.parameters()[0] = 1.0;  // u = f1 - f2 prefers (1.5, 0.2)
    linear.parameters()[1] = -1.0;
    CHECK(nsga2_survivors(merged, 4, &linear)[3] == 5);
}

TEST_CASE("every algorithm respects the evaluation budget and population size") {
    for (Algorithm a : {Algorithm::insga2, Algorithm::imoead, Algorithm::ir2ibea}) {
        CAPTURE(to_string(a));
        auto cfg = small(a);
        cfg.max_fe = 20 * 30 + 7;
        DMOracle dm(equal_weight(3));
        const auto r = run(cfg, dm);
        CHECK(r.fe_used <= cfg.max_fe);
        CHECK(r.fe_used + cfg.N > cfg.max_fe);
        CHECK(r.final_population.size() == cfg.N);
        CHECK(r.trajectory.size() == r.generations + 1);
        for (const auto& s : r.final_population.members)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                CHECK(s.x[i] >= cfg.problem.bounds[i].lower);
                CHECK(s.x[i] <= cfg.problem.bounds[i].upper);
            }
    }
}

TEST_CASE("consultation schedule and query count") {
    auto cfg = small(Algorithm::insga2);
    cfg.elicitation.mu = 10;
    cfg.N = 30;
    cfg.max_fe = 30 * 40;
    DMOracle dm(equal_weight(3));
    const auto r = run(cfg, dm);
    // generations 0..39 run; consultations at 10, 15, ..., 35
    REQUIRE(r.consultation_log.size() == 6);
    for (std::size_t k = 0; k < r.consultation_log.size(); ++k) {
        CHECK(r.consultation_log[k].generation == 10 + 5 * k);
        CHECK(r.consultation_log[k].records.size() == 45);
    }
    CHECK(r.model.has_value());
    for (const auto& t : r.trajectory) CHECK(t.consulted == (t.generation >= 11 && (t.generation - 11) % 5 == 0));
}

TEST_CASE("unguided runs never consult") {
    auto cfg = small(Algorithm::imoead);
    cfg.guidance = false;
    ThrowingDM dm;
    const auto r = run(cfg, dm);
    CHECK_FALSE(r.aborted);
    CHECK(r.consultation_log.empty());
    CHECK_FALSE(r.model.has_value());
}

TEST_CASE("runs are deterministic in the seed") {
    for (Algorithm a : {Algorithm::insga2, Algorithm::imoead, Algorithm::ir2ibea}) {
        CAPTURE(to_string(a));
        auto cfg = small(a, Family::dtlz1);
        cfg.seed = 77;
        DMOracle d1(equal_weight(3)), d2(equal_weight(3));
        const auto r1 = run(cfg, d1);
        const auto r2 = run(cfg, d2);
        CHECK(r1.final_population.objectives() == r2.final_population.objectives());
        cfg.seed = 78;
        DMOracle d3(equal_weight(3));
        CHECK(run(cfg, d3).final_population.objectives() != r1.final_population.objectives());
    }
}

TEST_CASE("weight-based algorithms keep their weights on the simplex after elicitation") {
    for (Algorithm a : {Algorithm::imoead, Algorithm::ir2ibea}) {
        DMOracle dm(biased_weight(3, 0));
        const auto r = run(small(a), dm);
        CHECK(r.weights.size() == 20);
        for (const auto& w : r.weights.vectors) {
            double s = 0;
            for (double v : w) {
                CHECK(v >= 0.0);
                s += v;
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("a decision maker that gives up yields a partial result") {
    ThrowingDM gone;
    const auto r = run(small(Algorithm::insga2), gone);
    CHECK(r.aborted);
    CHECK(r.generations == 10);
    CHECK(r.final_population.size() == 20);
    ShortDM short_dm;
    CHECK(run(small(Algorithm::insga2), short_dm).aborted);
}

TEST_CASE("golden-point hooks report E(P) per generation") {
    auto cfg = small(Algorithm::insga2);
    DMOracle dm(equal_weight(3));
    RunHooks hooks;
    hooks.golden_point = golden_point(cfg.problem, equal_weight(3));
    std::size_t calls = 0;
    hooks.on_generation = [&](const GenerationTrace& t, const Population& pop, const PreferenceModel*) {
        ++calls;
        CHECK(t.error.has_value());
        CHECK(pop.size() == cfg.N);
    };
    const auto r = run(cfg, dm, hooks);
    CHECK(calls == r.trajectory.size());
}

TEST_CASE("run configuration validation") {
    auto cfg = small(Algorithm::insga2);
    cfg.elicitation.mu = 30;
    DMOracle dm(equal_weight(3));
    CHECK_THROWS(run(cfg, dm));
    cfg = small(Algorithm::insga2);
    cfg.tau = 1;
    CHECK_THROWS(run(cfg, dm));
    CHECK(parse_algorithm("ir2ibea") == Algorithm::ir2ibea);
    CHECK_THROWS(parse_algorithm("nsga3"));
    CHECK(RunConfig::default_population(10) == 220);
    CHECK(RunConfig::defaults(Algorithm::imoead, ProblemSpec::make(Family::dtlz2, 8)).max_fe == 300 * 120);
}

TEST_CASE("seed derivation is a pure function") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(training_seed(5, 0) != training_seed(5, 1));
}
