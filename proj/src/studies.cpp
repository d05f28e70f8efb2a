#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "iemo/dm.hpp"
#include "iemo/harness.hpp"
#include "iemo/seed.hpp"

namespace iemo {

std::vector<ObjectiveVector> working_example_points() {
    return {{0.167, 0.167, 0.167}, {0.2, 0.15, 0.15}, {0.3, 0.1, 0.1}, {0.4, 0.05, 0.05}};
}

std::vector<ComparisonRecord> working_example_records() {
    const auto x = working_example_points();
    return {{x[0], x[1], 1}, {x[0], x[2], 1}, {x[1], x[3], 1}};
}

WorkingExampleResult working_example_study(std::size_t initializations, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto points = working_example_points();
    const auto records = working_example_records();
    WorkingExampleResult out;
    out.initializations = initializations;
    for (std::size_t i = 0; i < initializations; ++i) {
        TrainConfig tc;
        tc.init_seed = derive_seed(seed, i);
        const auto model = train(records, 3, tc);
        std::vector<double> u;
        for (const auto& p : points) u.push_back(model.score(p));
        if (u[0] > u[1] && u[1] > u[2] && u[2] > u[3]) ++out.ordered;
        out.scores.push_back(std::move(u));
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

namespace {

double ndcg_once(std::size_t m, const NdcgSettings& s, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ObjectiveVector> set(s.set_size, ObjectiveVector(m));
    for (auto& f : set)
        for (auto& v : f) v = unit(rng);

    DMOracle oracle(equal_weight(m));
    std::uniform_int_distribution<std::size_t> pick(0, s.set_size - 1);
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::vector<ComparisonRecord> records;
    while (records.size() < s.pairs) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        if (i == j || !used.insert({std::min(i, j), std::max(i, j)}).second) continue;
        records.push_back({set[i], set[j], oracle.compare(set[i], set[j]).c});
    }

    TrainConfig tc;
    tc.init_seed = derive_seed(seed, 1);
    tc.allow_all_indifferent = true;
    const auto model = train(records, m, tc);

    const std::size_t L = s.set_size;
    std::vector<std::size_t> truth(L), predicted(L);
    std::iota(truth.begin(), truth.end(), 0);
    std::iota(predicted.begin(), predicted.end(), 0);
    std::vector<double> psi(L), u(L);
    for (std::size_t i = 0; i < L; ++i) {
        psi[i] = oracle.golden_value(set[i]);
        u[i] = model.score(set[i]);
    }
    std::stable_sort(truth.begin(), truth.end(), [&](std::size_t a, std::size_t b) { return psi[a] < psi[b]; });
    std::stable_sort(predicted.begin(), predicted.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    std::vector<std::size_t> true_rank(L);
    for (std::size_t r = 0; r < L; ++r) true_rank[truth[r]] = r + 1;
    std::vector<double> relevance(L);
    for (std::size_t r = 0; r < L; ++r) relevance[r] = graded_relevance(L, true_rank[predicted[r]]);
    return ndcg_at_k(relevance, s.k);
}

}  // namespace

std::vector<NdcgRow> ndcg_study(const NdcgSettings& settings, std::size_t replications, std::uint64_t seed) {
    if (replications < 1) throw std::invalid_argument("ndcg_study: replications must be at least 1");
    if (settings.k < 1 || settings.k > settings.set_size) throw std::invalid_argument("ndcg_study: k out of range");
    if (settings.pairs > settings.set_size * (settings.set_size - 1) / 2)
        throw std::invalid_argument("ndcg_study: more pairs than the set provides");
    std::vector<NdcgRow> rows;
    for (std::size_t m : settings.m_list) {
        NdcgRow row;
        row.m = m;
        for (std::size_t rep = 0; rep < replications; ++rep) row.values.push_back(ndcg_once(m, settings, derive_seed(seed, m, rep)));
        row.median = median(row.values);
        row.q1 = quantile(row.values, 0.25);
        row.q3 = quantile(row.values, 0.75);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace iemo
