#include <algorithm>
#include <limits>
#include <numeric>

#include "algo_common.hpp"

namespace iemo {

namespace {

// Per-member secondary key: model utility or crowding distance, larger is better.
std::vector<double> secondary_keys(const Population& pop, const Fronts& fronts, const PreferenceModel* model) {
    std::vector<double> key(pop.size(), 0.0);
    if (model) {
        for (std::size_t i = 0; i < pop.size(); ++i) key[i] = model->score(pop.members[i].f);
        return key;
    }
    const auto objs = pop.objectives();
    for (const auto& front : fronts) {
        const auto cd = crowding_distance(objs, front);
        for (std::size_t q = 0; q < front.size(); ++q) key[front[q]] = cd[q];
    }
    return key;
}

}  // namespace

std::vector<std::size_t> nsga2_survivors(const Population& merged, std::size_t n, const PreferenceModel* model) {
    const auto fronts = fast_nondominated_sort(merged);
    std::vector<std::size_t> out;
    out.reserve(n);
    for (const auto& front : fronts) {
        if (out.size() + front.size() <= n) {
            out.insert(out.end(), front.begin(), front.end());
            if (out.size() == n) break;
            continue;
        }
        std::vector<double> key(front.size());
        if (model) {
            for (std::size_t q = 0; q < front.size(); ++q) key[q] = model->score(merged.members[front[q]].f);
        } else {
            key = crowding_distance(merged.objectives(), front);
        }
        const auto order = utility_truncation_order(key);
        for (std::size_t r = 0; out.size() < n; ++r) out.push_back(front[order[r]]);
        break;
    }
    return out;
}

Population insga2_generation(const Population& pop, const PreferenceModel* model, const ProblemSpec& problem,
                             const VariationConfig& variation, Rng& rng, std::size_t& fe) {
    const std::size_t n = pop.size();
    const auto fronts = fast_nondominated_sort(pop);
    std::vector<std::size_t> rank(n, 0);
    for (std::size_t r = 0; r < fronts.size(); ++r)
        for (std::size_t i : fronts[r]) rank[i] = r;
    const auto key = secondary_keys(pop, fronts, model);

    auto tournament = [&]() {
        const std::size_t a = detail::uniform_index(n, rng);
        const std::size_t b = detail::uniform_index(n, rng);
        if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
        if (key[a] != key[b]) return key[a] > key[b] ? a : b;
        return std::bernoulli_distribution(0.5)(rng) ? a : b;
    };

    Population merged;
    merged.capacity = 2 * n;
    merged.members = pop.members;
    while (merged.size() < 2 * n) {
        const auto& p1 = pop.members[tournament()].x;
        const auto& p2 = pop.members[tournament()].x;
        auto [c1, c2] = sbx_crossover(p1, p2, variation, problem.bounds, rng);
        merged.members.push_back(detail::make_solution(problem, polynomial_mutation(c1, variation, problem.bounds, rng), fe));
        if (merged.size() < 2 * n)
            merged.members.push_back(
                detail::make_solution(problem, polynomial_mutation(c2, variation, problem.bounds, rng), fe));
    }

    const auto survivors = nsga2_survivors(merged, n, model);
    Population next;
    next.capacity = pop.capacity;
    next.members.reserve(n);
    for (std::size_t i : survivors) next.members.push_back(std::move(merged.members[i]));
    return next;
}

}  // namespace iemo
