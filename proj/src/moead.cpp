#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "algo_common.hpp"

namespace iemo {

Neighborhoods weight_neighborhoods(const WeightVectorSet& weights, std::size_t T) {
    const std::size_t n = weights.size();
    T = std::min(T, n);
    Neighborhoods out(n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < weights.dim(); ++j) {
                const double d = weights.vectors[i][j] - weights.vectors[k][j];
                s += d * d;
            }
            dist[k] = {s, k};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(T), dist.end());
        out[i].reserve(T);
        for (std::size_t t = 0; t < T; ++t) out[i].push_back(dist[t].second);
    }
    return out;
}

void imoead_generation(Population& pop, MoeadState& state, const MoeadConfig& cfg, const ProblemSpec& problem,
                       const VariationConfig& variation, Rng& rng, std::size_t& fe) {
    const std::size_t n = pop.size();
    if (state.weights.size() != n || state.neighborhoods.size() != n)
        throw std::invalid_argument("imoead_generation: weights, neighborhoods and population differ in size");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    for (std::size_t i = 0; i < n; ++i) {
        const bool local = unit(rng) < cfg.delta_nb;
        std::vector<std::size_t> pool = local ? state.neighborhoods[i] : all;
        if (pool.size() < 2) pool = all;

        const std::size_t a = pool[detail::uniform_index(pool.size(), rng)];
        std::size_t b = pool[detail::uniform_index(pool.size(), rng)];
        while (b == a && n > 1) b = pool[detail::uniform_index(pool.size(), rng)];
        auto children = sbx_crossover(pop.members[a].x, pop.members[b].x, variation, problem.bounds, rng);
        Solution child =
            detail::make_solution(problem, polynomial_mutation(children.first, variation, problem.bounds, rng), fe);
        detail::update_ideal(state.z, child.f);

        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t replaced = 0;
        for (std::size_t k : pool) {
            if (replaced >= cfg.replacement_cap) break;
            const auto& w = state.weights.vectors[k];
            if (tchebycheff(child.f, w, state.z) < tchebycheff(pop.members[k].f, w, state.z)) {
                pop.members[k].x = child.x;
                pop.members[k].f = child.f;
                ++replaced;
            }
        }
    }
}

}  // namespace iemo
