#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "algo_common.hpp"

namespace iemo {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                  std::span<const double> z) {
    if (points.empty()) throw std::invalid_argument("R2: empty point set");
    if (weights.size() == 0) throw std::invalid_argument("R2: empty weight set");
    if (weights.dim() != z.size() || points.front().size() != z.size()) throw DimensionError("R2: dimension mismatch");
}

// Tracks, per weight, the best and second-best alive point so leave-one-out
// contributions are exact and cheap to maintain under deletions.
class R2Tracker {
public:
    R2Tracker(std::span<const ObjectiveVector> points, const WeightVectorSet& weights, std::span<const double> z)
        : n_(points.size()), nw_(weights.size()), g_(nw_ * n_), alive_(n_, true), best_(nw_), second_(nw_) {
        for (std::size_t k = 0; k < nw_; ++k)
            for (std::size_t a = 0; a < n_; ++a) g_[k * n_ + a] = tchebycheff(points[a], weights.vectors[k], z);
        for (std::size_t k = 0; k < nw_; ++k) rescan(k);
    }

    std::vector<double> contributions() const {
        std::vector<double> c(n_, 0.0);
        for (std::size_t k = 0; k < nw_; ++k) {
            if (best_[k] == none) continue;
            const double second = second_[k] == none ? inf : g(k, second_[k]);
            c[best_[k]] += (second - g(k, best_[k])) / static_cast<double>(nw_);
        }
        return c;
    }

    void remove(std::size_t a) {
        alive_[a] = false;
        for (std::size_t k = 0; k < nw_; ++k)
            if (best_[k] == a || second_[k] == a) rescan(k);
    }

    bool alive(std::size_t a) const { return alive_[a]; }

private:
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    double g(std::size_t k, std::size_t a) const { return g_[k * n_ + a]; }

    void rescan(std::size_t k) {
        best_[k] = none;
        second_[k] = none;
        for (std::size_t a = 0; a < n_; ++a) {
            if (!alive_[a]) continue;
            if (best_[k] == none || g(k, a) < g(k, best_[k])) {
                second_[k] = best_[k];
                best_[k] = a;
            } else if (second_[k] == none || g(k, a) < g(k, second_[k])) {
                second_[k] = a;
            }
        }
    }

    std::size_t n_;
    std::size_t nw_;
    std::vector<double> g_;
    std::vector<bool> alive_;
    std::vector<std::size_t> best_;
    std::vector<std::size_t> second_;
};

}  // namespace

double r2_indicator(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                    std::span<const double> z) {
    check_inputs(points, weights, z);
    double sum = 0.0;
    for (const auto& w : weights.vectors) {
        double best = inf;
        for (const auto& a : points) best = std::min(best, tchebycheff(a, w, z));
        sum += best;
    }
    return sum / static_cast<double>(weights.size());
}

std::vector<double> r2_contributions(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                                     std::span<const double> z) {
    check_inputs(points, weights, z);
    return R2Tracker(points, weights, z).contributions();
}

std::vector<std::size_t> r2_survivors(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                                      std::span<const double> z, std::size_t n) {
    check_inputs(points, weights, z);
    R2Tracker tracker(points, weights, z);
    for (std::size_t alive = points.size(); alive > n; --alive) {
        const auto c = tracker.contributions();
        std::size_t victim = points.size();
        for (std::size_t a = 0; a < points.size(); ++a)
            if (tracker.alive(a) && (victim == points.size() || c[a] < c[victim])) victim = a;
        tracker.remove(victim);
    }
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < points.size(); ++a)
        if (tracker.alive(a)) out.push_back(a);
    return out;
}

void ir2ibea_generation(Population& pop, const WeightVectorSet& weights, ObjectiveVector& z,
                        const ProblemSpec& problem, const VariationConfig& variation, Rng& rng, std::size_t& fe) {
    const std::size_t n = pop.size();
    const auto fitness = r2_contributions(pop.objectives(), weights, z);
    auto tournament = [&]() {
        const std::size_t a = detail::uniform_index(n, rng);
        const std::size_t b = detail::uniform_index(n, rng);
        if (fitness[a] != fitness[b]) return fitness[a] > fitness[b] ? a : b;
        return std::bernoulli_distribution(0.5)(rng) ? a : b;
    };

    std::vector<Solution> offspring;
    offspring.reserve(n);
    while (offspring.size() < n) {
        const auto& p1 = pop.members[tournament()].x;
        const auto& p2 = pop.members[tournament()].x;
        auto [c1, c2] = sbx_crossover(p1, p2, variation, problem.bounds, rng);
        offspring.push_back(detail::make_solution(problem, polynomial_mutation(c1, variation, problem.bounds, rng), fe));
        if (offspring.size() < n)
            offspring.push_back(
                detail::make_solution(problem, polynomial_mutation(c2, variation, problem.bounds, rng), fe));
    }
    for (const auto& s : offspring) detail::update_ideal(z, s.f);

    // Dominated members are listed first so that zero-contribution ties fall on them.
    std::vector<Solution> merged = std::move(pop.members);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    std::vector<ObjectiveVector> objs;
    objs.reserve(merged.size());
    for (const auto& s : merged) objs.push_back(s.f);
    const auto fronts = fast_nondominated_sort(objs);
    std::vector<std::size_t> order;
    order.reserve(merged.size());
    for (auto it = fronts.rbegin(); it != fronts.rend(); ++it) order.insert(order.end(), it->begin(), it->end());
    std::vector<ObjectiveVector> ordered;
    ordered.reserve(order.size());
    for (std::size_t i : order) ordered.push_back(objs[i]);

    const auto keep = r2_survivors(ordered, weights, z, n);
    std::vector<std::size_t> keep_merged;
    keep_merged.reserve(keep.size());
    for (std::size_t k : keep) keep_merged.push_back(order[k]);
    std::sort(keep_merged.begin(), keep_merged.end());
    pop.members.clear();
    for (std::size_t i : keep_merged) pop.members.push_back(std::move(merged[i]));
}

}  // namespace iemo
