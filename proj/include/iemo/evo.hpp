#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "iemo/problems.hpp"

namespace iemo {

using Rng = std::mt19937_64;

struct Solution {
    DecisionVector x;
    ObjectiveVector f;
    std::optional<double> utility;      // last preference-model score
    std::optional<std::size_t> rank;    // nondomination front index
};

struct Population {
    std::vector<Solution> members;
    std::size_t capacity{0};

    std::size_t size() const noexcept { return members.size(); }
    std::vector<ObjectiveVector> objectives() const;
};

struct VariationConfig {
    double p_c{1.0};
    double eta_c{30.0};
    double p_m{0.1};
    double eta_m{20.0};

    /// p_c = 1, eta_c = 30, p_m = 1/n, eta_m = 20.
    static VariationConfig defaults(std::size_t n);
    void validate() const;
};

/// a <= b componentwise and a != b (minimization).
bool dominates(std::span<const double> a, std::span<const double> b);

using Fronts = std::vector<std::vector<std::size_t>>;

/// Deb's fast nondominated sort. Each front lists member indices in input order.
Fronts fast_nondominated_sort(std::span<const ObjectiveVector> objectives);
Fronts fast_nondominated_sort(const Population& pop);

/// NSGA-II crowding distance for the members listed in `front`.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> objectives,
                                      std::span<const std::size_t> front);

std::pair<DecisionVector, DecisionVector> sbx_crossover(std::span<const double> p1, std::span<const double> p2,
                                                        const VariationConfig& cfg,
                                                        std::span<const Interval> bounds, Rng& rng);

DecisionVector polynomial_mutation(std::span<const double> x, const VariationConfig& cfg,
                                   std::span<const Interval> bounds, Rng& rng);

DecisionVector random_decision(const ProblemSpec& spec, Rng& rng);

}  // namespace iemo
