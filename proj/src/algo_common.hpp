#pragma once

#include <algorithm>
#include <random>

#include "iemo/algorithms.hpp"

namespace iemo::detail {

inline Solution make_solution(const ProblemSpec& problem, DecisionVector x, std::size_t& fe) {
    Solution s;
    s.f = evaluate(problem, x);
    s.x = std::move(x);
    ++fe;
    return s;
}

inline void update_ideal(ObjectiveVector& z, std::span<const double> f) {
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::min(z[j], f[j]);
}

inline std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace iemo::detail
