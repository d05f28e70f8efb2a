#include "iemo/evo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iemo {

std::vector<ObjectiveVector> Population::objectives() const {
    std::vector<ObjectiveVector> out;
    out.reserve(members.size());
    for (const auto& s : members) out.push_back(s.f);
    return out;
}

VariationConfig VariationConfig::defaults(std::size_t n) {
    VariationConfig cfg;
    cfg.p_m = n > 0 ? 1.0 / static_cast<double>(n) : 1.0;
    return cfg;
}

void VariationConfig::validate() const {
    if (!(p_c >= 0.0 && p_c <= 1.0)) throw std::invalid_argument("p_c must lie in [0,1]");
    if (!(p_m >= 0.0 && p_m <= 1.0)) throw std::invalid_argument("p_m must lie in [0,1]");
    if (!(eta_c > 0.0)) throw std::invalid_argument("eta_c must be positive");
    if (!(eta_m > 0.0)) throw std::invalid_argument("eta_m must be positive");
}

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dominates: objective vectors differ in length");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

Fronts fast_nondominated_sort(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> counter(n, 0);
    Fronts fronts;
    if (n == 0) return fronts;

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(objectives[p], objectives[q])) {
                dominated[p].push_back(q);
                ++counter[q];
            } else if (dominates(objectives[q], objectives[p])) {
                dominated[q].push_back(p);
                ++counter[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (counter[p] == 0) current.push_back(p);

    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated[p]) {
                if (--counter[q] == 0) next.push_back(q);
            }
        }
        fronts.push_back(std::move(current));
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

Fronts fast_nondominated_sort(const Population& pop) {
    return fast_nondominated_sort(pop.objectives());
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> objectives,
                                      std::span<const std::size_t> front) {
    const std::size_t size = front.size();
    std::vector<double> distance(size, 0.0);
    if (size <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    const std::size_t m = objectives[front[0]].size();
    std::vector<std::size_t> order(size);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objectives[front[a]][obj] < objectives[front[b]][obj];
        });
        const double lo = objectives[front[order.front()]][obj];
        const double hi = objectives[front[order.back()]][obj];
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        if (hi - lo <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < size; ++i) {
            distance[order[i]] +=
                (objectives[front[order[i + 1]]][obj] - objectives[front[order[i - 1]]][obj]) / (hi - lo);
        }
    }
    return distance;
}

std::pair<DecisionVector, DecisionVector> sbx_crossover(std::span<const double> p1, std::span<const double> p2,
                                                        const VariationConfig& cfg,
                                                        std::span<const Interval> bounds, Rng& rng) {
    if (p1.size() != p2.size() || p1.size() != bounds.size())
        throw DimensionError("sbx_crossover: parent and bound lengths differ");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DecisionVector c1(p1.begin(), p1.end());
    DecisionVector c2(p2.begin(), p2.end());
    if (unit(rng) > cfg.p_c) return {c1, c2};

    const double exponent = 1.0 / (cfg.eta_c + 1.0);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        if (unit(rng) > 0.5) continue;
        if (std::abs(p1[i] - p2[i]) <= 1e-14) continue;
        const double y1 = std::min(p1[i], p2[i]);
        const double y2 = std::max(p1[i], p2[i]);
        const double lb = bounds[i].lower;
        const double ub = bounds[i].upper;
        const double r = unit(rng);

        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(cfg.eta_c + 1.0));
            if (r <= 1.0 / alpha) return std::pow(r * alpha, exponent);
            return std::pow(1.0 / (2.0 - r * alpha), exponent);
        };
        const double betaq_low = spread(1.0 + 2.0 * (y1 - lb) / (y2 - y1));
        const double betaq_high = spread(1.0 + 2.0 * (ub - y2) / (y2 - y1));
        double a = 0.5 * ((y1 + y2) - betaq_low * (y2 - y1));
        double b = 0.5 * ((y1 + y2) + betaq_high * (y2 - y1));
        a = std::clamp(a, lb, ub);
        b = std::clamp(b, lb, ub);
        if (unit(rng) <= 0.5) std::swap(a, b);
        c1[i] = a;
        c2[i] = b;
    }
    return {c1, c2};
}

DecisionVector polynomial_mutation(std::span<const double> x, const VariationConfig& cfg,
                                   std::span<const Interval> bounds, Rng& rng) {
    if (x.size() != bounds.size()) throw DimensionError("polynomial_mutation: bound length differs");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DecisionVector y(x.begin(), x.end());
    const double power = 1.0 / (cfg.eta_m + 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (unit(rng) >= cfg.p_m) continue;
        const double lb = bounds[i].lower;
        const double ub = bounds[i].upper;
        if (ub - lb <= 0.0) continue;
        const double delta1 = (y[i] - lb) / (ub - lb);
        const double delta2 = (ub - y[i]) / (ub - lb);
        const double r = unit(rng);
        double deltaq = 0.0;
        if (r < 0.5) {
            const double xy = 1.0 - delta1;
            const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(xy, cfg.eta_m + 1.0);
            deltaq = std::pow(val, power) - 1.0;
        } else {
            const double xy = 1.0 - delta2;
            const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(xy, cfg.eta_m + 1.0);
            deltaq = 1.0 - std::pow(val, power);
        }
        y[i] = std::clamp(y[i] + deltaq * (ub - lb), lb, ub);
    }
    return y;
}

DecisionVector random_decision(const ProblemSpec& spec, Rng& rng) {
    DecisionVector x(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::uniform_real_distribution<double> dist(spec.bounds[i].lower, spec.bounds[i].upper);
        x[i] = dist(rng);
    }
    return x;
}

}  // namespace iemo
