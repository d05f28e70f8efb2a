#include "iemo/elicitation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "iemo/log.hpp"

namespace iemo {

void ElicitationConfig::validate() const {
    if (mu == 0) throw std::invalid_argument("mu must be at least 1");
    if (!(eta_step >= 0.0 && eta_step <= 1.0)) throw std::invalid_argument("eta_step must lie in [0,1]");
    if (!(lower <= upper)) throw std::invalid_argument("weight bounds are empty");
}

namespace {

void lattice(std::size_t m, std::size_t divisions, std::size_t left, std::vector<std::size_t>& current,
             WeightVectorSet& out) {
    if (current.size() + 1 == m) {
        current.push_back(left);
        WeightVector w(m);
        for (std::size_t i = 0; i < m; ++i) w[i] = static_cast<double>(current[i]) / static_cast<double>(divisions);
        out.vectors.push_back(std::move(w));
        current.pop_back();
        return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
        current.push_back(k);
        lattice(m, divisions, left - k, current, out);
        current.pop_back();
    }
}

void renormalize(WeightVector& w) {
    double sum = 0.0;
    bool negative = false;
    for (double v : w) {
        negative = negative || v < 0.0;
        sum += v;
    }
    if (!negative && std::abs(sum - 1.0) <= 1e-12) return;
    sum = 0.0;
    for (auto& v : w) {
        v = std::max(v, 0.0);
        sum += v;
    }
    if (sum <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return;
    }
    for (auto& v : w) v /= sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

WeightVectorSet das_dennis(std::size_t m, std::size_t divisions) {
    if (m < 1) throw std::invalid_argument("das_dennis: m must be positive");
    if (divisions < 1) throw std::invalid_argument("das_dennis: divisions must be at least 1");
    WeightVectorSet out;
    std::vector<std::size_t> current;
    lattice(m, divisions, divisions, current, out);
    return out;
}

WeightVectorSet har_sample(std::size_t m, std::size_t count, std::uint64_t seed) {
    const std::vector<double> lower(m, 0.0);
    const std::vector<double> upper(m, 1.0);
    return har_sample(m, count, lower, upper, HarOptions{}, seed);
}

WeightVectorSet har_sample(std::size_t m, std::size_t count, std::span<const double> lower,
                           std::span<const double> upper, const HarOptions& options, std::uint64_t seed) {
    if (m < 2) throw std::invalid_argument("har_sample: m must be at least 2");
    if (lower.size() != m || upper.size() != m) throw DimensionError("har_sample: bounds must have length m");
    double sum_lower = 0.0;
    double sum_span = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (lower[j] > upper[j]) throw std::invalid_argument("har_sample: infeasible bounds (lower > upper)");
        sum_lower += lower[j];
        sum_span += upper[j] - lower[j];
    }
    if (sum_lower > 1.0 + 1e-12 || sum_lower + sum_span < 1.0 - 1e-12)
        throw std::invalid_argument("har_sample: bounds do not intersect the simplex");

    // Interior-ish start: distribute the remaining mass proportionally to each span.
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j)
        w[j] = lower[j] + (sum_span > 0.0 ? (1.0 - sum_lower) * (upper[j] - lower[j]) / sum_span : 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> d(m);

    auto step = [&] {
        double mean = 0.0;
        for (auto& v : d) {
            v = normal(rng);
            mean += v;
        }
        mean /= static_cast<double>(m);
        double norm = 0.0;
        for (auto& v : d) {
            v -= mean;
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return;
        for (auto& v : d) v /= norm;

        double t_min = -std::numeric_limits<double>::infinity();
        double t_max = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            if (std::abs(d[j]) < 1e-15) continue;
            const double a = (lower[j] - w[j]) / d[j];
            const double b = (upper[j] - w[j]) / d[j];
            t_min = std::max(t_min, std::min(a, b));
            t_max = std::min(t_max, std::max(a, b));
        }
        if (!(t_max > t_min)) return;
        const double t = t_min + (t_max - t_min) * unit(rng);
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            w[j] = std::clamp(w[j] + t * d[j], lower[j], upper[j]);
            sum += w[j];
        }
        // Remove floating-point drift off the hyperplane.
        const double shift = (sum - 1.0) / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) w[j] = std::clamp(w[j] - shift, lower[j], upper[j]);
    };

    for (std::size_t i = 0; i < options.burn_in; ++i) step();
    WeightVectorSet out;
    out.vectors.reserve(count);
    const std::size_t thin = std::max<std::size_t>(1, options.thinning);
    while (out.vectors.size() < count) {
        for (std::size_t i = 0; i < thin; ++i) step();
        out.vectors.push_back(w);
    }
    return out;
}

double tchebycheff(std::span<const double> f, std::span<const double> w, std::span<const double> z) {
    if (f.size() != w.size() || f.size() != z.size()) throw DimensionError("tchebycheff: length mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < f.size(); ++j) best = std::max(best, w[j] * std::abs(f[j] - z[j]));
    return best;
}

std::size_t closest_tchebycheff_weight(std::span<const double> f, const WeightVectorSet& weights,
                                       std::span<const double> z) {
    if (weights.vectors.empty()) throw std::invalid_argument("closest_tchebycheff_weight: no weights");
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double v = tchebycheff(f, weights.vectors[k], z);
        if (v < best_value) {
            best_value = v;
            best = k;
        }
    }
    return best;
}

std::vector<std::size_t> utility_truncation_order(std::span<const double> utilities) {
    std::vector<std::size_t> order(utilities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return utilities[a] > utilities[b]; });
    return order;
}

std::vector<std::size_t> utility_truncation_order(std::span<const Solution> front, const PreferenceModel& model) {
    if (front.empty()) throw std::invalid_argument("utility_truncation_order: empty front");
    std::vector<double> u;
    u.reserve(front.size());
    for (const auto& s : front) u.push_back(model.score(s.f));
    return utility_truncation_order(u);
}

WeightVectorSet adjust_weights(const WeightVectorSet& weights, const Population& pop, const PreferenceModel& model,
                               std::span<const std::size_t> association, const ElicitationConfig& cfg) {
    std::vector<double> utilities;
    utilities.reserve(pop.size());
    for (const auto& s : pop.members) utilities.push_back(model.score(s.f));
    return adjust_weights(weights, utilities, association, cfg);
}

WeightVectorSet adjust_weights(const WeightVectorSet& weights, std::span<const double> utilities,
                               std::span<const std::size_t> association, const ElicitationConfig& cfg) {
    cfg.validate();
    if (association.size() != utilities.size())
        throw DimensionError("adjust_weights: association must map every population member");
    if (utilities.empty()) throw std::invalid_argument("adjust_weights: empty population");
    const std::size_t n_weights = weights.size();
    for (std::size_t a : association)
        if (a >= n_weights) throw std::out_of_range("adjust_weights: association index out of range");

    std::size_t mu = cfg.mu;
    if (mu > utilities.size()) {
        log::warning("adjust_weights: mu exceeds the population size; clamping to " +
                     std::to_string(utilities.size()));
        mu = utilities.size();
    }

    // Steps 1-2: promising weight vectors in priority (descending utility) order.
    const auto order = utility_truncation_order(utilities);
    std::vector<std::size_t> promising;
    for (std::size_t r = 0; r < mu; ++r) {
        const std::size_t k = association[order[r]];
        const bool seen = std::any_of(promising.begin(), promising.end(), [&](std::size_t p) {
            return p == k || weights.vectors[p] == weights.vectors[k];
        });
        if (!seen) promising.push_back(k);
    }
    const std::size_t mu_prime = promising.size();

    WeightVectorSet out = weights;
    std::vector<bool> available(n_weights, true);
    for (std::size_t p : promising) available[p] = false;
    const std::size_t per_attractor = (n_weights - mu_prime + mu_prime - 1) / mu_prime;

    // Step 3: each promising vector attracts its nearest still-available companions.
    for (std::size_t p : promising) {
        const auto& attractor = weights.vectors[p];
        std::vector<std::pair<double, std::size_t>> candidates;
        for (std::size_t k = 0; k < n_weights; ++k)
            if (available[k]) candidates.emplace_back(squared_distance(weights.vectors[k], attractor), k);
        const std::size_t take = std::min(per_attractor, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end());
        for (std::size_t c = 0; c < take; ++c) {
            const std::size_t k = candidates[c].second;
            auto& w = out.vectors[k];
            // w + eta (a - w), written so that eta = 0 and eta = 1 are exact.
            for (std::size_t j = 0; j < w.size(); ++j) w[j] = (1.0 - cfg.eta_step) * w[j] + cfg.eta_step * attractor[j];
            available[k] = false;
        }
    }

    // Step 4: project back onto the simplex.
    for (auto& w : out.vectors) renormalize(w);
    return out;
}

void write_weights_csv(std::ostream& out, const WeightVectorSet& weights) {
    const std::size_t m = weights.dim();
    for (std::size_t j = 0; j < m; ++j) out << (j ? "," : "") << "w" << (j + 1);
    out << '\n';
    out.precision(17);
    for (const auto& w : weights.vectors) {
        for (std::size_t j = 0; j < w.size(); ++j) out << (j ? "," : "") << w[j];
        out << '\n';
    }
}

WeightVectorSet read_weights_csv(std::istream& in) {
    WeightVectorSet out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.front() == 'w') continue;
        }
        WeightVector w;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) w.push_back(std::stod(cell));
        if (!out.vectors.empty() && w.size() != out.dim()) throw DimensionError("read_weights_csv: ragged rows");
        out.vectors.push_back(std::move(w));
    }
    return out;
}

}  // namespace iemo
