#include "iemo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iemo {

double approx_error(std::span<const ObjectiveVector> points, std::span<const double> target) {
    if (points.empty()) throw std::invalid_argument("approx_error: empty population");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : points) {
        if (f.size() != target.size()) throw DimensionError("approx_error: dimension mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) s += (f[j] - target[j]) * (f[j] - target[j]);
        best = std::min(best, s);
    }
    return std::sqrt(best);
}

double approx_error(const Population& pop, std::span<const double> target) {
    return approx_error(pop.objectives(), target);
}

namespace {

double dcg(std::span<const double> relevance, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += (std::exp2(relevance[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    return s;
}

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Midranks of |values| (1-based), with the tie-group sizes.
std::vector<double> midranks(std::span<const double> values, std::vector<std::size_t>* ties = nullptr) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
        if (ties && j > i) ties->push_back(j - i + 1);
        i = j + 1;
    }
    return rank;
}

}  // namespace

double ndcg_at_k(std::span<const double> relevance, std::size_t k) {
    if (k == 0 || k > relevance.size()) throw std::invalid_argument("ndcg_at_k: k must lie in [1, list length]");
    std::vector<double> ideal(relevance.begin(), relevance.end());
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    const double idcg = dcg(ideal, k);
    if (idcg == 0.0) return 1.0;
    return dcg(relevance, k) / idcg;
}

double graded_relevance(std::size_t list_length, std::size_t true_rank) {
    if (true_rank < 1 || true_rank > list_length) throw std::out_of_range("graded_relevance: rank out of range");
    return static_cast<double>(list_length - true_rank);
}

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: samples differ in length");
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diff.push_back(a[i] - b[i]);
    const std::size_t n = diff.size();
    if (n == 0) return 1.0;

    std::vector<double> magnitude(n);
    for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(diff[i]);
    std::vector<std::size_t> ties;
    const auto rank = midranks(magnitude, &ties);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diff[i] > 0) w_plus += rank[i];

    if (n <= 12) {
        // Doubled midranks are integers; count sign assignments by their doubled W+.
        std::vector<std::size_t> r2(n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = static_cast<std::size_t>(std::llround(2.0 * rank[i]));
            total += r2[i];
        }
        std::vector<double> count(total + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t r : r2)
            for (std::size_t s = total; s >= r; --s) {
                count[s] += count[s - r];
                if (s == r) break;
            }
        const auto observed = static_cast<std::size_t>(std::llround(2.0 * w_plus));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            if (s <= observed) lower += count[s];
            if (s >= observed) upper += count[s];
        }
        const double all = std::ldexp(1.0, static_cast<int>(n));
        return std::min(1.0, 2.0 * std::min(lower, upper) / all);
    }

    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (std::size_t t : ties) {
        const double tt = static_cast<double>(t);
        var -= (tt * tt * tt - tt) / 48.0;
    }
    if (var <= 0.0) return 1.0;
    return std::min(1.0, normal_two_sided((w_plus - mu) / std::sqrt(var)));
}

double sign_test_less(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("sign_test_less: samples differ in length");
    std::size_t wins = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        ++n;
        if (a[i] < b[i]) ++wins;
    }
    if (n == 0) return 1.0;
    // P(X >= wins), X ~ Binomial(n, 1/2)
    double p = 0.0;
    double coef = 1.0;  // C(n, k)
    for (std::size_t k = 0; k <= n; ++k) {
        if (k >= wins) p += coef;
        coef = coef * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    return std::min(1.0, p / std::ldexp(1.0, static_cast<int>(n)));
}

double rank_sum_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("rank_sum_test: empty sample");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> ties;
    const auto rank = midranks(pooled, &ties);
    double r1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r1 += rank[i];
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;
    const double u = r1 - n1 * (n1 + 1.0) / 2.0;
    double tie_term = 0.0;
    for (std::size_t t : ties) {
        const double tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;
    return std::min(1.0, normal_two_sided((u - n1 * n2 / 2.0) / std::sqrt(var)));
}

std::string to_string(EffectMagnitude magnitude) {
    switch (magnitude) {
        case EffectMagnitude::negligible: return "negligible";
        case EffectMagnitude::small: return "small";
        case EffectMagnitude::medium: return "medium";
        case EffectMagnitude::large: return "large";
    }
    return "unknown";
}

EffectSize a12(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("a12: empty sample");
    double wins = 0.0;
    for (double x : a)
        for (double y : b) {
            if (x < y) wins += 1.0;
            else if (x == y) wins += 0.5;
        }
    EffectSize e;
    e.value = wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    const double gap = std::abs(e.value - 0.5) + 1e-12;
    if (gap >= 0.21) e.magnitude = EffectMagnitude::large;
    else if (gap >= 0.14) e.magnitude = EffectMagnitude::medium;
    else if (gap >= 0.06) e.magnitude = EffectMagnitude::small;
    return e;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0,1]");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

void split(const std::vector<const MetricSample*>& groups, std::size_t lo, std::size_t hi, double alpha,
           std::vector<std::size_t>& cuts) {
    if (hi - lo < 2) return;
    std::vector<double> all;
    for (std::size_t g = lo; g < hi; ++g) all.insert(all.end(), groups[g]->values.begin(), groups[g]->values.end());
    const double grand = mean(all);

    std::size_t best_cut = lo;
    double best_ss = -1.0;
    for (std::size_t cut = lo + 1; cut < hi; ++cut) {
        double s1 = 0.0, s2 = 0.0;
        std::size_t n1 = 0, n2 = 0;
        for (std::size_t g = lo; g < hi; ++g)
            for (double v : groups[g]->values) {
                if (g < cut) { s1 += v; ++n1; }
                else { s2 += v; ++n2; }
            }
        const double m1 = s1 / static_cast<double>(n1);
        const double m2 = s2 / static_cast<double>(n2);
        const double ss = static_cast<double>(n1) * (m1 - grand) * (m1 - grand) +
                          static_cast<double>(n2) * (m2 - grand) * (m2 - grand);
        if (ss > best_ss) {
            best_ss = ss;
            best_cut = cut;
        }
    }

    std::vector<double> left, right;
    for (std::size_t g = lo; g < hi; ++g) {
        auto& dst = g < best_cut ? left : right;
        dst.insert(dst.end(), groups[g]->values.begin(), groups[g]->values.end());
    }
    const bool significant = rank_sum_test(left, right) < alpha;
    const bool meaningful = a12(left, right).magnitude != EffectMagnitude::negligible;
    if (!(significant && meaningful)) return;
    cuts.push_back(best_cut);
    split(groups, lo, best_cut, alpha, cuts);
    split(groups, best_cut, hi, alpha, cuts);
}

}  // namespace

std::vector<ScottKnottGroup> scott_knott(std::span<const MetricSample> samples, double alpha) {
    std::vector<const MetricSample*> groups;
    for (const auto& s : samples) {
        if (s.values.empty()) throw std::invalid_argument("scott_knott: empty sample '" + s.label + "'");
        groups.push_back(&s);
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const MetricSample* a, const MetricSample* b) { return mean(a->values) < mean(b->values); });
    std::vector<std::size_t> cuts;
    split(groups, 0, groups.size(), alpha, cuts);
    std::sort(cuts.begin(), cuts.end());

    std::vector<ScottKnottGroup> out;
    int rank = 1;
    std::size_t next_cut = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        while (next_cut < cuts.size() && cuts[next_cut] == g) {
            ++rank;
            ++next_cut;
        }
        out.push_back({groups[g]->label, mean(groups[g]->values), rank});
    }
    return out;
}

}  // namespace iemo
