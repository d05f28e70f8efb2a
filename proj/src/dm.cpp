#include "iemo/dm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace iemo {

std::vector<Judgment> DecisionMaker::consult(std::span<const ObjectiveVector> candidates,
                                             std::span<const QueryPair> pairs) {
    std::vector<Judgment> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) out.push_back(answer(candidates[i], candidates[j]));
    return out;
}

DMOracle::DMOracle(ObjectiveVector w_star, double kappa, std::uint64_t seed)
    : DMOracle(w_star, ObjectiveVector(w_star.size(), 0.0), kappa, seed) {}

DMOracle::DMOracle(ObjectiveVector w_star, ObjectiveVector z_star, double kappa, std::uint64_t seed)
    : w_star_(std::move(w_star)), z_star_(std::move(z_star)), kappa_(kappa), rng_(seed) {
    if (w_star_.empty()) throw std::invalid_argument("DMOracle: empty utopia weight");
    for (double w : w_star_)
        if (!(w > 0.0)) throw std::invalid_argument("DMOracle: utopia weight entries must be positive");
    if (z_star_.size() != w_star_.size()) throw DimensionError("DMOracle: z* and w* differ in length");
    if (!(kappa_ > 0.0)) throw std::invalid_argument("DMOracle: kappa must be positive");
}

double DMOracle::golden_value(std::span<const double> f) const {
    if (f.size() != w_star_.size()) throw DimensionError("golden_value: dimension mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) v = std::max(v, std::abs(f[i] - z_star_[i]) / w_star_[i]);
    return v;
}

Judgment DMOracle::compare(std::span<const double> fi, std::span<const double> fj) {
    const double psi_i = golden_value(fi);
    const double psi_j = golden_value(fj);
    const double delta = std::abs(psi_j - psi_i);
    Judgment j;
    if (delta <= tie_tolerance) return j;
    j.c = psi_i < psi_j ? 1 : -1;
    if (std::isfinite(kappa_)) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng_) < std::exp(-kappa_ * delta)) {
            j.c = -j.c;
            j.flipped = true;
        }
    }
    return j;
}

ObjectiveVector equal_weight(std::size_t m) { return ObjectiveVector(m, 1.0); }

ObjectiveVector biased_weight(std::size_t m, std::size_t preferred) {
    if (preferred >= m) throw std::out_of_range("biased_weight: preferred objective out of range");
    ObjectiveVector w(m, 1.0);
    w[preferred] = 5.0;
    return w;
}

namespace {

std::vector<std::size_t> distinct_members(const Population& pop) {
    std::set<ObjectiveVector> seen;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (seen.insert(pop.members[i].f).second) out.push_back(i);
    return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

}  // namespace

std::vector<std::size_t> bootstrap_candidates(const Population& pop, std::size_t mu) {
    const auto distinct = distinct_members(pop);
    if (distinct.empty()) return {};
    const std::size_t m = pop.members[distinct.front()].f.size();

    std::vector<ObjectiveVector> objs;
    for (std::size_t i : distinct) objs.push_back(pop.members[i].f);
    const auto norm = Normalization::from_bounds(objs);
    std::vector<ObjectiveVector> scaled(objs.size(), ObjectiveVector(m));
    for (std::size_t i = 0; i < objs.size(); ++i) norm.apply(objs[i], scaled[i]);

    std::vector<std::size_t> chosen;  // positions into `distinct`
    const auto fronts = fast_nondominated_sort(objs);
    for (const auto& front : fronts) {
        if (chosen.size() >= mu) break;
        std::vector<bool> taken(front.size(), false);

        ObjectiveVector centroid(m, 0.0);
        for (std::size_t p : front)
            for (std::size_t k = 0; k < m; ++k) centroid[k] += scaled[p][k] / static_cast<double>(front.size());
        std::size_t start = 0;
        double far = -1.0;
        for (std::size_t q = 0; q < front.size(); ++q) {
            const double d = distance(scaled[front[q]], centroid);
            if (d > far) {
                far = d;
                start = q;
            }
        }

        // Within this front, distances are measured to everything selected so far.
        std::vector<double> min_dist(front.size(), std::numeric_limits<double>::infinity());
        for (std::size_t c : chosen)
            for (std::size_t q = 0; q < front.size(); ++q)
                min_dist[q] = std::min(min_dist[q], distance(scaled[front[q]], scaled[c]));

        std::size_t next = chosen.empty() ? start : front.size();
        if (next == front.size()) {
            double best = -1.0;
            for (std::size_t q = 0; q < front.size(); ++q) {
                if (min_dist[q] > best) {
                    best = min_dist[q];
                    next = q;
                }
            }
        }
        while (chosen.size() < mu && next < front.size()) {
            taken[next] = true;
            chosen.push_back(front[next]);
            for (std::size_t q = 0; q < front.size(); ++q)
                min_dist[q] = std::min(min_dist[q], distance(scaled[front[q]], scaled[front[next]]));
            next = front.size();
            double best = -1.0;
            for (std::size_t q = 0; q < front.size(); ++q) {
                if (!taken[q] && min_dist[q] > best) {
                    best = min_dist[q];
                    next = q;
                }
            }
        }
    }

    std::vector<std::size_t> out;
    out.reserve(chosen.size());
    for (std::size_t c : chosen) out.push_back(distinct[c]);
    return out;
}

std::vector<std::size_t> select_candidates(const Population& pop, const PreferenceModel* model, std::size_t mu) {
    if (!model) return bootstrap_candidates(pop, mu);
    const auto distinct = distinct_members(pop);
    std::vector<double> u;
    u.reserve(distinct.size());
    for (std::size_t i : distinct) u.push_back(model->score(pop.members[i].f));
    std::vector<std::size_t> order(distinct.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < std::min(mu, order.size()); ++r) out.push_back(distinct[order[r]]);
    return out;
}

std::vector<QueryPair> enumerate_queries(std::size_t candidate_count) {
    if (candidate_count < 2) throw std::invalid_argument("enumerate_queries: need at least two candidates");
    std::vector<QueryPair> pairs;
    pairs.reserve(candidate_count * (candidate_count - 1) / 2);
    for (std::size_t i = 0; i < candidate_count; ++i)
        for (std::size_t j = i + 1; j < candidate_count; ++j) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace iemo
