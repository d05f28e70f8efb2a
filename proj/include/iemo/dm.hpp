#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iemo/evo.hpp"
#include "iemo/ltr.hpp"

namespace iemo {

struct Judgment {
    int c{0};
    bool flipped{false};  // simulation metadata, never shown to the learner
};

using QueryPair = std::pair<std::size_t, std::size_t>;

/// Raised by a decision maker that cannot (or will no longer) answer.
class DecisionMakerAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Anything that answers pairwise queries: the simulated oracle or a human session.
class DecisionMaker {
public:
    virtual ~DecisionMaker() = default;

    virtual Judgment answer(std::span<const double> fi, std::span<const double> fj) = 0;

    /// One consultation: answers `pairs` over `candidates` in order. The default asks
    /// answer() once per pair; interactive adapters override it to block on a human.
    virtual std::vector<Judgment> consult(std::span<const ObjectiveVector> candidates,
                                          std::span<const QueryPair> pairs);
};

/// Artificial decision maker with golden value psi(f) = max_i |f_i - z*_i| / w*_i.
/// Finite kappa flips a strict judgment with probability exp(-kappa * |psi_j - psi_i|).
class DMOracle : public DecisionMaker {
public:
    static constexpr double noiseless = std::numeric_limits<double>::infinity();
    static constexpr double tie_tolerance = 1e-12;

    explicit DMOracle(ObjectiveVector w_star, double kappa = noiseless, std::uint64_t seed = 0);
    DMOracle(ObjectiveVector w_star, ObjectiveVector z_star, double kappa, std::uint64_t seed);

    const ObjectiveVector& w_star() const noexcept { return w_star_; }
    const ObjectiveVector& z_star() const noexcept { return z_star_; }
    double kappa() const noexcept { return kappa_; }

    double golden_value(std::span<const double> f) const;
    Judgment compare(std::span<const double> fi, std::span<const double> fj);
    Judgment answer(std::span<const double> fi, std::span<const double> fj) override { return compare(fi, fj); }

private:
    ObjectiveVector w_star_;
    ObjectiveVector z_star_;
    double kappa_;
    Rng rng_;
};

/// All ones.
ObjectiveVector equal_weight(std::size_t m);
/// Weight 5 on `preferred`, 1 elsewhere (used unnormalized in psi).
ObjectiveVector biased_weight(std::size_t m, std::size_t preferred);

/// Indices of the consultation candidates. With a model: top-mu distinct members by
/// utility. Without: farthest-point traversal over the nondomination fronts in
/// normalized objective space (see bootstrap_candidates).
std::vector<std::size_t> select_candidates(const Population& pop, const PreferenceModel* model, std::size_t mu);

/// First-consultation rule. Objective-space duplicates are dropped (first occurrence
/// kept), objectives are min-max normalized over the population, and members are
/// taken front by front: within a front the traversal starts at the member farthest
/// from the front's centroid and then repeatedly adds the member whose minimum
/// distance to everything already selected is largest. Ties go to the lower index.
std::vector<std::size_t> bootstrap_candidates(const Population& pop, std::size_t mu);

/// All C(k,2) pairs (i<j) in lexicographic order.
std::vector<QueryPair> enumerate_queries(std::size_t candidate_count);

}  // namespace iemo
