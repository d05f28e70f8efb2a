#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "iemo/evo.hpp"
#include "iemo/ltr.hpp"

namespace iemo {

using WeightVector = std::vector<double>;

struct WeightVectorSet {
    std::vector<WeightVector> vectors;

    std::size_t size() const noexcept { return vectors.size(); }
    std::size_t dim() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
};

struct ElicitationConfig {
    std::size_t mu{10};
    double eta_step{0.2};
    double lower{0.0};
    double upper{1.0};

    void validate() const;
};

/// Simplex lattice with denominator `divisions`: C(H+m-1, m-1) vectors.
WeightVectorSet das_dennis(std::size_t m, std::size_t divisions);

struct HarOptions {
    std::size_t burn_in{1000};
    std::size_t thinning{10};
};

/// Hit-and-run sampling of {w : sum w = 1, lower_j <= w_j <= upper_j}.
WeightVectorSet har_sample(std::size_t m, std::size_t count, std::span<const double> lower,
                           std::span<const double> upper, const HarOptions& options, std::uint64_t seed);
WeightVectorSet har_sample(std::size_t m, std::size_t count, std::uint64_t seed);

/// max_j w_j |f_j - z_j|
double tchebycheff(std::span<const double> f, std::span<const double> w, std::span<const double> z);

/// Index of the weight vector minimizing the solution's Tchebycheff value (lowest index on ties).
std::size_t closest_tchebycheff_weight(std::span<const double> f, const WeightVectorSet& weights,
                                       std::span<const double> z);

/// Moves the non-promising weight vectors toward the ones associated with the
/// model's top-mu solutions. `association[i]` is the weight index of pop member i.
WeightVectorSet adjust_weights(const WeightVectorSet& weights, const Population& pop, const PreferenceModel& model,
                               std::span<const std::size_t> association, const ElicitationConfig& cfg);

/// Same procedure driven by precomputed utilities (one per population member).
WeightVectorSet adjust_weights(const WeightVectorSet& weights, std::span<const double> utilities,
                               std::span<const std::size_t> association, const ElicitationConfig& cfg);

/// Indices of `utilities` ordered by descending utility, stable on ties.
std::vector<std::size_t> utility_truncation_order(std::span<const double> utilities);
std::vector<std::size_t> utility_truncation_order(std::span<const Solution> front, const PreferenceModel& model);

void write_weights_csv(std::ostream& out, const WeightVectorSet& weights);
WeightVectorSet read_weights_csv(std::istream& in);

}  // namespace iemo
