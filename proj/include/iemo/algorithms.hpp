#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iemo/dm.hpp"
#include "iemo/elicitation.hpp"
#include "iemo/evo.hpp"
#include "iemo/ltr.hpp"
#include "iemo/problems.hpp"

namespace iemo {

enum class Algorithm { insga2, imoead, ir2ibea };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct MoeadConfig {
    std::size_t neighborhood{20};  // capped at N
    double delta_nb{0.9};
    std::size_t replacement_cap{2};
};

struct RunConfig {
    Algorithm algorithm{Algorithm::insga2};
    ProblemSpec problem;
    std::size_t N{100};
    std::size_t max_fe{30000};
    std::size_t tau{10};
    std::size_t warmup_gens{30};
    ElicitationConfig elicitation;
    VariationConfig variation;
    TrainConfig train;
    MoeadConfig moead;
    /// Retraining uses the cumulative judgments whose objective vectors fall inside the
    /// current population's bounding box widened by this many box widths on each side.
    double record_margin{2.0};
    std::uint64_t seed{1};
    bool guidance{true};  // false runs the vanilla baseline with no consultations

    /// N from the objective count (100 up to m=5, 120 for m=8, 220 for m=10, else 100),
    /// max_fe = 300 N, tau = 10, warmup = 3 tau, mu = 10, eta_step = 0.2.
    static RunConfig defaults(Algorithm algorithm, const ProblemSpec& problem);
    static std::size_t default_population(std::size_t m);

    void validate() const;
};

struct Consultation {
    std::size_t generation{0};
    std::size_t fe{0};
    std::vector<ComparisonRecord> records;
    std::vector<bool> flipped;
};

struct GenerationTrace {
    std::size_t generation{0};
    std::size_t fe{0};
    bool consulted{false};
    std::optional<double> best_psi;
    std::optional<double> error;
};

struct RunResult {
    Population final_population;
    std::vector<Consultation> consultation_log;
    std::vector<GenerationTrace> trajectory;
    std::size_t fe_used{0};
    std::size_t generations{0};
    std::uint64_t seed{0};
    std::optional<PreferenceModel> model;
    WeightVectorSet weights;  // final (possibly adjusted) weights; empty for I-NSGA-II
    bool aborted{false};
    std::string abort_reason;
};

struct RunHooks {
    std::optional<ObjectiveVector> golden_point;
    std::function<double(std::span<const double>)> psi;
    /// Called once for the initial population (generation 0) and after every generation.
    std::function<void(const GenerationTrace&, const Population&, const PreferenceModel*)> on_generation;
};

RunResult run(const RunConfig& config, DecisionMaker& dm, const RunHooks& hooks = {});

/// Seed for the i-th model retraining of a run.
std::uint64_t training_seed(std::uint64_t run_seed, std::size_t consultation_index);

// ---- I-NSGA-II ---------------------------------------------------------------

/// Survivor indices into `merged`: whole fronts while they fit, the split front
/// truncated by utility (with a model) or crowding distance (without).
std::vector<std::size_t> nsga2_survivors(const Population& merged, std::size_t n, const PreferenceModel* model);

/// One generation: tournament, SBX + mutation (N offspring), merge, survival.
Population insga2_generation(const Population& pop, const PreferenceModel* model, const ProblemSpec& problem,
                             const VariationConfig& variation, Rng& rng, std::size_t& fe);

// ---- I-MOEA/D ----------------------------------------------------------------

using Neighborhoods = std::vector<std::vector<std::size_t>>;

/// The T nearest weight vectors (Euclidean, itself included, ties to the lower index).
Neighborhoods weight_neighborhoods(const WeightVectorSet& weights, std::size_t T);

struct MoeadState {
    WeightVectorSet weights;
    Neighborhoods neighborhoods;
    ObjectiveVector z;  // running ideal estimate
};

/// Member i of `pop` solves subproblem i. Updates pop and state.z in place.
void imoead_generation(Population& pop, MoeadState& state, const MoeadConfig& cfg, const ProblemSpec& problem,
                       const VariationConfig& variation, Rng& rng, std::size_t& fe);

// ---- I-R2-IBEA ---------------------------------------------------------------

/// (1/|W|) sum_w min_a max_j w_j |a_j - z_j|
double r2_indicator(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                    std::span<const double> z);

/// R2 increase caused by removing each point on its own.
std::vector<double> r2_contributions(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                                     std::span<const double> z);

/// Greedy leave-one-out: repeatedly drops the point whose removal increases R2 the
/// least (lowest index on ties) until `n` remain. Returns survivor indices, ascending.
std::vector<std::size_t> r2_survivors(std::span<const ObjectiveVector> points, const WeightVectorSet& weights,
                                      std::span<const double> z, std::size_t n);

void ir2ibea_generation(Population& pop, const WeightVectorSet& weights, ObjectiveVector& z,
                        const ProblemSpec& problem, const VariationConfig& variation, Rng& rng, std::size_t& fe);

}  // namespace iemo
