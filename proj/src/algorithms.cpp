#include "iemo/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "algo_common.hpp"
#include "iemo/log.hpp"
#include "iemo/seed.hpp"

namespace iemo {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::insga2: return "insga2";
        case Algorithm::imoead: return "imoead";
        case Algorithm::ir2ibea: return "ir2ibea";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "insga2") return Algorithm::insga2;
    if (name == "imoead") return Algorithm::imoead;
    if (name == "ir2ibea") return Algorithm::ir2ibea;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::size_t RunConfig::default_population(std::size_t m) {
    if (m == 8) return 120;
    if (m == 10) return 220;
    return 100;
}

RunConfig RunConfig::defaults(Algorithm algorithm, const ProblemSpec& problem) {
    RunConfig cfg;
    cfg.algorithm = algorithm;
    cfg.problem = problem;
    cfg.N = default_population(problem.m);
    cfg.max_fe = 300 * cfg.N;
    cfg.tau = 10;
    cfg.warmup_gens = 3 * cfg.tau;
    cfg.variation = VariationConfig::defaults(problem.n);
    return cfg;
}

void RunConfig::validate() const {
    problem.validate();
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    if (max_fe < N) throw std::invalid_argument("max_fe must be at least N");
    if (tau < 2) throw std::invalid_argument("tau must be greater than 1");
    if (warmup_gens < 1) throw std::invalid_argument("warmup_gens must be at least 1");
    if (elicitation.mu < 2) throw std::invalid_argument("mu must be at least 2");
    if (elicitation.mu > N) throw std::invalid_argument("mu must not exceed N");
    elicitation.validate();
    variation.validate();
    if (!(train.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(train.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(record_margin >= 0.0)) throw std::invalid_argument("record_margin must be non-negative");
    if (moead.neighborhood < 2) throw std::invalid_argument("neighborhood must be at least 2");
    if (!(moead.delta_nb >= 0.0 && moead.delta_nb <= 1.0)) throw std::invalid_argument("delta_nb must lie in [0,1]");
    if (moead.replacement_cap < 1) throw std::invalid_argument("replacement_cap must be at least 1");
}

std::uint64_t training_seed(std::uint64_t run_seed, std::size_t consultation_index) {
    return derive_seed(run_seed, 0x7472616eULL, consultation_index);
}

namespace {

enum Stream : std::uint64_t { evolution = 1, weights = 2 };

class Runner {
public:
    Runner(const RunConfig& cfg, DecisionMaker& dm, const RunHooks& hooks)
        : cfg_(cfg), dm_(dm), hooks_(hooks), rng_(derive_seed(cfg.seed, Stream::evolution)) {
        result_.seed = cfg.seed;
    }

    RunResult execute() {
        initialize();
        std::size_t generation = 0;
        emit(generation, false);
        try {
            while (fe_ + cfg_.N <= cfg_.max_fe) {
                const bool consult = cfg_.guidance && generation >= cfg_.warmup_gens &&
                                     (generation - cfg_.warmup_gens) % cfg_.tau == 0;
                bool consulted = false;
                if (consult) consulted = consultation(generation);
                step();
                ++generation;
                result_.generations = generation;
                emit(generation, consulted);
            }
        } catch (const DecisionMakerAborted& e) {
            result_.aborted = true;
            result_.abort_reason = e.what();
            log::warning(std::string("run aborted: ") + e.what());
        }
        result_.final_population = pop_;
        result_.fe_used = fe_;
        result_.model = model_;
        result_.weights = weights_.weights;
        return result_;
    }

private:
    void initialize() {
        pop_.capacity = cfg_.N;
        pop_.members.reserve(cfg_.N);
        for (std::size_t i = 0; i < cfg_.N; ++i)
            pop_.members.push_back(detail::make_solution(cfg_.problem, random_decision(cfg_.problem, rng_), fe_));
        weights_.z.assign(cfg_.problem.m, std::numeric_limits<double>::infinity());
        for (const auto& s : pop_.members) detail::update_ideal(weights_.z, s.f);
        if (cfg_.algorithm != Algorithm::insga2) {
            weights_.weights = har_sample(cfg_.problem.m, cfg_.N, derive_seed(cfg_.seed, Stream::weights));
            weights_.neighborhoods = weight_neighborhoods(weights_.weights, cfg_.moead.neighborhood);
        }
    }

    void step() {
        const PreferenceModel* model = model_ ? &*model_ : nullptr;
        switch (cfg_.algorithm) {
            case Algorithm::insga2:
                pop_ = insga2_generation(pop_, model, cfg_.problem, cfg_.variation, rng_, fe_);
                break;
            case Algorithm::imoead:
                imoead_generation(pop_, weights_, cfg_.moead, cfg_.problem, cfg_.variation, rng_, fe_);
                break;
            case Algorithm::ir2ibea:
                ir2ibea_generation(pop_, weights_.weights, weights_.z, cfg_.problem, cfg_.variation, rng_, fe_);
                break;
        }
    }

    bool consultation(std::size_t generation) {
        const PreferenceModel* model = model_ ? &*model_ : nullptr;
        const auto picked = select_candidates(pop_, model, cfg_.elicitation.mu);
        if (picked.size() < 2) {
            log::info("consultation skipped: fewer than two distinct candidates");
            return false;
        }
        std::vector<ObjectiveVector> candidates;
        candidates.reserve(picked.size());
        for (std::size_t i : picked) candidates.push_back(pop_.members[i].f);
        const auto pairs = enumerate_queries(candidates.size());
        const auto judgments = dm_.consult(candidates, pairs);
        if (judgments.size() != pairs.size())
            throw DecisionMakerAborted("decision maker returned " + std::to_string(judgments.size()) +
                                       " judgments for " + std::to_string(pairs.size()) + " pairs");

        Consultation entry;
        entry.generation = generation;
        entry.fe = fe_;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            ComparisonRecord r{candidates[pairs[p].first], candidates[pairs[p].second], judgments[p].c};
            entry.records.push_back(r);
            entry.flipped.push_back(judgments[p].flipped);
            records_.push_back(std::move(r));
        }
        result_.consultation_log.push_back(std::move(entry));

        retrain();
        elicit();
        return true;
    }

    void retrain() {
        const auto norm = Normalization::from_bounds(pop_.objectives());
        const auto usable = records_within(records_, norm, cfg_.record_margin);
        const bool informative =
            std::any_of(usable.begin(), usable.end(), [](const ComparisonRecord& r) { return r.c != 0; });
        if (!informative) {
            log::info("no strict judgments near the current population; keeping the previous model");
            return;
        }
        TrainConfig tc = cfg_.train;
        tc.init_seed = training_seed(cfg_.seed, result_.consultation_log.size() - 1);
        model_ = train(usable, cfg_.problem.m, tc, norm);
    }

    void elicit() {
        if (!model_ || cfg_.algorithm == Algorithm::insga2) return;
        std::vector<std::size_t> association(pop_.size());
        if (cfg_.algorithm == Algorithm::imoead) {
            for (std::size_t i = 0; i < association.size(); ++i) association[i] = i;
        } else {
            for (std::size_t i = 0; i < association.size(); ++i)
                association[i] = closest_tchebycheff_weight(pop_.members[i].f, weights_.weights, weights_.z);
        }
        weights_.weights = adjust_weights(weights_.weights, pop_, *model_, association, cfg_.elicitation);
        weights_.neighborhoods = weight_neighborhoods(weights_.weights, cfg_.moead.neighborhood);
    }

    void emit(std::size_t generation, bool consulted) {
        GenerationTrace t;
        t.generation = generation;
        t.fe = fe_;
        t.consulted = consulted;
        if (hooks_.psi) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : pop_.members) best = std::min(best, hooks_.psi(s.f));
            t.best_psi = best;
        }
        if (hooks_.golden_point) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : pop_.members) {
                double d = 0.0;
                for (std::size_t j = 0; j < s.f.size(); ++j) {
                    const double e = s.f[j] - (*hooks_.golden_point)[j];
                    d += e * e;
                }
                best = std::min(best, std::sqrt(d));
            }
            t.error = best;
        }
        if (model_)
            for (auto& s : pop_.members) s.utility = model_->score(s.f);
        result_.trajectory.push_back(t);
        if (hooks_.on_generation) hooks_.on_generation(t, pop_, model_ ? &*model_ : nullptr);
    }

    const RunConfig& cfg_;
    DecisionMaker& dm_;
    const RunHooks& hooks_;
    Rng rng_;
    std::size_t fe_{0};
    Population pop_;
    MoeadState weights_;
    std::vector<ComparisonRecord> records_;
    std::optional<PreferenceModel> model_;
    RunResult result_;
};

}  // namespace

RunResult run(const RunConfig& config, DecisionMaker& dm, const RunHooks& hooks) {
    config.validate();
    return Runner(config, dm, hooks).execute();
}

}  // namespace iemo
