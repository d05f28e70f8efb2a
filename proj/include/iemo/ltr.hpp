#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iemo/problems.hpp"

namespace iemo {

/// One holistic judgment: c = 1 when fi is preferred, -1 when fj is, 0 when indifferent.
struct ComparisonRecord {
    ObjectiveVector fi;
    ObjectiveVector fj;
    int c{0};

    bool operator==(const ComparisonRecord&) const = default;
};

/// Affine input scaling applied before the network: (f - lower) / (upper - lower).
/// Empty bounds mean identity; a degenerate range only shifts.
struct Normalization {
    ObjectiveVector lower;
    ObjectiveVector upper;

    bool identity() const noexcept { return lower.empty(); }
    static Normalization from_bounds(std::span<const ObjectiveVector> points);
    void apply(std::span<const double> f, std::span<double> out) const;
};

/// Single-hidden-layer ranking network u : R^m -> R.
///
/// Parameter layout for hidden_dim H > 0 (tanh hidden units, linear output):
///   [0, H*m)          input weights, row-major (unit h, input i) at h*m + i
///   [H*m, H*m+H)      hidden biases
///   [H*m+H, H*m+2H)   output weights
///   H*m+2H            output bias
/// hidden_dim == 0 is the linear mode u(f) = sum_i w_i f_i with exactly m parameters.
class PreferenceModel {
public:
    PreferenceModel() = default;
    PreferenceModel(std::size_t input_dim, std::size_t hidden_dim, double sigma = 1.0);

    static std::size_t parameter_count(std::size_t input_dim, std::size_t hidden_dim);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t hidden_dim() const noexcept { return hidden_dim_; }
    double sigma() const noexcept { return sigma_; }
    std::span<const double> parameters() const noexcept { return params_; }
    std::span<double> parameters() noexcept { return params_; }
    const Normalization& normalization() const noexcept { return norm_; }
    void set_normalization(Normalization norm);

    double score(std::span<const double> f) const;
    /// Returns u(f) and writes du/dparams into `grad` (length parameter_count).
    double score_with_gradient(std::span<const double> f, std::span<double> grad) const;

    nlohmann::json to_json() const;
    static PreferenceModel from_json(const nlohmann::json& j);

private:
    void check_input(std::span<const double> f) const;

    std::size_t input_dim_{0};
    std::size_t hidden_dim_{0};
    double sigma_{1.0};
    std::vector<double> params_;
    Normalization norm_;
};

/// log(1 + e^z) without overflow.
double softplus(double z);

/// 1 / (1 + e^{-sigma (u(fi) - u(fj))}).
double pair_probability(const PreferenceModel& model, std::span<const double> fi, std::span<const double> fj);

/// Cross-entropy against the target (1 + c)/2 in its simplified form
/// (1 - c)/2 * sigma * du + log(1 + e^{-sigma du}), du = u(fi) - u(fj).
double pair_loss(const PreferenceModel& model, const ComparisonRecord& record);

double total_loss(const PreferenceModel& model, std::span<const ComparisonRecord> records);

/// dl/du(fi) for one pair: sigma * ((1 - c)/2 - 1 / (1 + e^{sigma du})).
double pair_lambda(double sigma, double du, int c);

struct GradientStats {
    std::size_t forward_passes{0};
    std::size_t backward_passes{0};
    std::size_t distinct_solutions{0};
};

/// dL/dparams, accumulated per distinct objective vector: each solution gets one
/// forward/backward pass weighted by the sum of its lambdas.
std::vector<double> gradient(const PreferenceModel& model, std::span<const ComparisonRecord> records,
                             GradientStats* stats = nullptr);

struct TrainConfig {
    double learning_rate{0.01};
    std::size_t epochs{500};
    std::size_t batch_size{0};  // 0 = full batch
    std::uint64_t init_seed{1};
    std::size_t hidden_dim{10};
    double sigma{1.0};
    double init_range{0.5};
    bool allow_all_indifferent{false};

    void validate() const;
};

/// Records whose two objective vectors both normalize into [-margin, 1 + margin]
/// on every coordinate. An infinite margin keeps everything.
std::vector<ComparisonRecord> records_within(std::span<const ComparisonRecord> records, const Normalization& norm,
                                             double margin);

/// Trains from a fresh initialization and returns the lowest-loss parameters seen.
/// Without an explicit normalization the records' own objective bounds are used.
PreferenceModel train(std::span<const ComparisonRecord> records, std::size_t m, const TrainConfig& cfg);
PreferenceModel train(std::span<const ComparisonRecord> records, std::size_t m, const TrainConfig& cfg,
                      Normalization norm);

}  // namespace iemo
