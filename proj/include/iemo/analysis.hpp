#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "iemo/evo.hpp"

namespace iemo {

/// min over points of the Euclidean distance to `target`.
double approx_error(std::span<const ObjectiveVector> points, std::span<const double> target);
double approx_error(const Population& pop, std::span<const double> target);

/// DCG@k / IDCG@k with gain 2^rel - 1 and discount log2(i + 1). `relevance` lists the
/// graded relevance of the items in predicted order. Returns 1 when every relevance is zero.
double ndcg_at_k(std::span<const double> relevance, std::size_t k);

/// Relevance grade of the item with 1-based `true_rank` in a list of length L: L - true_rank.
double graded_relevance(std::size_t list_length, std::size_t true_rank);

/// Two-sided p-value of the paired Wilcoxon signed-rank test. Zero differences are dropped;
/// exact for up to 12 remaining pairs (midranks for ties), normal approximation with tie
/// correction beyond. Returns 1 when every difference is zero.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// One-sided sign test: probability of at least as many pairs with a_i < b_i as observed
/// under a fair coin, ties dropped. Returns 1 when every pair ties.
double sign_test_less(std::span<const double> a, std::span<const double> b);

/// Two-sided p-value of the Mann-Whitney rank-sum test (normal approximation with tie correction).
double rank_sum_test(std::span<const double> a, std::span<const double> b);

enum class EffectMagnitude { negligible, small, medium, large };

struct EffectSize {
    double value{0.5};
    EffectMagnitude magnitude{EffectMagnitude::negligible};
};

std::string to_string(EffectMagnitude magnitude);

/// Vargha-Delaney A12 under minimization: P(a < b) + 0.5 P(a = b).
/// Magnitude thresholds on |A - 0.5|: 0.06 small, 0.14 medium, 0.21 large.
EffectSize a12(std::span<const double> a, std::span<const double> b);

struct MetricSample {
    std::string label;
    std::vector<double> values;
};

struct ScottKnottGroup {
    std::string label;
    double mean{0.0};
    int rank{1};
};

/// Groups ordered by mean (ascending, stable) with rank 1 = best. A split of a contiguous
/// block maximizes the between-cluster sum of squares and is kept only when the rank-sum
/// test on the pooled values gives p < alpha and A12 is not negligible.
std::vector<ScottKnottGroup> scott_knott(std::span<const MetricSample> samples, double alpha = 0.05);

double mean(std::span<const double> values);
/// Linear-interpolation quantile (the common "type 7" definition).
double quantile(std::span<const double> values, double q);
inline double median(std::span<const double> values) { return quantile(values, 0.5); }

}  // namespace iemo
