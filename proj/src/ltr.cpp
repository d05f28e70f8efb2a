#include "iemo/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace iemo {

Normalization Normalization::from_bounds(std::span<const ObjectiveVector> points) {
    Normalization n;
    if (points.empty()) return n;
    n.lower = points.front();
    n.upper = points.front();
    for (const auto& p : points) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            n.lower[i] = std::min(n.lower[i], p[i]);
            n.upper[i] = std::max(n.upper[i], p[i]);
        }
    }
    return n;
}

void Normalization::apply(std::span<const double> f, std::span<double> out) const {
    if (identity()) {
        std::copy(f.begin(), f.end(), out.begin());
        return;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double range = upper[i] - lower[i];
        out[i] = range > 1e-12 ? (f[i] - lower[i]) / range : f[i] - lower[i];
    }
}

PreferenceModel::PreferenceModel(std::size_t input_dim, std::size_t hidden_dim, double sigma)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), sigma_(sigma),
      params_(parameter_count(input_dim, hidden_dim), 0.0) {
    if (input_dim == 0) throw std::invalid_argument("PreferenceModel: input_dim must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("PreferenceModel: sigma must be positive");
}

std::size_t PreferenceModel::parameter_count(std::size_t input_dim, std::size_t hidden_dim) {
    if (hidden_dim == 0) return input_dim;
    return hidden_dim * (input_dim + 2) + 1;
}

void PreferenceModel::set_normalization(Normalization norm) {
    if (!norm.identity() && (norm.lower.size() != input_dim_ || norm.upper.size() != input_dim_))
        throw DimensionError("normalization bounds must have length input_dim");
    norm_ = std::move(norm);
}

void PreferenceModel::check_input(std::span<const double> f) const {
    if (f.size() != input_dim_) throw DimensionError("PreferenceModel: objective vector length mismatch");
}

double PreferenceModel::score(std::span<const double> f) const {
    check_input(f);
    std::vector<double> z(input_dim_);
    norm_.apply(f, z);
    const std::size_t m = input_dim_;
    if (hidden_dim_ == 0) {
        double u = 0.0;
        for (std::size_t i = 0; i < m; ++i) u += params_[i] * z[i];
        return u;
    }
    const std::size_t h_count = hidden_dim_;
    const double* w1 = params_.data();
    const double* b1 = w1 + h_count * m;
    const double* w2 = b1 + h_count;
    const double b2 = w2[h_count];
    double u = b2;
    for (std::size_t h = 0; h < h_count; ++h) {
        double a = b1[h];
        for (std::size_t i = 0; i < m; ++i) a += w1[h * m + i] * z[i];
        u += w2[h] * std::tanh(a);
    }
    return u;
}

double PreferenceModel::score_with_gradient(std::span<const double> f, std::span<double> grad) const {
    check_input(f);
    if (grad.size() != params_.size()) throw DimensionError("gradient buffer has wrong length");
    std::vector<double> z(input_dim_);
    norm_.apply(f, z);
    const std::size_t m = input_dim_;
    if (hidden_dim_ == 0) {
        double u = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            u += params_[i] * z[i];
            grad[i] = z[i];
        }
        return u;
    }
    const std::size_t h_count = hidden_dim_;
    const double* w1 = params_.data();
    const double* b1 = w1 + h_count * m;
    const double* w2 = b1 + h_count;
    double u = w2[h_count];
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + h_count * m;
    double* g_w2 = g_b1 + h_count;
    for (std::size_t h = 0; h < h_count; ++h) {
        double a = b1[h];
        for (std::size_t i = 0; i < m; ++i) a += w1[h * m + i] * z[i];
        const double t = std::tanh(a);
        u += w2[h] * t;
        const double da = w2[h] * (1.0 - t * t);
        for (std::size_t i = 0; i < m; ++i) g_w1[h * m + i] = da * z[i];
        g_b1[h] = da;
        g_w2[h] = t;
    }
    g_w2[h_count] = 1.0;
    return u;
}

nlohmann::json PreferenceModel::to_json() const {
    nlohmann::json j;
    j["input_dim"] = input_dim_;
    j["hidden_dim"] = hidden_dim_;
    j["sigma"] = sigma_;
    j["params"] = params_;
    j["norm_lower"] = norm_.lower;
    j["norm_upper"] = norm_.upper;
    return j;
}

PreferenceModel PreferenceModel::from_json(const nlohmann::json& j) {
    PreferenceModel model(j.at("input_dim").get<std::size_t>(), j.at("hidden_dim").get<std::size_t>(),
                          j.at("sigma").get<double>());
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != model.params_.size()) throw DimensionError("checkpoint parameter count mismatch");
    for (double p : params)
        if (!std::isfinite(p)) throw std::invalid_argument("checkpoint contains non-finite parameter");
    model.params_ = std::move(params);
    Normalization norm;
    if (j.contains("norm_lower")) norm.lower = j.at("norm_lower").get<ObjectiveVector>();
    if (j.contains("norm_upper")) norm.upper = j.at("norm_upper").get<ObjectiveVector>();
    model.set_normalization(std::move(norm));
    return model;
}

double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

namespace {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double loss_from_difference(double sigma, double du, int c) {
    return 0.5 * (1.0 - c) * sigma * du + softplus(-sigma * du);
}

void check_record(const ComparisonRecord& r) {
    if (r.c != 1 && r.c != -1 && r.c != 0) throw std::invalid_argument("comparison outcome must be 1, -1 or 0");
    if (r.fi.size() != r.fj.size()) throw DimensionError("compared objective vectors differ in length");
}

}  // namespace

double pair_probability(const PreferenceModel& model, std::span<const double> fi, std::span<const double> fj) {
    return logistic(model.sigma() * (model.score(fi) - model.score(fj)));
}

double pair_lambda(double sigma, double du, int c) {
    // 1 / (1 + e^{sigma du}) == logistic(-sigma du)
    return sigma * (0.5 * (1.0 - c) - logistic(-sigma * du));
}

double pair_loss(const PreferenceModel& model, const ComparisonRecord& record) {
    check_record(record);
    const double du = model.score(record.fi) - model.score(record.fj);
    return loss_from_difference(model.sigma(), du, record.c);
}

double total_loss(const PreferenceModel& model, std::span<const ComparisonRecord> records) {
    if (records.empty()) throw std::invalid_argument("total_loss: empty record set");
    double sum = 0.0;
    for (const auto& r : records) sum += pair_loss(model, r);
    return sum;
}

namespace {

// Index of every distinct objective vector appearing in the records.
struct DistinctSolutions {
    std::vector<ObjectiveVector> points;
    std::vector<std::pair<std::size_t, std::size_t>> pair_index;  // per record: (i, j)

    explicit DistinctSolutions(std::span<const ComparisonRecord> records) {
        std::map<ObjectiveVector, std::size_t> index;
        auto intern = [&](const ObjectiveVector& f) {
            auto [it, inserted] = index.try_emplace(f, points.size());
            if (inserted) points.push_back(f);
            return it->second;
        };
        pair_index.reserve(records.size());
        for (const auto& r : records) {
            check_record(r);
            const std::size_t i = intern(r.fi);
            const std::size_t j = intern(r.fj);
            pair_index.emplace_back(i, j);
        }
    }
};

double loss_on(const PreferenceModel& model, std::span<const ComparisonRecord> records,
               const DistinctSolutions& distinct) {
    std::vector<double> u(distinct.points.size());
    for (std::size_t s = 0; s < u.size(); ++s) u[s] = model.score(distinct.points[s]);
    double sum = 0.0;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto [i, j] = distinct.pair_index[r];
        sum += loss_from_difference(model.sigma(), u[i] - u[j], records[r].c);
    }
    return sum;
}

std::vector<double> gradient_on(const PreferenceModel& model, std::span<const ComparisonRecord> records,
                                const DistinctSolutions& distinct, GradientStats* stats) {
    const std::size_t count = distinct.points.size();
    std::vector<double> u(count);
    for (std::size_t s = 0; s < count; ++s) u[s] = model.score(distinct.points[s]);

    // Sum the lambdas per solution: +lambda_ij for the first element, -lambda_ij for the second.
    std::vector<double> weight(count, 0.0);
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto [i, j] = distinct.pair_index[r];
        const double lambda = pair_lambda(model.sigma(), u[i] - u[j], records[r].c);
        weight[i] += lambda;
        weight[j] -= lambda;
    }

    const std::size_t p = model.parameters().size();
    std::vector<double> grad(p, 0.0);
    std::vector<double> du(p);
    for (std::size_t s = 0; s < count; ++s) {
        if (weight[s] == 0.0) continue;
        model.score_with_gradient(distinct.points[s], du);
        for (std::size_t k = 0; k < p; ++k) grad[k] += weight[s] * du[k];
        if (stats) ++stats->backward_passes;
    }
    if (stats) {
        stats->forward_passes += count;
        stats->distinct_solutions = count;
    }
    return grad;
}

}  // namespace

std::vector<double> gradient(const PreferenceModel& model, std::span<const ComparisonRecord> records,
                             GradientStats* stats) {
    if (records.empty()) throw std::invalid_argument("gradient: empty record set");
    const DistinctSolutions distinct(records);
    return gradient_on(model, records, distinct, stats);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (epochs == 0) throw std::invalid_argument("epochs must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

std::vector<ComparisonRecord> records_within(std::span<const ComparisonRecord> records, const Normalization& norm,
                                             double margin) {
    std::vector<ComparisonRecord> kept;
    if (records.empty()) return kept;
    const std::size_t m = records.front().fi.size();
    ObjectiveVector a(m), b(m);
    auto inside = [&](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x >= -margin && x <= 1.0 + margin; });
    };
    for (const auto& r : records) {
        check_record(r);
        if (r.fi.size() != m) throw DimensionError("records_within: records differ in dimension");
        norm.apply(r.fi, a);
        norm.apply(r.fj, b);
        if (inside(a) && inside(b)) kept.push_back(r);
    }
    return kept;
}

PreferenceModel train(std::span<const ComparisonRecord> records, std::size_t m, const TrainConfig& cfg) {
    std::vector<ObjectiveVector> points;
    points.reserve(records.size() * 2);
    for (const auto& r : records) {
        points.push_back(r.fi);
        points.push_back(r.fj);
    }
    return train(records, m, cfg, Normalization::from_bounds(points));
}

PreferenceModel train(std::span<const ComparisonRecord> records, std::size_t m, const TrainConfig& cfg,
                      Normalization norm) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("train: no comparison records");
    for (const auto& r : records)
        if (r.fi.size() != m || r.fj.size() != m) throw DimensionError("train: record dimension differs from m");
    const bool informative = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.c != 0; });
    if (!informative && !cfg.allow_all_indifferent)
        throw std::invalid_argument("train: every record is an indifference judgment");

    PreferenceModel model(m, cfg.hidden_dim, cfg.sigma);
    model.set_normalization(std::move(norm));
    std::mt19937_64 rng(cfg.init_seed);
    std::uniform_real_distribution<double> init(-cfg.init_range, cfg.init_range);
    for (auto& w : model.parameters()) w = init(rng);

    const DistinctSolutions all(records);
    std::vector<double> best(model.parameters().begin(), model.parameters().end());
    double best_loss = loss_on(model, records, all);

    const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= records.size();
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (full_batch) {
            const auto grad = gradient_on(model, records, all, nullptr);
            auto params = model.parameters();
            for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
        } else {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t end = std::min(order.size(), start + cfg.batch_size);
                std::vector<ComparisonRecord> batch;
                batch.reserve(end - start);
                for (std::size_t b = start; b < end; ++b) batch.push_back(records[order[b]]);
                const auto grad = gradient(model, batch);
                auto params = model.parameters();
                for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
            }
        }
        const double loss = loss_on(model, records, all);
        if (loss < best_loss && std::isfinite(loss)) {
            best_loss = loss;
            std::copy(model.parameters().begin(), model.parameters().end(), best.begin());
        }
    }
    std::copy(best.begin(), best.end(), model.parameters().begin());
    return model;
}

}  // namespace iemo
