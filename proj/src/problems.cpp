#include "iemo/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace iemo {

namespace {

constexpr double pi = std::numbers::pi;

struct FamilyName {
    Family family;
    std::string_view name;
};

constexpr std::array<FamilyName, 15> family_names{{
    {Family::dtlz1, "dtlz1"},       {Family::dtlz2, "dtlz2"},       {Family::dtlz3, "dtlz3"},
    {Family::dtlz4, "dtlz4"},       {Family::dtlz5, "dtlz5"},       {Family::dtlz6, "dtlz6"},
    {Family::dtlz1inv, "dtlz1inv"}, {Family::dtlz2inv, "dtlz2inv"}, {Family::dtlz3inv, "dtlz3inv"},
    {Family::dtlz4inv, "dtlz4inv"}, {Family::mdtlz1, "mdtlz1"},     {Family::mdtlz2, "mdtlz2"},
    {Family::mdtlz3, "mdtlz3"},     {Family::mdtlz4, "mdtlz4"},     {Family::wfg3, "wfg3"},
}};

bool is_mdtlz(Family f) {
    return f == Family::mdtlz1 || f == Family::mdtlz2 || f == Family::mdtlz3 || f == Family::mdtlz4;
}

// Linear (simplex) front shape: h_0 = prod x_j, h_i = prod_{j<m-1-i} x_j * (1 - x_{m-1-i}).
// The components sum to one for any x in [0,1]^{m-1}.
void linear_shape(std::span<const double> pos, std::span<double> h) {
    const std::size_t m = h.size();
    for (std::size_t i = 0; i < m; ++i) {
        double v = 1.0;
        for (std::size_t j = 0; j + 1 + i < m; ++j) v *= pos[j];
        if (i > 0) v *= 1.0 - pos[m - 1 - i];
        h[i] = v;
    }
}

// Spherical front shape on angles theta (length m-1): sum of squares is one.
void sphere_shape(std::span<const double> theta, std::span<double> h) {
    const std::size_t m = h.size();
    for (std::size_t i = 0; i < m; ++i) {
        double v = 1.0;
        for (std::size_t j = 0; j + 1 + i < m; ++j) v *= std::cos(theta[j]);
        if (i > 0) v *= std::sin(theta[m - 1 - i]);
        h[i] = v;
    }
}

// DTLZ1/DTLZ3 multimodal distance function.
double g_rastrigin(std::span<const double> xs) {
    double s = static_cast<double>(xs.size());
    for (double v : xs) s += (v - 0.5) * (v - 0.5) - std::cos(20.0 * pi * (v - 0.5));
    return 100.0 * s;
}

double g_sphere(std::span<const double> xs) {
    double s = 0.0;
    for (double v : xs) s += (v - 0.5) * (v - 0.5);
    return s;
}

double clamp01(double v) {
    // WFG transformations drift slightly outside [0,1] in floating point.
    return std::clamp(v, 0.0, 1.0);
}

// DTLZ1..DTLZ6 (Deb, Thiele, Laumanns, Zitzler). Variables x_0..x_{m-2} are position
// variables, the remaining k = n-m+1 are distance variables.
ObjectiveVector eval_dtlz(Family base, std::size_t m, std::span<const double> x) {
    const auto pos = x.first(m - 1);
    const auto dist = x.subspan(m - 1);
    ObjectiveVector f(m);

    switch (base) {
        case Family::dtlz1: {
            const double g = g_rastrigin(dist);
            linear_shape(pos, f);
            for (auto& v : f) v *= 0.5 * (1.0 + g);
            break;
        }
        case Family::dtlz2:
        case Family::dtlz3:
        case Family::dtlz4: {
            const double g = base == Family::dtlz3 ? g_rastrigin(dist) : g_sphere(dist);
            const double alpha = base == Family::dtlz4 ? 100.0 : 1.0;
            std::vector<double> theta(m - 1);
            for (std::size_t j = 0; j + 1 < m; ++j) theta[j] = std::pow(pos[j], alpha) * pi / 2.0;
            sphere_shape(theta, f);
            for (auto& v : f) v *= 1.0 + g;
            break;
        }
        case Family::dtlz5:
        case Family::dtlz6: {
            double g = 0.0;
            if (base == Family::dtlz5) {
                g = g_sphere(dist);
            } else {
                for (double v : dist) g += std::pow(v, 0.1);
            }
            std::vector<double> theta(m - 1);
            theta[0] = pos[0] * pi / 2.0;
            for (std::size_t j = 1; j + 1 < m; ++j) theta[j] = pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * pos[j]);
            sphere_shape(theta, f);
            for (auto& v : f) v *= 1.0 + g;
            break;
        }
        default:
            throw UnsupportedError("eval_dtlz: not a DTLZ base family");
    }
    return f;
}

double dtlz_g(Family base, std::size_t m, std::span<const double> x) {
    const auto dist = x.subspan(m - 1);
    return (base == Family::dtlz1 || base == Family::dtlz3) ? g_rastrigin(dist) : g_sphere(dist);
}

Family inverted_base(Family f) {
    switch (f) {
        case Family::dtlz1inv: return Family::dtlz1;
        case Family::dtlz2inv: return Family::dtlz2;
        case Family::dtlz3inv: return Family::dtlz3;
        case Family::dtlz4inv: return Family::dtlz4;
        default: throw UnsupportedError("inverted_base: not an inverted family");
    }
}

// Inverted DTLZ: f_i = s(1+g) - f_i^{DTLZ}(x), s = 1/2 for DTLZ1 and 1 otherwise.
// Objectives stay nonnegative and the front becomes the inverted simplex / sphere.
ObjectiveVector eval_inverted(Family family, std::size_t m, std::span<const double> x) {
    const Family base = inverted_base(family);
    auto f = eval_dtlz(base, m, x);
    const double g = dtlz_g(base, m, x);
    const double scale = base == Family::dtlz1 ? 0.5 : 1.0;
    for (auto& v : f) v = scale * (1.0 + g) - v;
    return f;
}

// mDTLZ1-4 (hardly dominated boundaries): each objective owns its own distance group
// J_i = {m-1+i, m-1+i+m, ...} and f_i = c(1+g_i)(1 - h_i) with h the DTLZ shape
// (c = 1/2 and linear h for mDTLZ1; c = 1 and spherical h for mDTLZ2-4).
ObjectiveVector eval_mdtlz(Family family, std::size_t m, std::span<const double> x) {
    const auto pos = x.first(m - 1);
    const std::size_t n = x.size();
    std::vector<double> g(m, 0.0);
    const bool rastrigin = family == Family::mdtlz1 || family == Family::mdtlz3;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> group;
        for (std::size_t j = m - 1 + i; j < n; j += m) group.push_back(x[j]);
        g[i] = rastrigin ? g_rastrigin(group) : g_sphere(group);
    }

    ObjectiveVector h(m);
    double c = 1.0;
    if (family == Family::mdtlz1) {
        linear_shape(pos, h);
        c = 0.5;
    } else {
        const double alpha = family == Family::mdtlz4 ? 100.0 : 1.0;
        std::vector<double> theta(m - 1);
        for (std::size_t j = 0; j + 1 < m; ++j) theta[j] = std::pow(pos[j], alpha) * pi / 2.0;
        sphere_shape(theta, h);
    }
    ObjectiveVector f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = c * (1.0 + g[i]) * (1.0 - h[i]);
    return f;
}

double s_linear(double y, double a) {
    return clamp01(std::abs(y - a) / std::abs(std::floor(a - y) + a));
}

double r_nonsep(std::span<const double> y, std::size_t a) {
    const std::size_t len = y.size();
    double num = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        num += y[j];
        for (std::size_t k = 0; k + 2 <= a; ++k) num += std::abs(y[j] - y[(j + k + 1) % len]);
    }
    const double half = std::ceil(static_cast<double>(a) / 2.0);
    const double den = (static_cast<double>(len) / static_cast<double>(a)) * half *
                       (1.0 + 2.0 * static_cast<double>(a) - 2.0 * half);
    return clamp01(num / den);
}

double r_sum(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v;
    return clamp01(s / static_cast<double>(y.size()));
}

std::size_t wfg_k(std::size_t m) { return 2 * (m - 1); }
constexpr std::size_t wfg_l = 20;

// WFG3 (Huband et al.): z_i in [0, 2i]; t1 = s_linear(0.35) on distance params,
// t2 = r_nonsep pairs, t3 = r_sum reduction, degenerate A = (1,0,...,0), linear shape,
// D = 1, S_i = 2i.
ObjectiveVector eval_wfg3(std::size_t m, std::size_t n, std::span<const double> z) {
    const std::size_t k = wfg_k(m);
    const std::size_t l = n - k;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = clamp01(z[i] / (2.0 * static_cast<double>(i + 1)));

    for (std::size_t i = k; i < n; ++i) y[i] = s_linear(y[i], 0.35);

    std::vector<double> t2(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t j = 0; j < l / 2; ++j) {
        const std::array<double, 2> pair{y[k + 2 * j], y[k + 2 * j + 1]};
        t2.push_back(r_nonsep(pair, 2));
    }

    std::vector<double> t3(m);
    const std::size_t per = k / (m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) t3[i] = r_sum(std::span<const double>(t2).subspan(i * per, per));
    t3[m - 1] = r_sum(std::span<const double>(t2).subspan(k, l / 2));

    std::vector<double> shape_x(m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = i == 0 ? 1.0 : 0.0;
        shape_x[i] = std::max(t3[m - 1], a) * (t3[i] - 0.5) + 0.5;
    }
    shape_x[m - 1] = t3[m - 1];

    ObjectiveVector h(m);
    linear_shape(std::span<const double>(shape_x).first(m - 1), h);
    ObjectiveVector f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = shape_x[m - 1] + 2.0 * static_cast<double>(i + 1) * h[i];
    return f;
}

double psi(std::span<const double> f, std::span<const double> w) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, std::abs(f[i]) / w[i]);
    return best;
}

}  // namespace

BoundsError::BoundsError(std::size_t index, double value)
    : std::out_of_range("decision variable " + std::to_string(index) + " out of bounds: " + std::to_string(value)),
      index_(index) {}

std::string to_string(Family family) {
    for (const auto& fn : family_names)
        if (fn.family == family) return std::string(fn.name);
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (const auto& fn : family_names)
        if (fn.name == name) return fn.family;
    throw UnsupportedError("unknown problem '" + std::string(name) + "'");
}

std::size_t ProblemSpec::default_n(Family family, std::size_t m) {
    switch (family) {
        case Family::dtlz1:
        case Family::dtlz1inv:
        case Family::mdtlz1:
            return m + 4;
        case Family::wfg3:
            return wfg_k(m) + wfg_l;
        default:
            return m + 9;
    }
}

ProblemSpec ProblemSpec::make(Family family, std::size_t m, std::size_t n) {
    ProblemSpec spec;
    spec.family = family;
    spec.m = m;
    spec.n = n == 0 ? default_n(family, m) : n;
    spec.bounds.assign(spec.n, Interval{0.0, 1.0});
    if (family == Family::wfg3) {
        for (std::size_t i = 0; i < spec.n; ++i) spec.bounds[i].upper = 2.0 * static_cast<double>(i + 1);
    }
    spec.validate();
    return spec;
}

void ProblemSpec::validate() const {
    if (m < 2) throw DimensionError("m must be at least 2");
    if (n + 1 < m) throw DimensionError("n must be at least m-1");
    if (bounds.size() != n) throw DimensionError("bounds length must equal n");
    if (is_mdtlz(family)) {
        if (m != 3) throw DimensionError("mDTLZ problems are defined for m = 3 only");
        if (n < 2 * m - 1) throw DimensionError("mDTLZ needs at least one distance variable per objective");
    }
    if (family == Family::wfg3) {
        const std::size_t k = wfg_k(m);
        if (n <= k || (n - k) % 2 != 0) throw DimensionError("WFG3 needs n = 2(m-1) + l with even l > 0");
    }
    for (const auto& b : bounds)
        if (!(b.lower <= b.upper)) throw DimensionError("empty variable bound");
}

ObjectiveVector evaluate(const ProblemSpec& spec, std::span<const double> x) {
    if (x.size() != spec.n) {
        std::ostringstream msg;
        msg << "decision vector has length " << x.size() << ", expected " << spec.n;
        throw DimensionError(msg.str());
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= spec.bounds[i].lower && x[i] <= spec.bounds[i].upper)) throw BoundsError(i, x[i]);
    }
    switch (spec.family) {
        case Family::dtlz1:
        case Family::dtlz2:
        case Family::dtlz3:
        case Family::dtlz4:
        case Family::dtlz5:
        case Family::dtlz6:
            return eval_dtlz(spec.family, spec.m, x);
        case Family::dtlz1inv:
        case Family::dtlz2inv:
        case Family::dtlz3inv:
        case Family::dtlz4inv:
            return eval_inverted(spec.family, spec.m, x);
        case Family::mdtlz1:
        case Family::mdtlz2:
        case Family::mdtlz3:
        case Family::mdtlz4:
            return eval_mdtlz(spec.family, spec.m, x);
        case Family::wfg3:
            return eval_wfg3(spec.m, spec.n, x);
    }
    throw UnsupportedError("evaluate: unknown family");
}

ProblemMeta meta(const ProblemSpec& spec) {
    ProblemMeta out;
    out.ideal.assign(spec.m, 0.0);
    switch (spec.family) {
        case Family::dtlz1:
        case Family::dtlz1inv:
        case Family::mdtlz1:
            out.nadir = ObjectiveVector(spec.m, 0.5);
            break;
        case Family::dtlz5:
        case Family::dtlz6:
        case Family::wfg3:
            break;
        default:
            out.nadir = ObjectiveVector(spec.m, 1.0);
            break;
    }
    return out;
}

DecisionVector pareto_decision(const ProblemSpec& spec, std::span<const double> position) {
    if (position.size() + 1 != spec.m) throw DimensionError("position must have length m-1");
    DecisionVector x(spec.n);
    if (spec.family == Family::wfg3) {
        const std::size_t k = wfg_k(spec.m);
        const std::size_t per = k / (spec.m - 1);
        for (std::size_t i = 0; i < k; ++i) x[i] = position[i / per] * spec.bounds[i].upper;
        for (std::size_t i = k; i < spec.n; ++i) x[i] = 0.35 * spec.bounds[i].upper;
        return x;
    }
    for (std::size_t i = 0; i + 1 < spec.m; ++i) x[i] = position[i];
    const double distance = spec.family == Family::dtlz6 ? 0.0 : 0.5;
    for (std::size_t i = spec.m - 1; i < spec.n; ++i) x[i] = distance;
    return x;
}

double pf_residual(const ProblemSpec& spec, std::span<const double> f) {
    const double m = static_cast<double>(spec.m);
    double s = 0.0;
    switch (spec.family) {
        case Family::dtlz1:
            for (double v : f) s += v;
            return s - 0.5;
        case Family::dtlz2:
        case Family::dtlz3:
        case Family::dtlz4:
        case Family::dtlz5:
        case Family::dtlz6:
            for (double v : f) s += v * v;
            return s - 1.0;
        case Family::dtlz1inv:
        case Family::mdtlz1:
            for (double v : f) s += v;
            return s - 0.5 * (m - 1.0);
        case Family::dtlz2inv:
        case Family::dtlz3inv:
        case Family::dtlz4inv:
        case Family::mdtlz2:
        case Family::mdtlz3:
        case Family::mdtlz4:
            for (double v : f) s += (1.0 - v) * (1.0 - v);
            return s - 1.0;
        case Family::wfg3:
            for (std::size_t i = 0; i < f.size(); ++i) s += f[i] / (2.0 * static_cast<double>(i + 1));
            return s - 1.0;
    }
    throw UnsupportedError("pf_residual: unknown family");
}

std::vector<ObjectiveVector> sample_pf(const ProblemSpec& spec, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("sample_pf: count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ObjectiveVector> out;
    out.reserve(count);
    std::vector<double> pos(spec.m - 1);
    for (std::size_t c = 0; c < count; ++c) {
        for (auto& p : pos) p = unit(rng);
        out.push_back(evaluate(spec, pareto_decision(spec, pos)));
    }
    return out;
}

ObjectiveVector golden_point(const ProblemSpec& spec, std::span<const double> w_star) {
    if (w_star.size() != spec.m) throw DimensionError("w_star must have length m");
    for (double w : w_star)
        if (!(w > 0.0)) throw std::invalid_argument("w_star entries must be strictly positive");

    switch (spec.family) {
        case Family::dtlz1: {
            // psi >= sum f / sum w on the simplex sum f = 1/2, with equality at f proportional to w.
            double sw = 0.0;
            for (double w : w_star) sw += w;
            ObjectiveVector f(spec.m);
            for (std::size_t i = 0; i < spec.m; ++i) f[i] = 0.5 * w_star[i] / sw;
            return f;
        }
        case Family::dtlz2:
        case Family::dtlz3:
        case Family::dtlz4: {
            double norm = 0.0;
            for (double w : w_star) norm += w * w;
            norm = std::sqrt(norm);
            ObjectiveVector f(spec.m);
            for (std::size_t i = 0; i < spec.m; ++i) f[i] = w_star[i] / norm;
            return f;
        }
        default:
            break;
    }

    const std::size_t dim = spec.m - 1;
    auto objective = [&](std::span<const double> p) {
        return psi(evaluate(spec, pareto_decision(spec, p)), w_star);
    };

    // Starting points: full grid for up to two position variables, random otherwise.
    std::vector<std::vector<double>> starts;
    double spacing = 0.0;
    if (dim == 1) {
        constexpr int steps = 2000;
        spacing = 1.0 / steps;
        for (int i = 0; i <= steps; ++i) starts.push_back({i * spacing});
    } else if (dim == 2) {
        constexpr int steps = 200;
        spacing = 1.0 / steps;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) starts.push_back({i * spacing, j * spacing});
    } else {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        spacing = 0.05;
        for (int s = 0; s < 20000; ++s) {
            std::vector<double> p(dim);
            for (auto& v : p) v = unit(rng);
            starts.push_back(std::move(p));
        }
    }

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) scored.emplace_back(objective(starts[i]), i);
    const std::size_t keep = std::min<std::size_t>(8, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end());

    // Search directions: coordinate axes plus all pairwise diagonals, so that the
    // refinement can follow ridges of the max-type objective.
    std::vector<std::vector<double>> directions;
    for (std::size_t i = 0; i < dim; ++i) {
        for (double s : {1.0, -1.0}) {
            std::vector<double> d(dim, 0.0);
            d[i] = s;
            directions.push_back(std::move(d));
        }
        for (std::size_t j = i + 1; j < dim; ++j) {
            for (double si : {1.0, -1.0}) {
                for (double sj : {1.0, -1.0}) {
                    std::vector<double> d(dim, 0.0);
                    d[i] = si;
                    d[j] = sj;
                    directions.push_back(std::move(d));
                }
            }
        }
    }

    std::vector<double> best_p = starts[scored.front().second];
    double best_val = scored.front().first;
    std::mt19937_64 dir_rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t s = 0; s < keep; ++s) {
        std::vector<double> p = starts[scored[s].second];
        double val = scored[s].first;
        double step = spacing;
        while (step > 1e-12) {
            bool improved = false;
            auto try_direction = [&](std::span<const double> d) {
                std::vector<double> q(dim);
                for (std::size_t i = 0; i < dim; ++i) q[i] = std::clamp(p[i] + step * d[i], 0.0, 1.0);
                const double v = objective(q);
                if (v < val) {
                    val = v;
                    p = std::move(q);
                    improved = true;
                }
            };
            for (const auto& d : directions) try_direction(d);
            if (dim > 2) {
                for (int r = 0; r < 16; ++r) {
                    std::vector<double> d(dim);
                    for (auto& v : d) v = normal(dir_rng);
                    try_direction(d);
                }
            }
            if (!improved) step *= 0.5;
        }
        if (val < best_val) {
            best_val = val;
            best_p = p;
        }
    }
    return evaluate(spec, pareto_decision(spec, best_p));
}

}  // namespace iemo
