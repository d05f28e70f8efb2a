#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iemo {

using ObjectiveVector = std::vector<double>;
using DecisionVector = std::vector<double>;

enum class Family {
    dtlz1, dtlz2, dtlz3, dtlz4, dtlz5, dtlz6,
    dtlz1inv, dtlz2inv, dtlz3inv, dtlz4inv,
    mdtlz1, mdtlz2, mdtlz3, mdtlz4,
    wfg3
};

std::string to_string(Family family);
/// Parses the lowercase identifier used by the CLI and the service ("dtlz2", "mdtlz3", "wfg3", ...).
Family parse_family(std::string_view name);

struct Interval {
    double lower{0.0};
    double upper{1.0};
};

struct ProblemSpec {
    Family family{Family::dtlz2};
    std::size_t m{3};
    std::size_t n{0};
    std::vector<Interval> bounds;

    /// Builds a validated spec. `n == 0` selects the family default.
    static ProblemSpec make(Family family, std::size_t m, std::size_t n = 0);
    static std::size_t default_n(Family family, std::size_t m);
    void validate() const;
};

struct ProblemMeta {
    ObjectiveVector ideal;
    std::optional<ObjectiveVector> nadir;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BoundsError : public std::out_of_range {
public:
    BoundsError(std::size_t index, double value);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

ObjectiveVector evaluate(const ProblemSpec& spec, std::span<const double> x);

ProblemMeta meta(const ProblemSpec& spec);

/// Decision vector whose distance variables sit at their Pareto-optimal value and whose
/// position variables take `position` (length m-1, each in [0,1]).
DecisionVector pareto_decision(const ProblemSpec& spec, std::span<const double> position);

/// Deviation of `f` from the family's Pareto-front identity (0 on the front).
double pf_residual(const ProblemSpec& spec, std::span<const double> f);

std::vector<ObjectiveVector> sample_pf(const ProblemSpec& spec, std::size_t count, std::uint64_t seed);

/// Minimizer over the true front of psi(f) = max_i f_i / w_i (z* = origin).
/// Closed form for dtlz1 and dtlz2-4; other families use a grid/random start plus
/// compass-search refinement over the position variables, converged to a step of 1e-12.
ObjectiveVector golden_point(const ProblemSpec& spec, std::span<const double> w_star);

}  // namespace iemo
