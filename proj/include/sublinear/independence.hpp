#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sublinear/core.hpp"

namespace sublinear {

/// One coordinate of an independent sequence: the family generating its
/// upper expectation and the values X_k takes on that family's outcomes.
struct Marginal {
    MeasureFamily family;
    RandomVariable values;

    Marginal() = default;
    Marginal(MeasureFamily f, RandomVariable v);
};

/// An ordered sequence X_1, X_2, ... where each X_{k+1} is independent of
/// (X_1, ..., X_k). Either an explicit list of marginals or a generator
/// producing marginal k (0-based) on demand, for long horizons.
class SequenceSpec {
public:
    using Generator = std::function<Marginal(std::size_t)>;

    explicit SequenceSpec(std::vector<Marginal> marginals);
    SequenceSpec(std::size_t length, Generator generator);

    /// n copies of one marginal, without materializing them.
    static SequenceSpec iid(Marginal marginal, std::size_t length);

    std::size_t length() const { return length_; }
    Marginal marginal(std::size_t k) const;
    /// Non-null iff every coordinate shares one marginal.
    const Marginal* common_marginal() const { return common_ ? &*common_ : nullptr; }
    /// First `n` coordinates as an explicit spec.
    SequenceSpec prefix(std::size_t n) const;

private:
    std::size_t length_ = 0;
    std::vector<Marginal> explicit_;
    Generator generator_;
    std::optional<Marginal> common_;
};

/// Refused when an exact computation would visit more states than allowed.
class StateSpaceError : public std::runtime_error {
public:
    StateSpaceError(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

inline constexpr double kDefaultStateGuard = 1e7;

/// Upper expectation of phi(X_1, ..., X_n) for an independent sequence,
/// computed by nesting: the expectation over the last coordinate is
/// innermost, the first outermost.
double joint_upper_expectation(const SequenceSpec& spec, const TestFunction& phi,
                               double state_guard = kDefaultStateGuard);

/// Same nesting with the coordinate order reversed (X_n outermost). Only
/// meaningful as a contrast: independence is not symmetric.
double reversed_joint_upper_expectation(const SequenceSpec& spec, const TestFunction& phi,
                                        double state_guard = kDefaultStateGuard);

/// A functional of the partial-sum path S_0 = 0, S_1, ..., S_n that only
/// depends on the path through the running sum and one running extremum.
struct PartialSumFunctional {
    enum class Kind { final_sum, max_suffix_drawdown, max_abs_partial_sum, custom };

    Kind kind = Kind::final_sum;
    double p = 1.0;

    // custom only: extremum starts at `initial`, is folded with each new
    // partial sum by `update`, and the path value is terminal(S_n, extremum).
    double initial = 0.0;
    std::function<double(double extremum, double sum)> update;
    std::function<double(double sum, double extremum)> terminal;

    /// |S_n|^p
    static PartialSumFunctional final_sum(double p);
    /// (max_{0<=k<=n} (S_n - S_k))^p
    static PartialSumFunctional max_suffix_drawdown(double p);
    /// max_{0<=k<=n} |S_k|^p
    static PartialSumFunctional max_abs_partial_sum(double p);
    static PartialSumFunctional custom(double initial, std::function<double(double, double)> update,
                                       std::function<double(double, double)> terminal);

    double start() const;
    double fold(double extremum, double sum) const;
    double value(double sum, double extremum) const;

    /// Evaluates the functional on an explicit increment path.
    double evaluate_path(std::span<const double> increments) const;
    /// The functional as an arity-n test function of the increments.
    TestFunction as_test_function(std::size_t n) const;
};

/// Exact upper expectation of f(path) by backward recursion over the
/// reachable (running sum, running extremum) states.
double functional_upper_expectation(const SequenceSpec& spec, const PartialSumFunctional& f,
                                    double state_guard = kDefaultStateGuard);

struct DistributionCheck {
    std::string name;
    double first = 0.0;
    double second = 0.0;
    double discrepancy = 0.0;
};

struct IdenticalDistributionReport {
    double tolerance = 1e-10;
    double max_discrepancy = 0.0;
    std::vector<DistributionCheck> checks;

    bool identical() const { return max_discrepancy <= tolerance; }
};

/// Polynomials up to degree four, clamps at several levels, absolute value
/// and positive part.
std::vector<TestFunction> default_distribution_battery();

IdenticalDistributionReport check_identical_distribution(const MeasureFamily& f1, const RandomVariable& x1,
                                                         const MeasureFamily& f2, const RandomVariable& x2,
                                                         const std::vector<TestFunction>& battery,
                                                         double tolerance = 1e-10);

}  // namespace sublinear
