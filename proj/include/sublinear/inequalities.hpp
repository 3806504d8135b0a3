#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sublinear/core.hpp"
#include "sublinear/independence.hpp"

namespace sublinear {

/// lhs <= rhs is asserted with tolerance kTolerance * max(1, |rhs|).
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;

    double slack() const { return rhs - lhs; }
};

bool within_bound(double lhs, double rhs);

/// E|XY| <= (E|X|^p)^(1/p) (E|Y|^q)^(1/q), q = p/(p-1). Throws if p <= 1.
InequalityReport verify_holder(const MeasureFamily& family, const RandomVariable& x, const RandomVariable& y,
                               double p);

enum class ChebyshevForm {
    nondecreasing,  // V(X >= x) <= E[f(X)] / f(x), f > 0 nondecreasing
    even            // V(|X| >= x) <= E[f(X)] / f(x), f even, nondecreasing on (0, inf), x > 0
};

/// Throws std::invalid_argument if f(x) <= 0, if f fails the sampled
/// monotonicity (or evenness) check on the relevant range, or if x <= 0 for
/// the even form.
InequalityReport verify_chebyshev(const MeasureFamily& family, const RandomVariable& x,
                                  const std::function<double(double)>& f, double level,
                                  ChebyshevForm form = ChebyshevForm::nondecreasing);

/// E[f(X)] >= f(E[X]) for convex f. Convexity is checked by sampled
/// midpoint differences; a failing f is rejected with std::invalid_argument.
InequalityReport verify_jensen(const MeasureFamily& family, const RandomVariable& x,
                               const std::function<double(double)>& f);

/// |x + y|^p <= 2^(p-1) (|x|^p + |y|^p) for p in [1, 2].
bool verify_cr(double x, double y, double p);

/// (x + y)^+ <= x^+ + |y| and (x + y)^- <= x^- + |y|.
bool verify_positive_part(double x, double y);

enum class RosenthalForm {
    drawdown,  // E[X_k] <= 0: E|max_k (S_n - S_k)|^p <= 2^(2-p) sum E|X_k|^p
    centered   // E[X_k] = lower E[X_k] = 0: E[max_k |S_k|^p] <= 2 sum E|X_k|^p
};

struct RosenthalReport {
    RosenthalForm form = RosenthalForm::drawdown;
    double p = 1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;

    double slack() const { return rhs - lhs; }
};

/// Exact left side via functional_upper_expectation. Throws
/// PreconditionError naming the first coordinate whose mean condition fails.
RosenthalReport verify_rosenthal(const SequenceSpec& spec, double p,
                                 RosenthalForm form = RosenthalForm::drawdown);

struct RosenthalSweepConfig {
    std::vector<double> support_values{-1.0, -0.5, 0.5, 1.0};
    std::vector<double> probability_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> exponents{1.0, 1.5, 2.0};
    std::size_t max_length = 3;
    bool compare_enumeration = true;
    unsigned threads = 1;
};

struct RosenthalSweepRow {
    std::size_t length = 0;
    double p = 1.0;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double min_slack_ratio = 1.0;  // min over cases of (rhs - lhs) / rhs, rhs > 0
    double max_enumeration_gap = 0.0;
};

struct RosenthalSweepReport {
    std::size_t marginal_count = 0;
    std::size_t cases = 0;
    std::size_t violations = 0;
    std::size_t centered_cases = 0;
    std::size_t centered_violations = 0;
    double min_slack_ratio = 1.0;
    double max_enumeration_gap = 0.0;
    std::string tightest_case;
    std::vector<RosenthalSweepRow> rows;
};

/// A wider grid for probing how tight the bound gets: adds small negative
/// support points paired with a large positive one, and probability 0.05.
RosenthalSweepConfig widened_rosenthal_grid();

/// Two-point marginals built from the support values and pairs of grid
/// probabilities (one per measure), keeping those with upper mean <= 0.
std::vector<Marginal> rosenthal_grid_marginals(const RosenthalSweepConfig& config);

/// Every ordered sequence of grid marginals of length 1..max_length, every
/// exponent: exact left side against the bound, and the partial-sum
/// recursion against full path enumeration.
RosenthalSweepReport rosenthal_sweep(const RosenthalSweepConfig& config);

struct FuzzConfig {
    std::size_t instances = 1'000'000;
    std::uint64_t seed = 0;
    std::size_t max_outcomes = 8;
    std::size_t max_measures = 5;
    unsigned threads = 1;
    /// When set, every instance uses this family instead of a random one.
    std::optional<MeasureFamily> family;
};

struct FuzzRow {
    std::string inequality;
    std::size_t instances = 0;
    std::size_t violations = 0;
    double min_slack = 0.0;
    std::string first_violation;
};

struct FuzzReport {
    std::vector<FuzzRow> rows;
    std::size_t violations() const;
};

/// Hoelder, both Chebyshev forms, Jensen, Cr and positive-part on
/// `instances` random instances each.
FuzzReport fuzz_inequalities(const FuzzConfig& config);

}  // namespace sublinear
