#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sublinear/independence.hpp"

namespace sublinear {

enum class Verdict { converged, not_converged, inconclusive };
enum class Criterion { satisfied, not_satisfied };

std::string to_string(Verdict v);
std::string to_string(Criterion c);

/// Divergence guard on partial-sum magnitude.
inline constexpr double kDivergenceGuard = 1e12;
/// Terms whose magnitude stays above floor_factor * eps over the whole
/// window count as bounded away from zero.
inline constexpr double kFloorFactor = 10.0;

/// Cauchy-window surrogate for convergence of a numeric series given its
/// partial sums:
///   converged      max - min of the last `window` partial sums < eps
///   not_converged  every increment in the last window exceeds 10 eps in
///                  magnitude, or some partial sum exceeds 1e12 in magnitude
///   inconclusive   otherwise.
/// Throws std::invalid_argument if fewer than 2 * window sums are given.
Verdict convergence_verdict(std::span<const double> partial_sums, double eps, std::size_t window);

struct SeriesTrace {
    std::string name;
    std::vector<double> partial_sums;  // partial_sums[n-1] = sum of terms 1..n
    Verdict verdict = Verdict::inconclusive;
};

struct SeriesDiagnostics {
    std::vector<SeriesTrace> traces;
    std::size_t window = 0;
    double eps = 0.0;
    Criterion overall = Criterion::not_satisfied;
    /// Termwise or monotonicity assertions that failed while building traces.
    std::size_t assertion_violations = 0;

    const SeriesTrace& trace(const std::string& name) const;
};

/// Condition traces for a.s. convergence of sum X_n: partial sums of E[X_n],
/// of the lower expectations, and of E|X_n|^p, evaluated marginal by marginal
/// up to `horizon`. Satisfied iff all three converge.
SeriesDiagnostics theorem1_check(const SequenceSpec& spec, double p, std::size_t horizon, double eps,
                                 std::size_t window);

/// The three-series criterion with truncation level c:
///   (i)   sum V(|X_n| > c)
///   (ii)  sum E[X_n^c] and sum lowerE[X_n^c]
///   (iii) sum E|X_n^c|^q
/// Satisfied means the sufficient condition holds; not satisfied makes no
/// claim about divergence.
SeriesDiagnostics three_series_check(const SequenceSpec& spec, double c, double q, std::size_t horizon,
                                     double eps, std::size_t window);

struct KroneckerReport {
    Verdict premise = Verdict::inconclusive;  // of sum x_n / a_n
    bool conclusion_checked = false;
    bool conclusion_holds = false;
    double final_ratio = 0.0;  // |sum_{i<=N} x_i| / a_N
    double conclusion_tolerance = 0.0;
    std::vector<double> ratios;  // |sum_{i<=n} x_i| / a_n for every n

    std::string summary() const;
};

/// Checks the premise of the Kronecker lemma numerically and, only when it
/// holds, that |sum_{i<=n} x_i| / a_n stays below `tolerance` across the
/// last window. `a` must be positive and nondecreasing; unless
/// `allow_short_growth` is set it must also grow by a factor above 1e3.
KroneckerReport kronecker_check(std::span<const double> x, std::span<const double> a, double eps,
                                std::size_t window, double tolerance = 1e-2, bool allow_short_growth = false);

}  // namespace sublinear
