#include "sublinear/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sublinear/capacity.hpp"

namespace sublinear {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::not_converged: return "not-converged";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(Criterion c) {
    return c == Criterion::satisfied ? "criterion-satisfied" : "criterion-not-satisfied";
}

Verdict convergence_verdict(std::span<const double> partial_sums, double eps, std::size_t window) {
    if (window == 0) throw std::invalid_argument("convergence window must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("convergence tolerance must be positive");
    if (partial_sums.size() < 2 * window) {
        throw std::invalid_argument("need at least " + std::to_string(2 * window) + " partial sums, got " +
                                    std::to_string(partial_sums.size()));
    }
    for (double s : partial_sums) {
        if (!std::isfinite(s) || std::abs(s) > kDivergenceGuard) return Verdict::not_converged;
    }
    const auto tail = partial_sums.subspan(partial_sums.size() - window);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (*hi - *lo < eps) return Verdict::converged;

    const double floor = kFloorFactor * eps;
    const std::size_t start = partial_sums.size() - window;
    bool bounded_away = true;
    for (std::size_t i = start; i < partial_sums.size(); ++i) {
        if (std::abs(partial_sums[i] - partial_sums[i - 1]) <= floor) {
            bounded_away = false;
            break;
        }
    }
    return bounded_away ? Verdict::not_converged : Verdict::inconclusive;
}

const SeriesTrace& SeriesDiagnostics::trace(const std::string& name) const {
    for (const auto& t : traces) {
        if (t.name == name) return t;
    }
    throw std::out_of_range("no trace named " + name);
}

namespace {

void check_horizon(const SequenceSpec& spec, std::size_t horizon, double eps, std::size_t window) {
    if (window == 0) throw std::invalid_argument("window must be positive");
    if (horizon < 2 * window) throw std::invalid_argument("horizon must be at least twice the window");
    if (horizon > spec.length()) throw std::invalid_argument("horizon exceeds the sequence length");
    if (!(eps > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

// Evaluates `terms(marginal)` for n = 1..horizon, once when the marginal is
// shared, and accumulates each component into its trace in order.
template <typename Terms>
void accumulate(const SequenceSpec& spec, std::size_t horizon, std::vector<SeriesTrace>& traces, Terms&& terms) {
    for (auto& t : traces) t.partial_sums.resize(horizon);
    std::vector<double> sums(traces.size(), 0.0);
    std::vector<double> shared;
    if (const Marginal* m = spec.common_marginal()) shared = terms(*m, 0);
    for (std::size_t n = 0; n < horizon; ++n) {
        const std::vector<double> v = shared.empty() ? terms(spec.marginal(n), n) : shared;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            sums[i] += v[i];
            traces[i].partial_sums[n] = sums[i];
        }
    }
}

std::size_t count_decreases(const std::vector<double>& s) {
    std::size_t bad = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] < s[i - 1]) ++bad;
    }
    return bad;
}

std::vector<SeriesTrace> named_traces(std::initializer_list<const char*> names) {
    std::vector<SeriesTrace> out;
    for (const char* n : names) {
        SeriesTrace t;
        t.name = n;
        out.push_back(std::move(t));
    }
    return out;
}

Criterion all_converged(std::vector<SeriesTrace>& traces, double eps, std::size_t window) {
    bool ok = true;
    for (auto& t : traces) {
        t.verdict = convergence_verdict(t.partial_sums, eps, window);
        ok = ok && t.verdict == Verdict::converged;
    }
    return ok ? Criterion::satisfied : Criterion::not_satisfied;
}

}  // namespace

SeriesDiagnostics theorem1_check(const SequenceSpec& spec, double p, std::size_t horizon, double eps,
                                 std::size_t window) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("moment exponent must lie in [1, 2]");
    check_horizon(spec, horizon, eps, window);
    SeriesDiagnostics d;
    d.window = window;
    d.eps = eps;
    d.traces = named_traces({"upper_mean", "lower_mean", "moment"});
    std::size_t crossings = 0;
    accumulate(spec, horizon, d.traces, [p, &crossings](const Marginal& m, std::size_t) {
        const double upper = upper_expectation(m.family, m.values);
        const double lower = lower_expectation(m.family, m.values);
        if (lower > upper + kTolerance) ++crossings;
        return std::vector<double>{
            upper, lower,
            upper_expectation(m.family, m.values.map([p](double v) { return std::pow(std::abs(v), p); }))};
    });
    d.assertion_violations = crossings + count_decreases(d.traces[2].partial_sums);
    d.overall = all_converged(d.traces, eps, window);
    return d;
}

SeriesDiagnostics three_series_check(const SequenceSpec& spec, double c, double q, std::size_t horizon,
                                     double eps, std::size_t window) {
    if (!(c > 0.0)) throw std::invalid_argument("truncation level must be positive");
    if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("moment exponent must lie in [1, 2]");
    check_horizon(spec, horizon, eps, window);
    SeriesDiagnostics d;
    d.window = window;
    d.eps = eps;
    d.traces = named_traces({"exceedance_capacity", "truncated_upper_mean", "truncated_lower_mean", "truncated_moment"});
    std::size_t crossings = 0;
    accumulate(spec, horizon, d.traces, [c, q, &crossings](const Marginal& m, std::size_t) {
        const RandomVariable clipped = truncate(m.values, c);
        const CapacityPair pair(m.family);
        const double upper = upper_expectation(m.family, clipped);
        const double lower = lower_expectation(m.family, clipped);
        if (lower > upper + kTolerance) ++crossings;
        return std::vector<double>{
            pair.upper(Event::where(m.values, [c](double v) { return std::abs(v) > c; })), upper, lower,
            upper_expectation(m.family, clipped.map([q](double v) { return std::pow(std::abs(v), q); }))};
    });
    d.assertion_violations = count_decreases(d.traces[0].partial_sums) + crossings +
                             count_decreases(d.traces[3].partial_sums);
    d.overall = all_converged(d.traces, eps, window);
    return d;
}

std::string KroneckerReport::summary() const {
    if (!conclusion_checked) return "premise not satisfied";
    return conclusion_holds ? "conclusion holds" : "conclusion fails";
}

KroneckerReport kronecker_check(std::span<const double> x, std::span<const double> a, double eps,
                                std::size_t window, double tolerance, bool allow_short_growth) {
    if (x.size() != a.size()) throw std::invalid_argument("sequences x and a differ in length");
    if (a.empty()) throw std::invalid_argument("sequences are empty");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0)) throw std::invalid_argument("a_n must be strictly positive");
        if (i > 0 && a[i] < a[i - 1]) throw std::invalid_argument("a_n must be nondecreasing");
    }
    if (!allow_short_growth && !(a.back() > 1e3 * a.front())) {
        throw std::invalid_argument("a_N must exceed 1e3 * a_1 for a meaningful check");
    }

    KroneckerReport r;
    r.conclusion_tolerance = tolerance;
    std::vector<double> premise(x.size());
    double weighted = 0.0, plain = 0.0;
    r.ratios.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        weighted += x[i] / a[i];
        plain += x[i];
        premise[i] = weighted;
        r.ratios[i] = std::abs(plain) / a[i];
    }
    r.final_ratio = r.ratios.back();
    r.premise = convergence_verdict(premise, eps, window);
    if (r.premise == Verdict::converged) {
        r.conclusion_checked = true;
        const auto tail = std::span<const double>(r.ratios).subspan(r.ratios.size() - window);
        r.conclusion_holds = *std::max_element(tail.begin(), tail.end()) <= tolerance;
    }
    return r;
}

}  // namespace sublinear
