#include "sublinear/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "sublinear/capacity.hpp"

namespace sublinear {

namespace {

constexpr std::size_t kShapeGridPoints = 257;

double pow_abs(double v, double p) { return std::pow(std::abs(v), p); }

std::vector<double> grid(double lo, double hi, std::size_t points = kShapeGridPoints) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

double scale(double a, double b) { return kTolerance * std::max({1.0, std::abs(a), std::abs(b)}); }

void require_nondecreasing(const std::function<double(double)>& f, double lo, double hi) {
    const auto g = grid(lo, hi);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double a = f(g[i - 1]);
        const double b = f(g[i]);
        if (b < a - scale(a, b)) {
            std::ostringstream os;
            os << "function is not nondecreasing on [" << g[i - 1] << ", " << g[i] << "]";
            throw std::invalid_argument(os.str());
        }
    }
}

void require_nonnegative(const std::function<double(double)>& f, double lo, double hi) {
    for (double t : grid(lo, hi)) {
        if (!(f(t) >= 0.0)) throw std::invalid_argument("function takes a negative value at " + std::to_string(t));
    }
}

std::pair<double, double> shape_range(const RandomVariable& x, double extra) {
    return {std::min(x.min(), extra) - 1.0, std::max(x.max(), extra) + 1.0};
}

std::string fmt_pair(double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << "x=" << a << " y=" << b;
    return os.str();
}

}  // namespace

bool within_bound(double lhs, double rhs) { return lhs <= rhs + kTolerance * std::max(1.0, std::abs(rhs)); }

InequalityReport verify_holder(const MeasureFamily& family, const RandomVariable& x, const RandomVariable& y,
                               double p) {
    if (!(p > 1.0)) throw std::invalid_argument("Hoelder exponent must exceed 1");
    const double q = p / (p - 1.0);
    InequalityReport r;
    r.name = "holder";
    r.lhs = upper_expectation(family, (x * y).map([](double v) { return std::abs(v); }));
    const double mx = upper_expectation(family, x.map([p](double v) { return pow_abs(v, p); }));
    const double my = upper_expectation(family, y.map([q](double v) { return pow_abs(v, q); }));
    r.rhs = std::pow(mx, 1.0 / p) * std::pow(my, 1.0 / q);
    r.holds = within_bound(r.lhs, r.rhs);
    return r;
}

InequalityReport verify_chebyshev(const MeasureFamily& family, const RandomVariable& x,
                                  const std::function<double(double)>& f, double level, ChebyshevForm form) {
    const double denom = f(level);
    if (!(denom > 0.0)) throw std::invalid_argument("Chebyshev bound needs f(x) > 0 at the level");
    const auto [lo, hi] = shape_range(x, level);
    InequalityReport r;
    if (form == ChebyshevForm::nondecreasing) {
        require_nondecreasing(f, lo, hi);
        require_nonnegative(f, lo, hi);
        r.name = "chebyshev";
        r.lhs = upper_capacity(CapacityPair(family), Event::where(x, [level](double v) { return v >= level; }));
    } else {
        if (!(level > 0.0)) throw std::invalid_argument("even-form Chebyshev bound needs a positive level");
        const double reach = std::max(std::abs(lo), std::abs(hi));
        for (double t : grid(0.0, reach)) {
            const double a = f(t), b = f(-t);
            if (std::abs(a - b) > scale(a, b)) throw std::invalid_argument("function is not even");
        }
        require_nondecreasing(f, 0.0, reach);
        require_nonnegative(f, 0.0, reach);
        r.name = "chebyshev_even";
        r.lhs = upper_capacity(CapacityPair(family),
                               Event::where(x, [level](double v) { return std::abs(v) >= level; }));
    }
    r.rhs = upper_expectation(family, x.map(f)) / denom;
    r.holds = within_bound(r.lhs, r.rhs);
    return r;
}

InequalityReport verify_jensen(const MeasureFamily& family, const RandomVariable& x,
                               const std::function<double(double)>& f) {
    const auto [lo, hi] = shape_range(x, x.min());
    const auto g = grid(lo, hi);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double a = f(g[i - 1]), m = f(g[i]), b = f(g[i + 1]);
        if (m > 0.5 * (a + b) + scale(m, 0.5 * (a + b))) {
            throw std::invalid_argument("function is not convex near " + std::to_string(g[i]));
        }
    }
    InequalityReport r;
    r.name = "jensen";
    r.lhs = f(upper_expectation(family, x));
    r.rhs = upper_expectation(family, x.map(f));
    r.holds = within_bound(r.lhs, r.rhs);
    return r;
}

bool verify_cr(double x, double y, double p) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("Cr exponent must lie in [1, 2]");
    const double lhs = pow_abs(x + y, p);
    const double rhs = std::pow(2.0, p - 1.0) * (pow_abs(x, p) + pow_abs(y, p));
    return within_bound(lhs, rhs);
}

bool verify_positive_part(double x, double y) {
    const auto pos = [](double v) { return std::max(v, 0.0); };
    const auto neg = [](double v) { return std::max(-v, 0.0); };
    return pos(x + y) <= pos(x) + std::abs(y) && neg(x + y) <= neg(x) + std::abs(y);
}

RosenthalReport verify_rosenthal(const SequenceSpec& spec, double p, RosenthalForm form) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("Rosenthal exponent must lie in [1, 2]");
    double moments = 0.0;
    for (std::size_t k = 0; k < spec.length(); ++k) {
        const Marginal m = spec.marginal(k);
        const double upper = upper_expectation(m.family, m.values);
        if (form == RosenthalForm::drawdown && upper > kTolerance) {
            throw PreconditionError("coordinate " + std::to_string(k + 1) + " has positive upper mean " +
                                    std::to_string(upper));
        }
        if (form == RosenthalForm::centered) {
            const double lower = lower_expectation(m.family, m.values);
            if (std::abs(upper) > kTolerance || std::abs(lower) > kTolerance) {
                throw PreconditionError("coordinate " + std::to_string(k + 1) +
                                        " does not have zero upper and lower mean");
            }
        }
        moments += upper_expectation(m.family, m.values.map([p](double v) { return pow_abs(v, p); }));
    }
    RosenthalReport r;
    r.form = form;
    r.p = p;
    if (form == RosenthalForm::drawdown) {
        r.lhs = functional_upper_expectation(spec, PartialSumFunctional::max_suffix_drawdown(p));
        r.rhs = std::pow(2.0, 2.0 - p) * moments;
    } else {
        r.lhs = functional_upper_expectation(spec, PartialSumFunctional::max_abs_partial_sum(p));
        r.rhs = 2.0 * moments;
    }
    r.holds = within_bound(r.lhs, r.rhs);
    return r;
}

RosenthalSweepConfig widened_rosenthal_grid() {
    RosenthalSweepConfig c;
    c.support_values = {-1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 4.0};
    c.probability_grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    c.max_length = 2;
    return c;
}

std::vector<Marginal> rosenthal_grid_marginals(const RosenthalSweepConfig& config) {
    std::vector<double> support = config.support_values;
    std::sort(support.begin(), support.end());
    std::vector<Marginal> out;
    const auto& g = config.probability_grid;
    for (std::size_t i = 0; i < support.size(); ++i) {
        for (std::size_t j = i + 1; j < support.size(); ++j) {
            const RandomVariable values({support[i], support[j]});
            for (std::size_t a = 0; a < g.size(); ++a) {
                for (std::size_t b = a; b < g.size(); ++b) {
                    MeasureFamily family({DiscreteMeasure({1.0 - g[a], g[a]}), DiscreteMeasure({1.0 - g[b], g[b]})});
                    if (upper_expectation(family, values) <= kTolerance) out.emplace_back(family, values);
                }
            }
        }
    }
    return out;
}

namespace {

// max_{0<=k<=n} (S_n - S_k) straight from the definition.
double drawdown_by_definition(std::span<const double> x, double p) {
    double total = 0.0;
    for (double v : x) total += v;
    double best = 0.0;  // k = n
    double prefix = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        best = std::max(best, total - prefix);
        prefix += x[k];
    }
    return std::pow(best, p);
}

std::string describe_sequence(const std::vector<Marginal>& seq, double p) {
    std::ostringstream os;
    os << "p=" << p;
    for (const auto& m : seq) {
        os << " [{" << m.values[0] << "," << m.values[1] << "} P(hi) in {" << m.family.measure(0)[1] << ","
           << m.family.measure(1)[1] << "}]";
    }
    return os.str();
}

}  // namespace

RosenthalSweepReport rosenthal_sweep(const RosenthalSweepConfig& config) {
    const auto marginals = rosenthal_grid_marginals(config);
    const std::size_t count = marginals.size();
    const auto& exps = config.exponents;
    RosenthalSweepReport report;
    report.marginal_count = count;
    if (count == 0) return report;

    // moments[i][e] = E|X|^p_e of marginal i
    std::vector<std::vector<double>> moments(count, std::vector<double>(exps.size()));
    std::vector<bool> centered(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& m = marginals[i];
        for (std::size_t e = 0; e < exps.size(); ++e) {
            const double p = exps[e];
            moments[i][e] = upper_expectation(m.family, m.values.map([p](double v) { return pow_abs(v, p); }));
        }
        centered[i] = std::abs(upper_expectation(m.family, m.values)) <= kTolerance &&
                      std::abs(lower_expectation(m.family, m.values)) <= kTolerance;
    }

    struct Partial {
        std::vector<RosenthalSweepRow> rows;
        std::size_t centered_cases = 0, centered_violations = 0;
        double min_ratio = 1.0;
        std::string tightest;
    };

    for (std::size_t length = 1; length <= config.max_length; ++length) {
        // chunk by the first coordinate
        std::vector<Partial> partials(count);
        detail::for_each_chunk(count, config.threads, [&](std::size_t first) {
            Partial& part = partials[first];
            part.rows.resize(exps.size());
            for (std::size_t e = 0; e < exps.size(); ++e) {
                part.rows[e].length = length;
                part.rows[e].p = exps[e];
            }
            std::size_t tail = 1;
            for (std::size_t k = 1; k < length; ++k) tail *= count;
            std::vector<std::size_t> idx(length);
            std::vector<Marginal> seq(length);
            for (std::size_t code = 0; code < tail; ++code) {
                idx[0] = first;
                std::size_t rest = code;
                for (std::size_t k = 1; k < length; ++k) {
                    idx[k] = rest % count;
                    rest /= count;
                }
                bool all_centered = true;
                for (std::size_t k = 0; k < length; ++k) {
                    seq[k] = marginals[idx[k]];
                    all_centered = all_centered && centered[idx[k]];
                }
                const SequenceSpec spec(seq);
                for (std::size_t e = 0; e < exps.size(); ++e) {
                    const double p = exps[e];
                    double moment_sum = 0.0;
                    for (std::size_t k = 0; k < length; ++k) moment_sum += moments[idx[k]][e];
                    const double rhs = std::pow(2.0, 2.0 - p) * moment_sum;
                    const double lhs = functional_upper_expectation(spec, PartialSumFunctional::max_suffix_drawdown(p));
                    auto& row = part.rows[e];
                    ++row.cases;
                    if (!within_bound(lhs, rhs)) ++row.violations;
                    if (rhs > 0.0) {
                        const double ratio = (rhs - lhs) / rhs;
                        row.min_slack_ratio = std::min(row.min_slack_ratio, ratio);
                        if (ratio < part.min_ratio) {
                            part.min_ratio = ratio;
                            part.tightest = describe_sequence(seq, p);
                        }
                    }
                    if (config.compare_enumeration) {
                        TestFunction phi;
                        phi.arity = length;
                        phi.evaluate = [p](std::span<const double> x) { return drawdown_by_definition(x, p); };
                        const double enumerated = joint_upper_expectation(spec, phi);
                        row.max_enumeration_gap = std::max(row.max_enumeration_gap, std::abs(enumerated - lhs));
                    }
                    if (all_centered) {
                        ++part.centered_cases;
                        const double lhs2 =
                            functional_upper_expectation(spec, PartialSumFunctional::max_abs_partial_sum(p));
                        if (!within_bound(lhs2, 2.0 * moment_sum)) ++part.centered_violations;
                    }
                }
            }
        });

        std::vector<RosenthalSweepRow> rows(exps.size());
        for (std::size_t e = 0; e < exps.size(); ++e) {
            rows[e].length = length;
            rows[e].p = exps[e];
        }
        for (const auto& part : partials) {
            for (std::size_t e = 0; e < exps.size(); ++e) {
                rows[e].cases += part.rows[e].cases;
                rows[e].violations += part.rows[e].violations;
                rows[e].min_slack_ratio = std::min(rows[e].min_slack_ratio, part.rows[e].min_slack_ratio);
                rows[e].max_enumeration_gap = std::max(rows[e].max_enumeration_gap, part.rows[e].max_enumeration_gap);
            }
            report.centered_cases += part.centered_cases;
            report.centered_violations += part.centered_violations;
            if (part.min_ratio < report.min_slack_ratio) {
                report.min_slack_ratio = part.min_ratio;
                report.tightest_case = part.tightest;
            }
        }
        for (const auto& row : rows) {
            report.cases += row.cases;
            report.violations += row.violations;
            report.max_enumeration_gap = std::max(report.max_enumeration_gap, row.max_enumeration_gap);
            report.rows.push_back(row);
        }
    }
    return report;
}

std::size_t FuzzReport::violations() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.violations;
    return n;
}

namespace {

enum FuzzKind { kHolder, kChebyshev, kChebyshevEven, kJensen, kCr, kPositivePart, kFuzzKinds };

const char* fuzz_name(int k) {
    static const char* names[] = {"holder", "chebyshev", "chebyshev_even", "jensen", "cr", "positive_part"};
    return names[k];
}

RandomVariable fuzz_variable(std::mt19937_64& rng, std::size_t n) {
    // integer-valued half the time so level ties and equality cases occur
    if (rng() & 1U) {
        std::vector<double> v(n);
        for (auto& e : v) e = static_cast<double>(static_cast<int>(rng() % 11) - 5);
        return RandomVariable(std::move(v));
    }
    return random_variable(rng, n, -10.0, 10.0);
}

std::function<double(double)> nondecreasing_positive(std::mt19937_64& rng) {
    const double a = 0.05 + 0.95 * unit_uniform(rng);
    switch (rng() % 3) {
        case 0: return [a](double t) { return std::exp(a * t); };
        case 1: {
            const int k = 1 + static_cast<int>(rng() % 3);
            return [k](double t) { return 1.0 + std::pow(std::max(t, 0.0), k); };
        }
        default: return [a](double t) { return 2.0 + std::tanh(a * t); };
    }
}

std::function<double(double)> even_nondecreasing(std::mt19937_64& rng) {
    const double a = 0.05 + 0.95 * unit_uniform(rng);
    switch (rng() % 3) {
        case 0: {
            const double k = 1.0 + 2.0 * unit_uniform(rng);
            return [k](double t) { return std::pow(std::abs(t), k); };
        }
        case 1: return [a](double t) { return std::cosh(a * t); };
        default: {
            const double cap = 1.0 + 5.0 * unit_uniform(rng);
            return [cap](double t) { return 1.0 + std::min(std::abs(t), cap); };
        }
    }
}

std::function<double(double)> convex(std::mt19937_64& rng) {
    const double a = 2.0 * unit_uniform(rng) - 1.0;
    const double b = 10.0 * unit_uniform(rng) - 5.0;
    switch (rng() % 6) {
        case 0: return [](double t) { return t * t; };
        case 1: return [](double t) { return std::abs(t); };
        case 2: return [a](double t) { return std::exp(a * t); };
        case 3: return [b](double t) { return std::max(t - b, 0.0); };
        case 4: return [](double t) { return t * t * t * t / 100.0; };
        default: return [a, b](double t) { return std::max(a * t + b, -a * t); };
    }
}

}  // namespace

FuzzReport fuzz_inequalities(const FuzzConfig& config) {
    constexpr std::size_t kChunk = 1u << 14;
    const std::size_t chunks = (config.instances + kChunk - 1) / kChunk;
    std::vector<std::vector<FuzzRow>> partial(chunks);

    detail::for_each_chunk(chunks, config.threads, [&](std::size_t chunk) {
        std::mt19937_64 rng(mix_seed(config.seed, chunk));
        auto& rows = partial[chunk];
        rows.resize(kFuzzKinds);
        for (int k = 0; k < kFuzzKinds; ++k) {
            rows[k].inequality = fuzz_name(k);
            rows[k].min_slack = std::numeric_limits<double>::infinity();
        }
        const std::size_t begin = chunk * kChunk;
        const std::size_t end = std::min(config.instances, begin + kChunk);
        auto draw_family = [&]() {
            if (config.family) return *config.family;
            const std::size_t n = 1 + rng() % config.max_outcomes;
            const std::size_t m = 1 + rng() % config.max_measures;
            return random_family(rng, n, m);
        };
        auto note = [&](int k, bool holds, double slack, const std::string& witness) {
            auto& row = rows[k];
            ++row.instances;
            row.min_slack = std::min(row.min_slack, slack);
            if (!holds) {
                if (row.violations == 0) row.first_violation = witness;
                ++row.violations;
            }
        };
        for (std::size_t i = begin; i < end; ++i) {
            const MeasureFamily family = draw_family();
            const std::size_t n = family.outcome_count();
            const RandomVariable x = fuzz_variable(rng, n);
            const RandomVariable y = fuzz_variable(rng, n);

            const double p = 1.05 + 3.95 * unit_uniform(rng);  // keeps |y|^q finite for |y| <= 10
            const auto h = verify_holder(family, x, y, p);
            note(kHolder, h.holds, h.slack(), "p=" + std::to_string(p));

            const double level = std::round(20.0 * unit_uniform(rng) - 10.0) + ((rng() & 1U) ? 0.0 : 0.5);
            const auto c1 = verify_chebyshev(family, x, nondecreasing_positive(rng), level);
            note(kChebyshev, c1.holds, c1.slack(), "level=" + std::to_string(level));

            const double positive_level = std::abs(level) + 0.5;
            const auto c2 = verify_chebyshev(family, x, even_nondecreasing(rng), positive_level, ChebyshevForm::even);
            note(kChebyshevEven, c2.holds, c2.slack(), "level=" + std::to_string(positive_level));

            const auto j = verify_jensen(family, x, convex(rng));
            note(kJensen, j.holds, j.slack(), "jensen");

            const double a = 20.0 * unit_uniform(rng) - 10.0;
            const double b = (rng() % 8 == 0) ? a : 20.0 * unit_uniform(rng) - 10.0;
            const double pc = 1.0 + unit_uniform(rng);
            note(kCr, verify_cr(a, b, pc), 0.0, fmt_pair(a, b) + " p=" + std::to_string(pc));
            note(kPositivePart, verify_positive_part(a, -b), 0.0, fmt_pair(a, -b));
        }
    });

    FuzzReport report;
    report.rows.resize(kFuzzKinds);
    for (int k = 0; k < kFuzzKinds; ++k) {
        report.rows[k].inequality = fuzz_name(k);
        report.rows[k].min_slack = std::numeric_limits<double>::infinity();
    }
    for (const auto& rows : partial) {
        for (int k = 0; k < kFuzzKinds; ++k) {
            auto& dst = report.rows[k];
            if (dst.violations == 0 && rows[k].violations > 0) dst.first_violation = rows[k].first_violation;
            dst.instances += rows[k].instances;
            dst.violations += rows[k].violations;
            dst.min_slack = std::min(dst.min_slack, rows[k].min_slack);
        }
    }
    return report;
}

}  // namespace sublinear
