#include "sublinear/slln.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace sublinear {

double choquet_moment(const MeasureFamily& family, const RandomVariable& x, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("moment exponent must be positive");
    const CapacityPair pair(family);
    return choquet_integral(pair, x.map([p](double v) { return std::pow(std::abs(v), p); }), CapacitySide::upper)
        .value;
}

double tail_expectation(const MeasureFamily& family, const RandomVariable& x, double a) {
    if (!(a >= 0.0)) throw std::invalid_argument("tail level must be non-negative");
    return upper_expectation(family, x.map([a](double v) { return std::max(std::abs(v) - a, 0.0); }));
}

SquareSumReport square_sum_trace(const MeasureFamily& family, const RandomVariable& x, double p,
                                 std::size_t horizon, double eps, std::size_t window) {
    if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("square-sum exponent must lie in (0, 2)");
    SquareSumReport r;
    r.p = p;
    r.terms.resize(horizon);
    r.partial_sums.resize(horizon);
    const double bound = x.max_abs();
    r.clamp_inactive_from = 0;
    double sum = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double root = std::pow(static_cast<double>(n), 1.0 / p);
        const double scale = std::pow(static_cast<double>(n), 2.0 / p);
        if (r.clamp_inactive_from == 0 && root >= bound) r.clamp_inactive_from = n;
        const RandomVariable clipped = x.map([root](double v) {
            const double c = std::min(std::abs(v), root);
            return c * c;
        });
        const double term = upper_expectation(family, clipped) / scale;
        r.terms[n - 1] = term;
        sum += term;
        r.partial_sums[n - 1] = sum;
    }
    r.verdict = convergence_verdict(r.partial_sums, eps, window);
    r.limit_estimate = sum;
    r.choquet_moment = choquet_moment(family, x, p);
    return r;
}

std::string SelectionStrategy::name() const {
    switch (kind) {
        case Kind::fixed_index: return "fixed-" + std::to_string(index);
        case Kind::iid_random: return "iid-random";
        case Kind::greedy_adversarial: return "greedy-adversarial";
    }
    return "?";
}

std::vector<SelectionStrategy> default_strategies(std::uint64_t seed) {
    return {SelectionStrategy::fixed(0), SelectionStrategy::random(mix_seed(seed, 0x5e1ec7)),
            SelectionStrategy::greedy()};
}

namespace {

// Per-step access to marginals with cumulative distributions cached when
// the sequence is identically generated.
class PathSampler {
public:
    explicit PathSampler(const SequenceSpec& spec) : spec_(spec) {
        if (const Marginal* m = spec.common_marginal()) {
            shared_ = *m;
            shared_cdf_ = cumulative(shared_);
            has_shared_ = true;
        }
    }

    const Marginal& marginal(std::size_t k) {
        if (has_shared_) return shared_;
        if (k != cached_k_) {
            cached_ = spec_.marginal(k);
            cached_cdf_ = cumulative(cached_);
            cached_k_ = k;
        }
        return cached_;
    }

    const std::vector<std::vector<double>>& cdf(std::size_t k) {
        marginal(k);
        return has_shared_ ? shared_cdf_ : cached_cdf_;
    }

    // Index of the sampled outcome under measure j of coordinate k.
    std::size_t draw(std::size_t k, std::size_t j, double u) {
        const auto& c = cdf(k)[j];
        const auto it = std::upper_bound(c.begin(), c.end(), u);
        std::size_t w = static_cast<std::size_t>(it - c.begin());
        const auto& probs = marginal(k).family.measure(j);
        w = std::min(w, probs.size() - 1);
        // rounding in the last cumulative entry must not land on an uncharged outcome
        while (w > 0 && probs[w] == 0.0) --w;
        return w;
    }

private:
    static std::vector<std::vector<double>> cumulative(const Marginal& m) {
        std::vector<std::vector<double>> out;
        for (const auto& p : m.family.measures()) {
            std::vector<double> c(p.size());
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) c[i] = (s += p[i]);
            out.push_back(std::move(c));
        }
        return out;
    }

    const SequenceSpec& spec_;
    bool has_shared_ = false;
    Marginal shared_;
    std::vector<std::vector<double>> shared_cdf_;
    Marginal cached_;
    std::vector<std::vector<double>> cached_cdf_;
    std::size_t cached_k_ = std::numeric_limits<std::size_t>::max();
};

std::size_t choose_measure(const SelectionStrategy& s, const Marginal& m, double sum, std::size_t n, double mu,
                           std::mt19937_64& select_rng) {
    const std::size_t count = m.family.measure_count();
    switch (s.kind) {
        case SelectionStrategy::Kind::fixed_index: return s.index;
        case SelectionStrategy::Kind::iid_random: return static_cast<std::size_t>(select_rng() % count);
        case SelectionStrategy::Kind::greedy_adversarial: {
            // n is the number of steps already taken
            const double centre = sum - static_cast<double>(n + 1) * mu;
            std::size_t best = 0;
            double best_abs = -1.0, best_sq = -1.0;
            for (std::size_t j = 0; j < count; ++j) {
                const auto& p = m.family.measure(j);
                double e_abs = 0.0, e_sq = 0.0;
                for (std::size_t w = 0; w < p.size(); ++w) {
                    const double d = centre + m.values[w];
                    e_abs += p[w] * std::abs(d);
                    e_sq += p[w] * d * d;
                }
                if (e_abs > best_abs || (e_abs == best_abs && e_sq > best_sq)) {
                    best = j;
                    best_abs = e_abs;
                    best_sq = e_sq;
                }
            }
            return best;
        }
    }
    return 0;
}

// Samples one path of `horizon` steps, calling observe(n, outcome, sum)
// after step n (1-based).
template <typename Observe>
void sample_path(PathSampler& sampler, const SelectionStrategy& strategy, std::size_t horizon, double mu,
                 std::uint64_t draw_seed, std::uint64_t select_seed, Observe&& observe) {
    std::mt19937_64 draw_rng(draw_seed);
    std::mt19937_64 select_rng(select_seed);
    double sum = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const Marginal& m = sampler.marginal(k);
        const std::size_t j = choose_measure(strategy, m, sum, k, mu, select_rng);
        const std::size_t w = sampler.draw(k, j, unit_uniform(draw_rng));
        sum += m.values[w];
        observe(k + 1, w, sum);
    }
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

void require_mean(const Marginal& m, double mu, std::size_t k) {
    const double upper = upper_expectation(m.family, m.values);
    const double lower = lower_expectation(m.family, m.values);
    if (std::abs(upper - mu) > kTolerance || std::abs(lower - mu) > kTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "coordinate " << k + 1 << " has upper mean " << upper << " and lower mean " << lower
           << ", expected both equal to " << mu;
        throw PreconditionError(os.str());
    }
}

void validate_strategies(const SequenceSpec& spec, const std::vector<SelectionStrategy>& strategies) {
    if (strategies.empty()) throw std::invalid_argument("at least one selection strategy is required");
    for (const auto& s : strategies) {
        if (s.kind != SelectionStrategy::Kind::fixed_index) continue;
        const std::size_t count = spec.marginal(0).family.measure_count();
        if (s.index >= count) {
            throw std::invalid_argument("fixed strategy index " + std::to_string(s.index) +
                                        " exceeds the family size " + std::to_string(count));
        }
    }
}

}  // namespace

SllnReport simulate_trajectories(const SequenceSpec& spec, const std::vector<SelectionStrategy>& strategies,
                                 std::size_t replicates, double p, double mu, std::uint64_t seed,
                                 const std::vector<std::size_t>& checkpoints, unsigned threads) {
    if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("exponent p must lie in (0, 2)");
    if (checkpoints.empty()) throw std::invalid_argument("at least one checkpoint is required");
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        if (checkpoints[j] == 0 || (j > 0 && checkpoints[j] <= checkpoints[j - 1])) {
            throw std::invalid_argument("checkpoints must be positive and strictly increasing");
        }
    }
    const std::size_t horizon = checkpoints.back();
    if (horizon > spec.length()) throw std::invalid_argument("last checkpoint exceeds the sequence length");
    if (replicates == 0) throw std::invalid_argument("at least one replicate is required");
    validate_strategies(spec, strategies);
    if (p > 1.0) {
        if (spec.common_marginal()) {
            require_mean(*spec.common_marginal(), mu, 0);
        } else {
            for (std::size_t k = 0; k < horizon; ++k) require_mean(spec.marginal(k), mu, k);
        }
    }

    SllnReport report;
    report.p = p;
    report.mu = mu;
    report.seed = seed;
    report.replicates = replicates;
    report.checkpoints = checkpoints;
    report.outside_proven_scope = (p == 1.0);

    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto& strategy = strategies[s];
        StrategyTrajectories out;
        out.strategy = strategy.name();
        out.values.assign(replicates, std::vector<double>(checkpoints.size(), 0.0));
        const std::uint64_t strategy_seed = mix_seed(seed, s);

        detail::for_each_chunk(replicates, threads, [&](std::size_t r) {
            PathSampler sampler(spec);
            std::size_t next = 0;
            auto& row = out.values[r];
            sample_path(sampler, strategy, horizon, mu, mix_seed(strategy_seed, r), mix_seed(strategy.seed, r),
                        [&](std::size_t n, std::size_t, double sum) {
                            if (next < checkpoints.size() && n == checkpoints[next]) {
                                const double nd = static_cast<double>(n);
                                row[next++] = std::abs(sum - nd * mu) / std::pow(nd, 1.0 / p);
                            }
                        });
        });

        for (std::size_t j = 0; j < checkpoints.size(); ++j) {
            std::vector<double> column(replicates);
            for (std::size_t r = 0; r < replicates; ++r) column[r] = out.values[r][j];
            out.median.push_back(quantile(column, 0.5));
            out.q90.push_back(quantile(column, 0.9));
            out.maximum.push_back(*std::max_element(column.begin(), column.end()));
        }
        for (std::size_t j = 1; j < checkpoints.size(); ++j) out.decade_ratios.push_back(ratio(out.median[j], out.median[j - 1]));
        out.scaling_ratio = ratio(out.median.back(), out.median.front());
        report.strategies.push_back(std::move(out));
    }
    return report;
}

double event_frequency(const SequenceSpec& spec, const SelectionStrategy& strategy, std::size_t replicates,
                       std::size_t step, const Event& event, std::uint64_t seed) {
    if (step == 0 || step > spec.length()) throw std::invalid_argument("step out of range");
    if (replicates == 0) throw std::invalid_argument("at least one replicate is required");
    validate_strategies(spec, {strategy});
    PathSampler sampler(spec);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        sample_path(sampler, strategy, step, 0.0, mix_seed(seed, r), mix_seed(strategy.seed, r),
                    [&](std::size_t n, std::size_t w, double) {
                        if (n == step && event.contains(w)) ++hits;
                    });
    }
    return static_cast<double>(hits) / static_cast<double>(replicates);
}

bool BorelCantelliReport::ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const BorelCantelliRow& r) { return r.within_bound; });
}

BorelCantelliReport borel_cantelli_probe(const EventRule& rule, const SequenceSpec& spec,
                                         const std::vector<SelectionStrategy>& strategies,
                                         const BorelCantelliConfig& config) {
    const std::size_t horizon = config.horizon;
    if (horizon > spec.length()) throw std::invalid_argument("horizon exceeds the sequence length");
    if (config.replicates == 0) throw std::invalid_argument("at least one replicate is required");
    validate_strategies(spec, strategies);

    BorelCantelliReport report;
    std::vector<Event> events;
    events.reserve(horizon);
    std::vector<double> capacity(horizon);
    double running = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const Marginal m = spec.marginal(k);
        events.push_back(rule(k + 1, m));
        capacity[k] = CapacityPair(m.family).upper(events.back());
        report.capacity_partial_sums.push_back(running += capacity[k]);
    }
    report.premise = convergence_verdict(report.capacity_partial_sums, config.eps, config.window);
    report.premise_satisfied = report.premise == Verdict::converged;
    if (!report.premise_satisfied) return report;

    const double replicates = static_cast<double>(config.replicates);
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto& strategy = strategies[s];
        std::vector<std::size_t> last(config.replicates, 0);  // last step with an occurrence
        PathSampler sampler(spec);
        for (std::size_t r = 0; r < config.replicates; ++r) {
            sample_path(sampler, strategy, horizon, 0.0, mix_seed(mix_seed(config.seed, s), r),
                        mix_seed(strategy.seed, r), [&](std::size_t n, std::size_t w, double) {
                            if (events[n - 1].contains(w)) last[r] = n;
                        });
        }
        for (std::size_t n0 : config.n0_grid) {
            if (n0 >= horizon) continue;
            BorelCantelliRow row;
            row.strategy = strategy.name();
            row.n0 = n0;
            const auto late = std::count_if(last.begin(), last.end(), [n0](std::size_t n) { return n > n0; });
            row.late_fraction = static_cast<double>(late) / replicates;
            row.union_bound = report.capacity_partial_sums.back() - report.capacity_partial_sums[n0 - 1];
            const double b = std::min(1.0, row.union_bound);
            row.sampling_error = std::sqrt(b * (1.0 - b) / replicates);
            row.within_bound = row.late_fraction <= row.union_bound + 3.0 * row.sampling_error;
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string MarcinkiewiczReport::verdict() const {
    std::string v = consistent ? "consistent with theorem" : "inconsistent with theorem";
    if (outside_proven_scope) v += " (outside proven scope: p = 1)";
    return v;
}

MarcinkiewiczReport marcinkiewicz_check(const SequenceSpec& spec, double p, double mu,
                                        const MarcinkiewiczConfig& config) {
    if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("exponent p must lie in (0, 2)");
    MarcinkiewiczReport r;
    r.p = p;
    r.mu = mu;
    r.outside_proven_scope = (p == 1.0);

    const Marginal first = spec.marginal(0);
    r.choquet_moment = choquet_moment(first.family, first.values, p);
    r.upper_mean = upper_expectation(first.family, first.values);
    r.lower_mean = lower_expectation(first.family, first.values);
    r.mean_condition = std::abs(r.upper_mean - mu) <= kTolerance && std::abs(r.lower_mean - mu) <= kTolerance;
    if (p > 1.0 && !r.mean_condition) {
        std::ostringstream os;
        os.precision(17);
        os << "upper mean " << r.upper_mean << " and lower mean " << r.lower_mean << " must both equal mu = " << mu;
        throw PreconditionError(os.str());
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double a : config.tail_grid) {
        const double t = tail_expectation(first.family, first.values, a);
        r.tail_expectations.push_back(t);
        if (t > previous + kTolerance) r.tail_vanishes = false;
        previous = t;
    }
    r.tail_vanishes = r.tail_vanishes && tail_expectation(first.family, first.values, first.values.max_abs()) == 0.0;

    if (!spec.common_marginal()) {
        const auto battery = default_distribution_battery();
        for (std::size_t n : config.checkpoints) {
            if (n > spec.length()) break;
            const Marginal m = spec.marginal(n - 1);
            const auto check = check_identical_distribution(first.family, first.values, m.family, m.values, battery);
            r.identical_distribution_gap = std::max(r.identical_distribution_gap, check.max_discrepancy);
        }
        if (r.identical_distribution_gap > 1e-10) {
            throw PreconditionError("sequence is not identically distributed across checkpoints");
        }
    }

    const auto strategies = config.strategies.empty() ? default_strategies(config.seed) : config.strategies;
    r.trajectories = simulate_trajectories(spec, strategies, config.replicates, p, mu, config.seed,
                                           config.checkpoints, config.threads);
    for (const auto& s : r.trajectories.strategies) {
        r.final_max = std::max(r.final_max, s.maximum.back());
        r.worst_scaling_ratio = std::max(r.worst_scaling_ratio, s.scaling_ratio);
    }
    r.consistent = r.final_max < config.threshold && r.worst_scaling_ratio < config.ratio_bound;
    return r;
}

}  // namespace sublinear
