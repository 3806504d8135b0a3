#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sublinear/capacity.hpp"
#include "sublinear/independence.hpp"
#include "sublinear/series.hpp"

namespace sublinear {

/// Choquet integral of |X|^p against the upper capacity.
double choquet_moment(const MeasureFamily& family, const RandomVariable& x, double p);

/// E[(|X| - a)^+].
double tail_expectation(const MeasureFamily& family, const RandomVariable& x, double a);

struct SquareSumReport {
    double p = 1.0;
    std::vector<double> terms;         // E[(|X| ^ n^{1/p})^2] / n^{2/p}, n = 1..N
    std::vector<double> partial_sums;
    Verdict verdict = Verdict::inconclusive;
    double limit_estimate = 0.0;       // last partial sum
    double choquet_moment = 0.0;       // C_V(|X|^p), for context only
    std::size_t clamp_inactive_from = 1;  // first n with n^{1/p} >= max|X|
};

/// Partial sums of the truncated-square series up to `horizon`, judged by
/// convergence_verdict(eps, window). Throws if p is outside (0, 2).
SquareSumReport square_sum_trace(const MeasureFamily& family, const RandomVariable& x, double p,
                                 std::size_t horizon, double eps = 1e-3, std::size_t window = 100);

/// How a sampled path picks, at every step, the measure it draws from.
struct SelectionStrategy {
    enum class Kind {
        fixed_index,        // always measure `index`
        iid_random,         // uniformly random measure each step
        greedy_adversarial  // maximizes E|S_n + X - (n+1) mu|, ties by second moment, then index
    };

    Kind kind = Kind::fixed_index;
    std::size_t index = 0;
    std::uint64_t seed = 0;

    static SelectionStrategy fixed(std::size_t index) { return {Kind::fixed_index, index, 0}; }
    static SelectionStrategy random(std::uint64_t seed) { return {Kind::iid_random, 0, seed}; }
    static SelectionStrategy greedy() { return {Kind::greedy_adversarial, 0, 0}; }

    std::string name() const;
};

/// The three default stressors: fixed index 0, i.i.d. random, greedy.
std::vector<SelectionStrategy> default_strategies(std::uint64_t seed);

struct StrategyTrajectories {
    std::string strategy;
    /// values[r][j] = |S_n - n mu| / n^{1/p} at checkpoint j of replicate r
    std::vector<std::vector<double>> values;
    std::vector<double> median;    // per checkpoint
    std::vector<double> q90;
    std::vector<double> maximum;
    /// median at each checkpoint divided by the median at the previous one
    std::vector<double> decade_ratios;
    /// median at the last checkpoint divided by the median at the first
    double scaling_ratio = 0.0;
};

struct SllnReport {
    double p = 1.0;
    double mu = 0.0;
    std::uint64_t seed = 0;
    std::size_t replicates = 0;
    std::vector<std::size_t> checkpoints;
    bool outside_proven_scope = false;  // p == 1
    std::vector<StrategyTrajectories> strategies;
};

inline const std::vector<std::size_t> kDefaultCheckpoints{100, 1000, 10000, 100000};

/// Samples `replicates` paths per strategy. Replicate r of strategy s draws
/// outcomes from an mt19937_64 seeded with mix_seed(mix_seed(seed, s), r);
/// random selection uses mix_seed(strategy.seed, r). Throws on p outside
/// (0, 2), on non-increasing checkpoints, and (for 1 < p < 2) when some
/// marginal does not have upper and lower mean equal to mu.
SllnReport simulate_trajectories(const SequenceSpec& spec, const std::vector<SelectionStrategy>& strategies,
                                 std::size_t replicates, double p, double mu, std::uint64_t seed,
                                 const std::vector<std::size_t>& checkpoints = kDefaultCheckpoints,
                                 unsigned threads = 1);

/// Fraction of replicates whose outcome at step `step` (1-based) lies in
/// `event`, sampling as in simulate_trajectories with mu = 0.
double event_frequency(const SequenceSpec& spec, const SelectionStrategy& strategy, std::size_t replicates,
                       std::size_t step, const Event& event, std::uint64_t seed);

using EventRule = std::function<Event(std::size_t n, const Marginal& marginal)>;

struct BorelCantelliRow {
    std::string strategy;
    std::size_t n0 = 0;
    double late_fraction = 0.0;  // replicates with an occurrence at some n > n0
    double union_bound = 0.0;    // sum_{n0 < n <= N} V(A_n)
    double sampling_error = 0.0; // sqrt(b (1 - b) / R), b = min(1, union_bound)
    bool within_bound = true;    // late_fraction <= union_bound + 3 sampling_error
};

struct BorelCantelliReport {
    Verdict premise = Verdict::inconclusive;
    bool premise_satisfied = false;
    std::vector<double> capacity_partial_sums;
    std::vector<BorelCantelliRow> rows;

    bool ok() const;
};

struct BorelCantelliConfig {
    std::size_t replicates = 1000;
    std::size_t horizon = 10000;
    std::vector<std::size_t> n0_grid{10, 100, 1000};
    double eps = 1e-3;
    std::size_t window = 100;
    std::uint64_t seed = 0;
};

/// Empirical check that events with summable upper capacity stop occurring.
/// When the capacity series fails the premise check, no rows are produced.
BorelCantelliReport borel_cantelli_probe(const EventRule& rule, const SequenceSpec& spec,
                                         const std::vector<SelectionStrategy>& strategies,
                                         const BorelCantelliConfig& config);

struct MarcinkiewiczConfig {
    std::vector<SelectionStrategy> strategies;  // empty: default_strategies(seed)
    std::size_t replicates = 100;
    std::vector<std::size_t> checkpoints = kDefaultCheckpoints;
    double threshold = 0.7;
    double ratio_bound = 0.5;
    std::vector<double> tail_grid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct MarcinkiewiczReport {
    double p = 1.0;
    double mu = 0.0;
    double choquet_moment = 0.0;
    double upper_mean = 0.0;
    double lower_mean = 0.0;
    bool mean_condition = true;          // only required for 1 < p < 2
    std::vector<double> tail_expectations;  // on the configured grid
    bool tail_vanishes = true;
    double identical_distribution_gap = 0.0;
    double final_max = 0.0;              // over strategies and replicates
    double worst_scaling_ratio = 0.0;    // over strategies
    bool consistent = false;
    bool outside_proven_scope = false;
    SllnReport trajectories;

    std::string verdict() const;
};

/// Hypothesis checks followed by simulate_trajectories. Consistent iff the
/// largest statistic at the final checkpoint is below `threshold` and every
/// strategy's scaling ratio is below `ratio_bound`.
MarcinkiewiczReport marcinkiewicz_check(const SequenceSpec& spec, double p, double mu,
                                        const MarcinkiewiczConfig& config);

}  // namespace sublinear
