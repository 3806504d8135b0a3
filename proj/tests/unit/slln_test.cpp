#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "sublinear/slln.hpp"

using namespace sublinear;

TEST(ChoquetMoment, Examples) {
    EXPECT_NEAR(choquet_moment(fixtures::coin_family(), fixtures::coin_sign(), 1.7), 1.0, 1e-12);
    // uniform(+-1) charges {X^2 >= t} fully for t in (0, 1], so V(X^2 >= t) = 1.
    EXPECT_NEAR(choquet_moment(fixtures::mean_zero_family(), fixtures::identity3(), 2.0), 1.0, 1e-12);
    const MeasureFamily single({DiscreteMeasure({0.2, 0.3, 0.5})});
    const RandomVariable x({-2.0, 1.0, 0.5});
    const double classical = 0.2 * std::pow(2.0, 1.5) + 0.3 + 0.5 * std::pow(0.5, 1.5);
    EXPECT_NEAR(choquet_moment(single, x, 1.5), classical, 1e-12);
}

TEST(ChoquetMoment, DominatesUpperMoment) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng() % 8;
        const auto f = random_family(rng, n, 1 + rng() % 5);
        const auto x = random_variable(rng, n, -3, 3);
        const double p = 0.25 + 1.75 * unit_uniform(rng);
        EXPECT_GE(choquet_moment(f, x, p) + 1e-12, upper_expectation(f, x.map([p](double v) { return fixtures::pow_abs(v, p); })));
    }
}

TEST(TailExpectation, Examples) {
    const auto f = fixtures::mean_zero_family();
    const auto x = fixtures::identity3();
    EXPECT_EQ(tail_expectation(f, x, 1.0), 0.0);
    EXPECT_EQ(tail_expectation(f, x, 5.0), 0.0);
    EXPECT_NEAR(tail_expectation(f, x, 0.0), upper_expectation(f, x.map([](double v) { return std::abs(v); })), 1e-12);
    EXPECT_NEAR(tail_expectation(fixtures::coin_family(), fixtures::coin_sign(), 0.25), 0.75, 1e-12);
    EXPECT_THROW(tail_expectation(f, x, -1.0), std::invalid_argument);
}

TEST(TailExpectation, NonincreasingInLevel) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 200; ++t) {
        const auto f = random_family(rng, 5, 3);
        const auto x = random_variable(rng, 5, -4, 4);
        double prev = INFINITY;
        for (double a = 0.0; a <= 5.0; a += 0.125) {
            const double v = tail_expectation(f, x, a);
            EXPECT_LE(v, prev + 1e-12);
            prev = v;
        }
        EXPECT_EQ(tail_expectation(f, x, x.max_abs()), 0.0);
    }
}

TEST(SquareSum, ZeroVariable) {
    const auto r = square_sum_trace(fixtures::coin_family(), RandomVariable::constant(2, 0.0), 1.0, 1000);
    for (double s : r.partial_sums) EXPECT_EQ(s, 0.0);
    EXPECT_EQ(r.verdict, Verdict::converged);
}

TEST(SquareSum, BoundedAtPOneSumsToBaselQuantity) {
    const auto f = fixtures::mean_zero_family();
    const auto x = fixtures::identity3();
    const auto r = square_sum_trace(f, x, 1.0, 10000);
    const double second = upper_expectation(f, x * x);
    EXPECT_EQ(r.clamp_inactive_from, 1u);
    EXPECT_EQ(r.verdict, Verdict::converged);
    // Tail beyond N is about 1/N.
    EXPECT_NEAR(r.limit_estimate, second * std::numbers::pi * std::numbers::pi / 6.0, 2e-4);
}

TEST(SquareSum, MeanZeroAtThreeHalves) {
    const auto f = fixtures::mean_zero_family();
    const auto r = square_sum_trace(f, fixtures::identity3(), 1.5, 100000);
    EXPECT_EQ(r.verdict, Verdict::converged);
    EXPECT_NEAR(r.choquet_moment, 1.0, 1e-12);
}

TEST(SquareSum, TermBounds) {
    const MeasureFamily f({DiscreteMeasure({0.5, 0.5}), DiscreteMeasure({0.9, 0.1})});
    const RandomVariable x({-7.0, 3.0});
    for (double p : {0.5, 1.0, 1.5}) {
        const auto r = square_sum_trace(f, x, p, 2000);
        const double second = upper_expectation(f, x * x);
        for (std::size_t n = 1; n <= r.terms.size(); ++n) {
            EXPECT_LE(r.terms[n - 1], 1.0 + 1e-12);
            if (n >= r.clamp_inactive_from) {
                EXPECT_NEAR(r.terms[n - 1], second / std::pow(double(n), 2.0 / p), 1e-12);
            }
        }
        EXPECT_GE(std::pow(double(r.clamp_inactive_from), 1.0 / p), 7.0);
    }
    EXPECT_THROW(square_sum_trace(f, x, 2.0, 100), std::invalid_argument);
}

TEST(Simulate, ConstantSequenceHasZeroStatistic) {
    const Marginal half(fixtures::coin_family(), RandomVariable::constant(2, 0.5));
    const auto r = simulate_trajectories(SequenceSpec::iid(half, 1000), default_strategies(1), 5, 1.5, 0.5, 3,
                                         {10, 100, 1000});
    for (const auto& s : r.strategies) {
        for (const auto& row : s.values) {
            for (double v : row) EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Simulate, ClassicalScalingPilot) {
    const Marginal fair(fixtures::fair_coin(), fixtures::coin_sign());
    const auto r = simulate_trajectories(SequenceSpec::iid(fair, 100000), {SelectionStrategy::fixed(0)}, 200, 1.5, 0.0,
                                         17);
    // Classical CLT: |S_n| / n^{2/3} ~ n^{-1/6}, so 1e2 -> 1e5 scales by 1e3^{-1/6}.
    const double expected = std::pow(1e3, -1.0 / 6.0);
    EXPECT_NEAR(r.strategies[0].scaling_ratio, expected, 0.3 * expected);
    ASSERT_EQ(r.strategies[0].decade_ratios.size(), 3u);
}

TEST(Simulate, MeanConditionEnforced) {
    EXPECT_THROW(simulate_trajectories(SequenceSpec::iid(fixtures::coin_marginal(), 100), default_strategies(0), 3, 1.5,
                                       0.0, 0, {10, 100}),
                 PreconditionError);
    // p = 1 runs but carries the scope flag.
    const auto r = simulate_trajectories(SequenceSpec::iid(fixtures::coin_marginal(), 100), default_strategies(0), 3,
                                         1.0, 0.0, 0, {10, 100});
    EXPECT_TRUE(r.outside_proven_scope);
}

TEST(Simulate, RejectsBadCheckpoints) {
    const auto spec = SequenceSpec::iid(fixtures::mean_zero_marginal(), 100);
    EXPECT_THROW(simulate_trajectories(spec, default_strategies(0), 3, 1.5, 0.0, 0, {10, 10}), std::invalid_argument);
    EXPECT_THROW(simulate_trajectories(spec, default_strategies(0), 3, 1.5, 0.0, 0, {10, 1000}), std::invalid_argument);
    EXPECT_THROW(simulate_trajectories(spec, {SelectionStrategy::fixed(2)}, 3, 1.5, 0.0, 0, {10}), std::invalid_argument);
}

TEST(Simulate, DeterministicAcrossRunsAndThreads) {
    const auto spec = SequenceSpec::iid(fixtures::mean_zero_marginal(), 10000);
    const auto a = simulate_trajectories(spec, default_strategies(8), 24, 1.5, 0.0, 8, {100, 1000, 10000}, 1);
    const auto b = simulate_trajectories(spec, default_strategies(8), 24, 1.5, 0.0, 8, {100, 1000, 10000}, 4);
    ASSERT_EQ(a.strategies.size(), b.strategies.size());
    for (std::size_t s = 0; s < a.strategies.size(); ++s) {
        EXPECT_EQ(a.strategies[s].values, b.strategies[s].values);
        EXPECT_EQ(a.strategies[s].median, b.strategies[s].median);
    }
    const auto c = simulate_trajectories(spec, default_strategies(9), 24, 1.5, 0.0, 9, {100, 1000, 10000});
    EXPECT_NE(a.strategies[0].values, c.strategies[0].values);
}

TEST(Simulate, GreedyPicksWiderMeasure) {
    // On the mean-zero family greedy always prefers the +-1 measure, so it
    // tracks the fixed-0 strategy exactly under the same draw stream.
    const auto spec = SequenceSpec::iid(fixtures::mean_zero_marginal(), 1000);
    const auto r = simulate_trajectories(spec, {SelectionStrategy::greedy()}, 10, 1.5, 0.0, 5, {1000});
    const auto fixed = simulate_trajectories(spec, {SelectionStrategy::fixed(0)}, 10, 1.5, 0.0, 5, {1000});
    EXPECT_EQ(r.strategies[0].values, fixed.strategies[0].values);
}

TEST(EventFrequency, DominatedByUpperCapacity) {
    const auto f = fixtures::coin_family();
    const CapacityPair pair(f);
    const auto spec = SequenceSpec::iid(fixtures::coin_marginal(), 10);
    const Event one = Event::from_mask(2, 0b10);
    const std::size_t reps = 4000;
    for (const auto& s : default_strategies(6)) {
        for (const Event& e : {one, one.complement()}) {
            const double freq = event_frequency(spec, s, reps, 7, e, 6);
            const double v = pair.upper(e);
            EXPECT_LE(freq, v + 3.0 * std::sqrt(v * (1.0 - v) / double(reps))) << s.name();
            const double l = pair.lower(e);
            EXPECT_GE(freq, l - 3.0 * std::sqrt(l * (1.0 - l) / double(reps))) << s.name();
        }
    }
}

TEST(BorelCantelli, BoundedEventsNeverOccurLate) {
    const auto spec = SequenceSpec::iid(fixtures::mean_zero_marginal(), 2000);
    BorelCantelliConfig cfg;
    cfg.replicates = 50;
    cfg.horizon = 2000;
    cfg.seed = 1;
    const EventRule rule = [](std::size_t n, const Marginal& m) {
        const double bound = std::pow(static_cast<double>(n), 1.0 / 1.5);
        return Event::where(m.values, [bound](double v) { return std::abs(v) > bound; });
    };
    const auto r = borel_cantelli_probe(rule, spec, default_strategies(1), cfg);
    EXPECT_TRUE(r.premise_satisfied);
    EXPECT_EQ(r.rows.size(), 9u);
    for (const auto& row : r.rows) EXPECT_EQ(row.late_fraction, 0.0);
    EXPECT_TRUE(r.ok());
}

TEST(BorelCantelli, FullEventsFailPremise) {
    const auto spec = SequenceSpec::iid(fixtures::mean_zero_marginal(), 1000);
    BorelCantelliConfig cfg;
    cfg.replicates = 10;
    cfg.horizon = 1000;
    const auto r = borel_cantelli_probe([](std::size_t, const Marginal& m) { return Event::full(m.values.size()); },
                                        spec, default_strategies(0), cfg);
    EXPECT_FALSE(r.premise_satisfied);
    EXPECT_TRUE(r.rows.empty());
}

TEST(Marcinkiewicz, ZeroSpecIsConsistent) {
    const Marginal zero(fixtures::mean_zero_family(), RandomVariable::constant(3, 0.0));
    MarcinkiewiczConfig cfg;
    cfg.replicates = 5;
    cfg.checkpoints = {10, 100, 1000};
    const auto r = marcinkiewicz_check(SequenceSpec::iid(zero, 1000), 1.5, 0.0, cfg);
    EXPECT_TRUE(r.consistent);
    EXPECT_EQ(r.final_max, 0.0);
}

TEST(Marcinkiewicz, SmallExponentClassical) {
    const Marginal fair(fixtures::fair_coin(), fixtures::coin_sign());
    MarcinkiewiczConfig cfg;
    cfg.replicates = 20;
    cfg.checkpoints = {100, 1000, 10000};
    cfg.seed = 2;
    const auto r = marcinkiewicz_check(SequenceSpec::iid(fair, 10000), 0.5, 0.0, cfg);
    // |S_n| <= n, so |S_n| / n^2 <= 1 / n.
    EXPECT_LT(r.final_max, 1e-2);
    EXPECT_LE(r.final_max, 1e-4);
    EXPECT_TRUE(r.consistent);
    EXPECT_FALSE(r.outside_proven_scope);
}

TEST(Marcinkiewicz, HypothesisReport) {
    MarcinkiewiczConfig cfg;
    cfg.replicates = 5;
    cfg.checkpoints = {10, 100};
    const auto r = marcinkiewicz_check(SequenceSpec::iid(fixtures::mean_zero_marginal(), 100), 1.5, 0.0, cfg);
    EXPECT_NEAR(r.choquet_moment, 1.0, 1e-12);
    EXPECT_TRUE(r.mean_condition);
    EXPECT_TRUE(r.tail_vanishes);
    EXPECT_EQ(r.tail_expectations.back(), 0.0);
    EXPECT_THROW(marcinkiewicz_check(SequenceSpec::iid(fixtures::coin_marginal(), 100), 1.5, 0.0, cfg),
                 PreconditionError);
}
