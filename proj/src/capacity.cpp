#include "sublinear/capacity.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace sublinear {

namespace {

void require_event_space(const MeasureFamily& family, const Event& a) {
    if (a.size() != family.outcome_count()) {
        throw DimensionError("event has " + std::to_string(a.size()) +
                             " outcomes but the measure family has " +
                             std::to_string(family.outcome_count()));
    }
}

std::vector<std::size_t> members(std::uint64_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
        if (mask & 1U) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> members(const Event& e) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e.contains(i)) out.push_back(i);
    }
    return out;
}

}  // namespace

Event Event::from_mask(std::size_t outcomes, std::uint64_t mask) {
    if (outcomes > 64) throw std::invalid_argument("bit masks cover at most 64 outcomes");
    std::vector<bool> m(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) m[i] = (mask >> i) & 1U;
    return Event(std::move(m));
}

Event Event::where(const RandomVariable& x, const std::function<bool(double)>& pred) {
    std::vector<bool> m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m[i] = pred(x[i]);
    return Event(std::move(m));
}

Event Event::complement() const {
    std::vector<bool> m(membership_);
    m.flip();
    return Event(std::move(m));
}

Event Event::operator|(const Event& other) const {
    if (size() != other.size()) throw DimensionError("event union over different outcome sets");
    std::vector<bool> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = membership_[i] || other.membership_[i];
    return Event(std::move(m));
}

Event Event::operator&(const Event& other) const {
    if (size() != other.size()) throw DimensionError("event intersection over different outcome sets");
    std::vector<bool> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = membership_[i] && other.membership_[i];
    return Event(std::move(m));
}

RandomVariable Event::indicator() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = membership_[i] ? 1.0 : 0.0;
    return RandomVariable(std::move(v));
}

double CapacityPair::upper(const Event& a) const {
    require_event_space(*family_, a);
    return upper_expectation(*family_, a.indicator());
}

double CapacityPair::lower(const Event& a) const { return 1.0 - upper(a.complement()); }

double upper_capacity(const CapacityPair& pair, const Event& a) { return pair.upper(a); }
double lower_capacity(const CapacityPair& pair, const Event& a) { return pair.lower(a); }

ChoquetValue choquet_integral(const CapacityPair& pair, const RandomVariable& x, CapacitySide which) {
    require_same_space(pair.family(), x);
    std::vector<double> levels(x.values().begin(), x.values().end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    auto survival = [&](double t) {
        const Event at_least = Event::where(x, [t](double v) { return v >= t; });
        return which == CapacitySide::upper ? pair.upper(at_least) : pair.lower(at_least);
    };

    // V(X >= t) = 1 for t <= v_1 and equals V(X >= v_j) on (v_{j-1}, v_j].
    double value = levels.front();
    for (std::size_t j = 1; j < levels.size(); ++j) {
        value += (levels[j] - levels[j - 1]) * survival(levels[j]);
    }
    return {value, ChoquetMethod::exact_discrete, 0};
}

ChoquetValue choquet_integral_quadrature(const std::function<double(double)>& survival, double lo,
                                         double hi, std::size_t nodes) {
    if (nodes < 2) throw std::invalid_argument("trapezoid rule needs at least two nodes");
    if (!(hi >= lo)) throw std::invalid_argument("quadrature range is empty");
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    double integral = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double w = (i == 0 || i + 1 == nodes) ? 0.5 : 1.0;
        integral += w * survival(lo + h * static_cast<double>(i));
    }
    return {lo + h * integral, ChoquetMethod::quadrature, nodes};
}

SubadditivityReport check_capacity_subadditivity(const CapacityPair& pair, std::size_t exhaustive_limit,
                                                 std::size_t sampled_pairs, std::uint64_t seed) {
    const MeasureFamily& family = pair.family();
    const std::size_t n = family.outcome_count();
    SubadditivityReport report;

    auto check = [&](double v_a, double v_b, double v_ab, double l_a, double l_b, double l_ab,
                     auto&& describe_pair) {
        ++report.pairs_checked;
        if (v_ab > v_a + v_b + kTolerance) {
            ++report.upper_violations;
            if (!report.first_violation) {
                auto w = describe_pair();
                w.lhs = v_ab;
                w.rhs = v_a + v_b;
                report.first_violation = w;
            }
        }
        if (l_ab > l_a + v_b + kTolerance) {
            ++report.mixed_violations;
            if (!report.first_violation) {
                auto w = describe_pair();
                w.lhs = l_ab;
                w.rhs = l_a + v_b;
                report.first_violation = w;
            }
        }
        if (!report.lower_nonsubadditive_witness && l_ab > l_a + l_b + kTolerance) {
            auto w = describe_pair();
            w.lhs = l_ab;
            w.rhs = l_a + l_b;
            report.lower_nonsubadditive_witness = w;
        }
    };

    if (n <= exhaustive_limit && n < 31) {
        report.exhaustive = true;
        const std::uint64_t count = std::uint64_t{1} << n;
        const std::uint64_t full = count - 1;
        // Subset sums per measure, then the envelope.
        std::vector<double> upper(count, 0.0), sums(count);
        for (const auto& p : family.measures()) {
            sums[0] = 0.0;
            for (std::uint64_t mask = 1; mask < count; ++mask) {
                const int low = std::countr_zero(mask);
                sums[mask] = sums[mask & (mask - 1)] + p[static_cast<std::size_t>(low)];
            }
            for (std::uint64_t mask = 0; mask < count; ++mask) upper[mask] = std::max(upper[mask], sums[mask]);
        }
        std::vector<double> lower(count);
        for (std::uint64_t mask = 0; mask < count; ++mask) lower[mask] = 1.0 - upper[full ^ mask];

        if (std::abs(upper[0]) > kTolerance) ++report.normalization_violations;
        if (std::abs(upper[full] - 1.0) > kTolerance) ++report.normalization_violations;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint64_t bigger = mask | (std::uint64_t{1} << i);
                if (upper[mask] > upper[bigger] + kTolerance) ++report.monotonicity_violations;
            }
        }
        for (std::uint64_t a = 0; a < count; ++a) {
            for (std::uint64_t b = 0; b < count; ++b) {
                const std::uint64_t u = a | b;
                check(upper[a], upper[b], upper[u], lower[a], lower[b], lower[u], [&] {
                    return EventPairWitness{members(a), members(b)};
                });
            }
        }
        return report;
    }

    std::mt19937_64 rng(seed);
    auto random_event = [&] {
        std::vector<bool> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = (rng() & 1U) != 0;
        return Event(std::move(m));
    };
    if (std::abs(pair.upper(Event::empty(n))) > kTolerance) ++report.normalization_violations;
    if (std::abs(pair.upper(Event::full(n)) - 1.0) > kTolerance) ++report.normalization_violations;
    for (std::size_t k = 0; k < sampled_pairs; ++k) {
        const Event a = random_event();
        const Event b = random_event();
        const Event u = a | b;
        if (pair.upper(a) > pair.upper(u) + kTolerance) ++report.monotonicity_violations;
        check(pair.upper(a), pair.upper(b), pair.upper(u), pair.lower(a), pair.lower(b), pair.lower(u),
              [&] { return EventPairWitness{members(a), members(b)}; });
    }
    return report;
}

}  // namespace sublinear
