#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sublinear/core.hpp"

namespace sublinear {

/// Subset of a finite outcome set, as a membership mask.
class Event {
public:
    Event() = default;
    explicit Event(std::vector<bool> membership) : membership_(std::move(membership)) {}

    static Event empty(std::size_t outcomes) { return Event(std::vector<bool>(outcomes, false)); }
    static Event full(std::size_t outcomes) { return Event(std::vector<bool>(outcomes, true)); }
    /// Bit i of `mask` is membership of outcome i. Requires outcomes <= 64.
    static Event from_mask(std::size_t outcomes, std::uint64_t mask);
    /// {omega : pred(X(omega))}.
    static Event where(const RandomVariable& x, const std::function<bool(double)>& pred);

    std::size_t size() const { return membership_.size(); }
    bool contains(std::size_t i) const { return membership_[i]; }

    Event complement() const;
    Event operator|(const Event& other) const;
    Event operator&(const Event& other) const;
    RandomVariable indicator() const;

private:
    std::vector<bool> membership_;
};

/// The pair (upper capacity, lower capacity) generated by a measure family.
/// Holds a reference: the family must outlive the pair.
class CapacityPair {
public:
    explicit CapacityPair(const MeasureFamily& family) : family_(&family) {}

    const MeasureFamily& family() const { return *family_; }

    /// max_P P(A).
    double upper(const Event& a) const;
    /// 1 - upper(A^c), equal to min_P P(A).
    double lower(const Event& a) const;

private:
    const MeasureFamily* family_;
};

double upper_capacity(const CapacityPair& pair, const Event& a);
double lower_capacity(const CapacityPair& pair, const Event& a);

enum class CapacitySide { upper, lower };
enum class ChoquetMethod { exact_discrete, quadrature };

struct ChoquetValue {
    double value = 0.0;
    ChoquetMethod method = ChoquetMethod::exact_discrete;
    std::size_t node_count = 0;
};

/// Choquet integral of X against the upper or lower capacity. For finitely
/// supported X the layer-cake integral collapses to
///   v_1 + sum_{j>=2} (v_j - v_{j-1}) V(X >= v_j)
/// over the sorted distinct values v_1 < ... < v_k, which is evaluated exactly.
ChoquetValue choquet_integral(const CapacityPair& pair, const RandomVariable& x, CapacitySide which);

/// Trapezoid-rule Choquet integral for a variable known only through its
/// survival map t -> V(X >= t), with X assumed to take values in [lo, hi].
/// Uses C_V[X] = lo + int_lo^hi V(X >= t) dt.
ChoquetValue choquet_integral_quadrature(const std::function<double(double)>& survival, double lo,
                                         double hi, std::size_t nodes);

struct EventPairWitness {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct SubadditivityReport {
    bool exhaustive = false;
    std::size_t pairs_checked = 0;
    std::size_t upper_violations = 0;        // V(A u B) > V(A) + V(B)
    std::size_t mixed_violations = 0;        // lower(A u B) > lower(A) + V(B)
    std::size_t normalization_violations = 0;
    std::size_t monotonicity_violations = 0;
    std::optional<EventPairWitness> first_violation;
    /// A pair with lower(A u B) > lower(A) + lower(B), if one exists in the
    /// searched pairs. Its presence is informative, not a failure.
    std::optional<EventPairWitness> lower_nonsubadditive_witness;

    bool ok() const {
        return upper_violations == 0 && mixed_violations == 0 && normalization_violations == 0 &&
               monotonicity_violations == 0;
    }
};

/// Checks sub-additivity of the upper capacity and the mixed bound
/// lower(A u B) <= lower(A) + V(B). Exhaustive over all event pairs when the
/// outcome set has at most `exhaustive_limit` points, otherwise over
/// `sampled_pairs` random pairs.
SubadditivityReport check_capacity_subadditivity(const CapacityPair& pair,
                                                 std::size_t exhaustive_limit = 12,
                                                 std::size_t sampled_pairs = 1'000'000,
                                                 std::uint64_t seed = 0);

}  // namespace sublinear
