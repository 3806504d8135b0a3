#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sublinear {

/// Absolute tolerance used for every equality/inequality assertion on
/// expectations of finitely supported variables.
inline constexpr double kTolerance = 1e-12;

/// Thrown when two objects that must live on the same outcome set do not.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A theorem's hypothesis does not hold for the given input.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Outcome {
    std::size_t index = 0;
    std::optional<std::string> label;
};

/// A probability vector over a finite outcome set.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    /// Throws std::invalid_argument if any entry is negative or non-finite,
    /// or if the entries do not sum to one within kTolerance.
    explicit DiscreteMeasure(std::vector<double> probabilities);

    static DiscreteMeasure uniform(std::size_t outcomes);
    static DiscreteMeasure point_mass(std::size_t outcomes, std::size_t at);

    std::size_t size() const { return probabilities_.size(); }
    double operator[](std::size_t i) const { return probabilities_[i]; }
    std::span<const double> probabilities() const { return probabilities_; }

private:
    std::vector<double> probabilities_;
};

class RandomVariable;

/// A nonempty finite set of measures on one outcome set. The upper
/// expectation it generates is the envelope max_P E_P[X].
class MeasureFamily {
public:
    MeasureFamily() = default;
    explicit MeasureFamily(std::vector<DiscreteMeasure> measures);

    std::size_t outcome_count() const { return outcome_count_; }
    std::size_t measure_count() const { return measures_.size(); }
    const DiscreteMeasure& measure(std::size_t i) const { return measures_[i]; }
    const std::vector<DiscreteMeasure>& measures() const { return measures_; }

    /// E_P[X] for the i-th measure.
    double linear_expectation(std::size_t i, const RandomVariable& x) const;

private:
    std::vector<DiscreteMeasure> measures_;
    std::size_t outcome_count_ = 0;
};

/// Real-valued map on the outcome set.
class RandomVariable {
public:
    RandomVariable() = default;
    /// Throws std::invalid_argument on NaN or infinite entries.
    explicit RandomVariable(std::vector<double> values);

    static RandomVariable constant(std::size_t outcomes, double c);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    double min() const;
    double max() const;
    double max_abs() const;

    /// Pointwise image under f.
    RandomVariable map(const std::function<double(double)>& f) const;

    friend RandomVariable operator+(const RandomVariable& a, const RandomVariable& b);
    friend RandomVariable operator-(const RandomVariable& a, const RandomVariable& b);
    friend RandomVariable operator*(const RandomVariable& a, const RandomVariable& b);
    friend RandomVariable operator*(double s, const RandomVariable& a);
    friend RandomVariable operator+(const RandomVariable& a, double c);
    friend RandomVariable operator-(const RandomVariable& a);

private:
    std::vector<double> values_;
};

/// A local-Lipschitz test function phi: R^arity -> R together with the
/// constants of its growth envelope
///   |phi(x) - phi(y)| <= C (1 + |x|^m + |y|^m) |x - y|.
struct TestFunction {
    std::size_t arity = 1;
    std::function<double(std::span<const double>)> evaluate;
    unsigned lipschitz_degree = 0;
    double lipschitz_constant = 1.0;
    std::string name;

    double operator()(std::span<const double> x) const { return evaluate(x); }

    /// Convenience wrapper for arity-one functions.
    static TestFunction unary(std::string name, std::function<double(double)> f,
                              unsigned degree = 0, double constant = 1.0);
};

/// Samples `pairs` random argument pairs in [-radius, radius]^arity and
/// returns false on the first pair violating the Lipschitz envelope.
bool spot_check_lipschitz(const TestFunction& phi, std::size_t pairs, double radius,
                          std::uint64_t seed);

void require_same_space(const MeasureFamily& family, const RandomVariable& x);

/// max over measures P of E_P[X].
double upper_expectation(const MeasureFamily& family, const RandomVariable& x);

/// -upper_expectation(family, -X), i.e. the minimum over measures.
double lower_expectation(const MeasureFamily& family, const RandomVariable& x);

/// Pointwise clamp of X to [-c, c]. Throws std::invalid_argument if c <= 0.
RandomVariable truncate(const RandomVariable& x, double c);

struct AxiomViolation {
    std::string axiom;
    std::string witness;
    double excess = 0.0;
};

struct AxiomCheck {
    std::string axiom;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double max_excess = 0.0;
};

struct AxiomReport {
    std::size_t trials = 0;
    std::vector<AxiomCheck> checks;
    std::vector<AxiomViolation> violations;  // capped witness list

    std::size_t violation_count() const;
    bool ok() const { return violation_count() == 0; }
};

/// Randomized check of monotonicity, constant preservation, sub-additivity,
/// positive homogeneity, translation invariance, the X - Y lower bound and
/// lower <= upper on `trials` random (X, Y, lambda, c) tuples.
AxiomReport check_axioms(const MeasureFamily& family, std::size_t trials, std::uint64_t seed);

/// Draws a family with the given number of outcomes and measures. Each
/// measure has Dirichlet(1)-style weights, with occasional zero entries.
MeasureFamily random_family(std::mt19937_64& rng, std::size_t outcomes, std::size_t measures);

/// Uniform values in [lo, hi] on `outcomes` points.
RandomVariable random_variable(std::mt19937_64& rng, std::size_t outcomes, double lo, double hi);

/// Uniform double in [0, 1) built from the top 53 bits, identical across
/// standard library implementations.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 step; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sublinear
