#include "sublinear/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sublinear {

namespace {

constexpr std::size_t kMaxWitnesses = 16;

double dot(std::span<const double> p, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] * x[i];
    return sum;
}

std::vector<double> apply(const RandomVariable& a, const RandomVariable& b, auto op) {
    if (a.size() != b.size()) {
        throw DimensionError("random variables live on outcome sets of different size (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
    return out;
}

std::string describe(const RandomVariable& x) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
    if (probabilities_.empty()) throw std::invalid_argument("measure over an empty outcome set");
    double total = 0.0;
    for (std::size_t i = 0; i < probabilities_.size(); ++i) {
        const double p = probabilities_[i];
        if (!std::isfinite(p) || p < 0.0) {
            throw std::invalid_argument("probability at outcome " + std::to_string(i) +
                                        " is negative or not finite");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "probabilities sum to " << total << ", expected 1";
        throw std::invalid_argument(os.str());
    }
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t outcomes) {
    return DiscreteMeasure(std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes)));
}

DiscreteMeasure DiscreteMeasure::point_mass(std::size_t outcomes, std::size_t at) {
    if (at >= outcomes) throw std::out_of_range("point mass outside the outcome set");
    std::vector<double> p(outcomes, 0.0);
    p[at] = 1.0;
    return DiscreteMeasure(std::move(p));
}

MeasureFamily::MeasureFamily(std::vector<DiscreteMeasure> measures) : measures_(std::move(measures)) {
    if (measures_.empty()) throw std::invalid_argument("measure family must be nonempty");
    outcome_count_ = measures_.front().size();
    for (std::size_t i = 1; i < measures_.size(); ++i) {
        if (measures_[i].size() != outcome_count_) {
            throw DimensionError("measure " + std::to_string(i) + " has " +
                                 std::to_string(measures_[i].size()) + " outcomes, expected " +
                                 std::to_string(outcome_count_));
        }
    }
}

double MeasureFamily::linear_expectation(std::size_t i, const RandomVariable& x) const {
    require_same_space(*this, x);
    return dot(measures_.at(i).probabilities(), x.values());
}

RandomVariable::RandomVariable(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("random variable value at outcome " + std::to_string(i) +
                                        " is not finite");
        }
    }
}

RandomVariable RandomVariable::constant(std::size_t outcomes, double c) {
    return RandomVariable(std::vector<double>(outcomes, c));
}

double RandomVariable::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RandomVariable::max() const { return *std::max_element(values_.begin(), values_.end()); }

double RandomVariable::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

RandomVariable RandomVariable::map(const std::function<double(double)>& f) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), f);
    return RandomVariable(std::move(out));
}

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b) {
    return RandomVariable(apply(a, b, std::plus<>{}));
}
RandomVariable operator-(const RandomVariable& a, const RandomVariable& b) {
    return RandomVariable(apply(a, b, std::minus<>{}));
}
RandomVariable operator*(const RandomVariable& a, const RandomVariable& b) {
    return RandomVariable(apply(a, b, std::multiplies<>{}));
}
RandomVariable operator*(double s, const RandomVariable& a) {
    return a.map([s](double v) { return s * v; });
}
RandomVariable operator+(const RandomVariable& a, double c) {
    return a.map([c](double v) { return v + c; });
}
RandomVariable operator-(const RandomVariable& a) {
    return a.map([](double v) { return -v; });
}

TestFunction TestFunction::unary(std::string name, std::function<double(double)> f,
                                 unsigned degree, double constant) {
    TestFunction phi;
    phi.arity = 1;
    phi.evaluate = [f = std::move(f)](std::span<const double> x) { return f(x[0]); };
    phi.lipschitz_degree = degree;
    phi.lipschitz_constant = constant;
    phi.name = std::move(name);
    return phi;
}

bool spot_check_lipschitz(const TestFunction& phi, std::size_t pairs, double radius,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> x(phi.arity), y(phi.arity);
    const double m = static_cast<double>(phi.lipschitz_degree);
    for (std::size_t k = 0; k < pairs; ++k) {
        double dist2 = 0.0, nx2 = 0.0, ny2 = 0.0;
        for (std::size_t i = 0; i < phi.arity; ++i) {
            x[i] = radius * (2.0 * unit_uniform(rng) - 1.0);
            y[i] = radius * (2.0 * unit_uniform(rng) - 1.0);
            dist2 += (x[i] - y[i]) * (x[i] - y[i]);
            nx2 += x[i] * x[i];
            ny2 += y[i] * y[i];
        }
        const double lhs = std::abs(phi(x) - phi(y));
        const double rhs = phi.lipschitz_constant *
                           (1.0 + std::pow(std::sqrt(nx2), m) + std::pow(std::sqrt(ny2), m)) *
                           std::sqrt(dist2);
        if (lhs > rhs * (1.0 + kTolerance) + kTolerance) return false;
    }
    return true;
}

void require_same_space(const MeasureFamily& family, const RandomVariable& x) {
    if (family.outcome_count() != x.size()) {
        throw DimensionError("random variable has " + std::to_string(x.size()) +
                             " outcomes but the measure family has " +
                             std::to_string(family.outcome_count()));
    }
}

double upper_expectation(const MeasureFamily& family, const RandomVariable& x) {
    require_same_space(family, x);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : family.measures()) best = std::max(best, dot(p.probabilities(), x.values()));
    return best;
}

double lower_expectation(const MeasureFamily& family, const RandomVariable& x) {
    return -upper_expectation(family, -x);
}

RandomVariable truncate(const RandomVariable& x, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("truncation level must be positive");
    return x.map([c](double v) { return std::clamp(v, -c, c); });
}

std::size_t AxiomReport::violation_count() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.violations;
    return n;
}

AxiomReport check_axioms(const MeasureFamily& family, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("check_axioms needs at least one trial");
    std::mt19937_64 rng(seed);
    const std::size_t n = family.outcome_count();

    AxiomReport report;
    report.trials = trials;
    enum Axiom { kMonotone, kConstant, kSubadditive, kHomogeneous, kTranslation, kDifference, kConjugate };
    report.checks = {{"monotonicity"},         {"constant_preserving"}, {"sub_additivity"},
                     {"positive_homogeneity"}, {"translation"},         {"difference_lower_bound"},
                     {"lower_le_upper"}};

    auto record = [&](Axiom a, double excess, const std::string& witness) {
        auto& c = report.checks[a];
        ++c.checks;
        c.max_excess = std::max(c.max_excess, excess);
        if (excess > kTolerance) {
            ++c.violations;
            if (report.violations.size() < kMaxWitnesses) report.violations.push_back({c.axiom, witness, excess});
        }
    };

    for (std::size_t t = 0; t < trials; ++t) {
        const RandomVariable x = random_variable(rng, n, -10.0, 10.0);
        const RandomVariable y = random_variable(rng, n, -10.0, 10.0);
        // lambda = 0 exercised on roughly one trial in ten
        const double lambda = (rng() % 10 == 0) ? 0.0 : 5.0 * unit_uniform(rng);
        const double c = 20.0 * unit_uniform(rng) - 10.0;

        const double ex = upper_expectation(family, x);
        const double ey = upper_expectation(family, y);

        const RandomVariable below = x - random_variable(rng, n, 0.0, 5.0);
        record(kMonotone, upper_expectation(family, below) - ex, "X=" + describe(x) + " Y=" + describe(below));

        record(kConstant, std::abs(upper_expectation(family, RandomVariable::constant(n, c)) - c),
               "c=" + std::to_string(c));

        record(kSubadditive, upper_expectation(family, x + y) - (ex + ey),
               "X=" + describe(x) + " Y=" + describe(y));

        record(kHomogeneous, std::abs(upper_expectation(family, lambda * x) - lambda * ex),
               "lambda=" + std::to_string(lambda) + " X=" + describe(x));

        record(kTranslation, std::abs(upper_expectation(family, x + c) - (ex + c)),
               "c=" + std::to_string(c) + " X=" + describe(x));

        record(kDifference, (ex - ey) - upper_expectation(family, x - y),
               "X=" + describe(x) + " Y=" + describe(y));

        record(kConjugate, lower_expectation(family, x) - ex, "X=" + describe(x));
    }
    return report;
}

MeasureFamily random_family(std::mt19937_64& rng, std::size_t outcomes, std::size_t measures) {
    if (outcomes == 0 || measures == 0) throw std::invalid_argument("random_family needs a nonempty shape");
    std::vector<DiscreteMeasure> out;
    out.reserve(measures);
    for (std::size_t m = 0; m < measures; ++m) {
        std::vector<double> w(outcomes);
        for (auto& v : w) {
            v = (rng() % 5 == 0) ? 0.0 : -std::log1p(-unit_uniform(rng));
        }
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total <= 0.0) {
            w[rng() % outcomes] = 1.0;
            total = 1.0;
        }
        for (auto& v : w) v /= total;
        out.emplace_back(std::move(w));
    }
    return MeasureFamily(std::move(out));
}

RandomVariable random_variable(std::mt19937_64& rng, std::size_t outcomes, double lo, double hi) {
    std::vector<double> v(outcomes);
    for (auto& e : v) e = lo + (hi - lo) * unit_uniform(rng);
    return RandomVariable(std::move(v));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sublinear
