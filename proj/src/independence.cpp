#include "sublinear/independence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace sublinear {

Marginal::Marginal(MeasureFamily f, RandomVariable v) : family(std::move(f)), values(std::move(v)) {
    require_same_space(family, values);
}

SequenceSpec::SequenceSpec(std::vector<Marginal> marginals)
    : length_(marginals.size()), explicit_(std::move(marginals)) {
    if (length_ == 0) throw std::invalid_argument("sequence must have at least one coordinate");
}

SequenceSpec::SequenceSpec(std::size_t length, Generator generator)
    : length_(length), generator_(std::move(generator)) {
    if (length_ == 0) throw std::invalid_argument("sequence must have at least one coordinate");
    if (!generator_) throw std::invalid_argument("sequence generator is empty");
}

SequenceSpec SequenceSpec::iid(Marginal marginal, std::size_t length) {
    SequenceSpec spec(length, [m = marginal](std::size_t) { return m; });
    spec.common_ = std::move(marginal);
    return spec;
}

Marginal SequenceSpec::marginal(std::size_t k) const {
    if (k >= length_) throw std::out_of_range("coordinate beyond the sequence length");
    if (common_) return *common_;
    if (!explicit_.empty()) return explicit_[k];
    return generator_(k);
}

SequenceSpec SequenceSpec::prefix(std::size_t n) const {
    if (n == 0 || n > length_) throw std::out_of_range("prefix length out of range");
    std::vector<Marginal> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(marginal(k));
    return SequenceSpec(std::move(out));
}

namespace {

std::vector<Marginal> materialize(const SequenceSpec& spec) {
    std::vector<Marginal> out;
    out.reserve(spec.length());
    for (std::size_t k = 0; k < spec.length(); ++k) out.push_back(spec.marginal(k));
    return out;
}

void guard_leaves(const std::vector<Marginal>& m, double guard) {
    double leaves = 1.0;
    for (const auto& mk : m) leaves *= static_cast<double>(mk.values.size());
    if (leaves > guard) {
        std::ostringstream os;
        os << "joint enumeration would visit " << leaves << " outcome tuples (guard " << guard << ")";
        throw StateSpaceError(os.str(), leaves);
    }
}

// Outcomes no measure charges contribute nothing to any expectation.
std::vector<bool> charged_outcomes(const MeasureFamily& family) {
    std::vector<bool> charged(family.outcome_count(), false);
    for (const auto& p : family.measures()) {
        for (std::size_t i = 0; i < p.size(); ++i) charged[i] = charged[i] || p[i] > 0.0;
    }
    return charged;
}

double envelope(const MeasureFamily& family, std::span<const double> values) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : family.measures()) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += p[i] * values[i];
        best = std::max(best, s);
    }
    return best;
}

class NestedRecursion {
public:
    NestedRecursion(const std::vector<Marginal>& m, const TestFunction& phi, std::vector<std::size_t> order)
        : m_(m), phi_(phi), order_(std::move(order)), args_(m.size()) {
        for (const auto& mk : m_) charged_.push_back(charged_outcomes(mk.family));
    }

    // Level `depth` integrates coordinate order_[depth]; deeper levels are inner.
    double run(std::size_t depth) {
        if (depth == order_.size()) return phi_(args_);
        const std::size_t k = order_[depth];
        const Marginal& mk = m_[k];
        std::vector<double> inner(mk.values.size(), 0.0);
        for (std::size_t w = 0; w < inner.size(); ++w) {
            if (!charged_[k][w]) continue;
            args_[k] = mk.values[w];
            inner[w] = run(depth + 1);
        }
        return envelope(mk.family, inner);
    }

private:
    const std::vector<Marginal>& m_;
    const TestFunction& phi_;
    std::vector<std::size_t> order_;
    std::vector<double> args_;
    std::vector<std::vector<bool>> charged_;
};

double nested(const SequenceSpec& spec, const TestFunction& phi, double guard, bool reversed) {
    if (phi.arity != spec.length()) {
        throw std::invalid_argument("test function arity " + std::to_string(phi.arity) +
                                    " does not match sequence length " + std::to_string(spec.length()));
    }
    const auto m = materialize(spec);
    guard_leaves(m, guard);
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (reversed) std::reverse(order.begin(), order.end());
    return NestedRecursion(m, phi, std::move(order)).run(0);
}

}  // namespace

double joint_upper_expectation(const SequenceSpec& spec, const TestFunction& phi, double state_guard) {
    return nested(spec, phi, state_guard, false);
}

double reversed_joint_upper_expectation(const SequenceSpec& spec, const TestFunction& phi,
                                        double state_guard) {
    return nested(spec, phi, state_guard, true);
}

PartialSumFunctional PartialSumFunctional::final_sum(double p) {
    PartialSumFunctional f;
    f.kind = Kind::final_sum;
    f.p = p;
    return f;
}

PartialSumFunctional PartialSumFunctional::max_suffix_drawdown(double p) {
    PartialSumFunctional f;
    f.kind = Kind::max_suffix_drawdown;
    f.p = p;
    return f;
}

PartialSumFunctional PartialSumFunctional::max_abs_partial_sum(double p) {
    PartialSumFunctional f;
    f.kind = Kind::max_abs_partial_sum;
    f.p = p;
    return f;
}

PartialSumFunctional PartialSumFunctional::custom(double initial, std::function<double(double, double)> update,
                                                  std::function<double(double, double)> terminal) {
    PartialSumFunctional f;
    f.kind = Kind::custom;
    f.initial = initial;
    f.update = std::move(update);
    f.terminal = std::move(terminal);
    return f;
}

double PartialSumFunctional::start() const { return kind == Kind::custom ? initial : 0.0; }

double PartialSumFunctional::fold(double extremum, double sum) const {
    switch (kind) {
        case Kind::final_sum: return 0.0;
        case Kind::max_suffix_drawdown: return std::min(extremum, sum);  // running min of S_k
        case Kind::max_abs_partial_sum: return std::max(extremum, std::abs(sum));
        case Kind::custom: return update(extremum, sum);
    }
    return 0.0;
}

double PartialSumFunctional::value(double sum, double extremum) const {
    switch (kind) {
        case Kind::final_sum: return std::pow(std::abs(sum), p);
        case Kind::max_suffix_drawdown: return std::pow(sum - extremum, p);
        case Kind::max_abs_partial_sum: return std::pow(extremum, p);
        case Kind::custom: return terminal(sum, extremum);
    }
    return 0.0;
}

double PartialSumFunctional::evaluate_path(std::span<const double> increments) const {
    double sum = 0.0;
    double ext = start();
    for (double x : increments) {
        sum += x;
        ext = fold(ext, sum);
    }
    return value(sum, ext);
}

TestFunction PartialSumFunctional::as_test_function(std::size_t n) const {
    TestFunction phi;
    phi.arity = n;
    phi.evaluate = [f = *this](std::span<const double> x) { return f.evaluate_path(x); };
    phi.lipschitz_degree = 1;
    phi.lipschitz_constant = 2.0 * static_cast<double>(n);
    phi.name = "path functional";
    return phi;
}

double functional_upper_expectation(const SequenceSpec& spec, const PartialSumFunctional& f,
                                    double state_guard) {
    using State = std::pair<double, double>;  // (running sum, extremum)
    const auto m = materialize(spec);
    const std::size_t n = m.size();

    std::vector<std::vector<bool>> charged;
    charged.reserve(n);
    for (const auto& mk : m) charged.push_back(charged_outcomes(mk.family));

    auto step = [&](const State& s, double x) {
        const double sum = s.first + x;
        return State{sum, f.fold(s.second, sum)};
    };

    // Forward pass: reachable states per layer, sorted and deduplicated.
    std::vector<std::vector<State>> layers(n + 1);
    layers[0] = {State{0.0, f.start()}};
    double total = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        auto& next = layers[k + 1];
        for (const auto& s : layers[k]) {
            for (std::size_t w = 0; w < m[k].values.size(); ++w) {
                if (charged[k][w]) next.push_back(step(s, m[k].values[w]));
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        total += static_cast<double>(next.size());
        if (total > state_guard) {
            std::ostringstream os;
            os << "partial-sum recursion exceeds " << state_guard << " states at layer " << k + 1;
            throw StateSpaceError(os.str(), total);
        }
    }

    std::vector<double> values(layers[n].size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = f.value(layers[n][i].first, layers[n][i].second);

    for (std::size_t k = n; k-- > 0;) {
        const auto& here = layers[k];
        const auto& there = layers[k + 1];
        std::vector<double> current(here.size());
        std::vector<double> inner(m[k].values.size(), 0.0);
        for (std::size_t i = 0; i < here.size(); ++i) {
            for (std::size_t w = 0; w < inner.size(); ++w) {
                if (!charged[k][w]) continue;
                const State t = step(here[i], m[k].values[w]);
                const auto it = std::lower_bound(there.begin(), there.end(), t);
                inner[w] = values[static_cast<std::size_t>(it - there.begin())];
            }
            current[i] = envelope(m[k].family, inner);
        }
        values = std::move(current);
    }
    return values.front();
}

std::vector<TestFunction> default_distribution_battery() {
    std::vector<TestFunction> battery;
    battery.push_back(TestFunction::unary("x", [](double x) { return x; }));
    battery.push_back(TestFunction::unary("x^2", [](double x) { return x * x; }, 1, 1.0));
    battery.push_back(TestFunction::unary("x^3", [](double x) { return x * x * x; }, 2, 3.0));
    battery.push_back(TestFunction::unary("x^4", [](double x) { return x * x * x * x; }, 3, 4.0));
    battery.push_back(TestFunction::unary("-x", [](double x) { return -x; }));
    battery.push_back(TestFunction::unary("-x^2", [](double x) { return -x * x; }, 1, 1.0));
    battery.push_back(TestFunction::unary("-x^3", [](double x) { return -x * x * x; }, 2, 3.0));
    battery.push_back(TestFunction::unary("|x|", [](double x) { return std::abs(x); }));
    battery.push_back(TestFunction::unary("x^+", [](double x) { return std::max(x, 0.0); }));
    battery.push_back(TestFunction::unary("x^-", [](double x) { return std::max(-x, 0.0); }));
    for (double c : {0.25, 0.5, 1.0, 2.0}) {
        std::ostringstream name;
        name << "clamp(x," << c << ")";
        battery.push_back(TestFunction::unary(name.str(), [c](double x) { return std::clamp(x, -c, c); }));
    }
    return battery;
}

IdenticalDistributionReport check_identical_distribution(const MeasureFamily& f1, const RandomVariable& x1,
                                                         const MeasureFamily& f2, const RandomVariable& x2,
                                                         const std::vector<TestFunction>& battery,
                                                         double tolerance) {
    if (battery.empty()) throw std::invalid_argument("identical-distribution battery is empty");
    require_same_space(f1, x1);
    require_same_space(f2, x2);
    IdenticalDistributionReport report;
    report.tolerance = tolerance;
    for (const auto& phi : battery) {
        if (phi.arity != 1) throw std::invalid_argument("battery functions must be unary: " + phi.name);
        auto image = [&](const RandomVariable& x) {
            return x.map([&](double v) { return phi(std::span<const double>(&v, 1)); });
        };
        const double a = upper_expectation(f1, image(x1));
        const double b = upper_expectation(f2, image(x2));
        report.checks.push_back({phi.name, a, b, std::abs(a - b)});
        report.max_discrepancy = std::max(report.max_discrepancy, std::abs(a - b));
    }
    return report;
}

}  // namespace sublinear
