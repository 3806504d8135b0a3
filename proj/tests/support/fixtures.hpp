#pragma once

// Shared scenarios and brute-force oracles for the test suites. The oracles
// deliberately avoid the library's evaluation paths: they work from raw
// probability vectors and explicit enumeration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "sublinear/capacity.hpp"
#include "sublinear/core.hpp"
#include "sublinear/independence.hpp"

namespace fixtures {

using namespace sublinear;

// Omega = {0, 1}; P(omega = 1) in {0.3, 0.7}.
inline MeasureFamily coin_family() {
    return MeasureFamily({DiscreteMeasure({0.7, 0.3}), DiscreteMeasure({0.3, 0.7})});
}
// X(omega) = 2 omega - 1
inline RandomVariable coin_sign() { return RandomVariable({-1.0, 1.0}); }

// Omega = {-1, 0, 1}; uniform on +-1, or point mass at 0.
inline MeasureFamily mean_zero_family() {
    return MeasureFamily({DiscreteMeasure({0.5, 0.0, 0.5}), DiscreteMeasure({0.0, 1.0, 0.0})});
}
inline RandomVariable identity3() { return RandomVariable({-1.0, 0.0, 1.0}); }

inline MeasureFamily fair_coin() { return MeasureFamily({DiscreteMeasure({0.5, 0.5})}); }

inline Marginal coin_marginal() { return Marginal(coin_family(), coin_sign()); }
inline Marginal mean_zero_marginal() { return Marginal(mean_zero_family(), identity3()); }

// Sum_i p_i x_i in index order.
inline double classical_expectation(std::span<const double> p, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * x[i];
    return s;
}

// max over measures of the raw dot product.
inline double envelope_by_hand(const MeasureFamily& f, const std::vector<double>& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < f.measure_count(); ++j) {
        best = std::max(best, classical_expectation(f.measure(j).probabilities(), x));
    }
    return best;
}

inline double capacity_by_hand(const MeasureFamily& f, const std::function<bool(std::size_t)>& in) {
    std::vector<double> ind(f.outcome_count());
    for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = in(i) ? 1.0 : 0.0;
    return envelope_by_hand(f, ind);
}

// Choquet integral straight from the layer-cake definition: the map
// t -> V(X >= t) is constant between consecutive breakpoints (values of X
// and 0), so midpoint evaluation on each piece is exact.
inline double choquet_by_definition(const MeasureFamily& f, const std::vector<double>& x, bool upper) {
    std::set<double> cuts(x.begin(), x.end());
    cuts.insert(0.0);
    const std::vector<double> b(cuts.begin(), cuts.end());
    auto v = [&](double t) {
        if (upper) return capacity_by_hand(f, [&](std::size_t i) { return x[i] >= t; });
        return 1.0 - capacity_by_hand(f, [&](std::size_t i) { return x[i] < t; });
    };
    double total = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        const double mid = 0.5 * (b[i - 1] + b[i]);
        const double width = b[i] - b[i - 1];
        total += mid > 0.0 ? width * v(mid) : width * (v(mid) - 1.0);
    }
    return total;
}

// Joint upper expectation by building the full tensor of phi over every
// outcome tuple (last coordinate fastest) and contracting the last axis
// first.
inline double tensor_joint_upper(const std::vector<Marginal>& m, const std::function<double(std::span<const double>)>& phi) {
    const std::size_t n = m.size();
    std::size_t total = 1;
    for (const auto& mk : m) total *= mk.values.size();
    std::vector<double> tensor(total);
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> args(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t k = n; k-- > 0;) {
            idx[k] = rest % m[k].values.size();
            rest /= m[k].values.size();
        }
        for (std::size_t k = 0; k < n; ++k) args[k] = m[k].values[idx[k]];
        tensor[flat] = phi(args);
    }
    for (std::size_t k = n; k-- > 0;) {
        const std::size_t width = m[k].values.size();
        std::vector<double> reduced(tensor.size() / width);
        for (std::size_t b = 0; b < reduced.size(); ++b) {
            std::vector<double> block(tensor.begin() + static_cast<std::ptrdiff_t>(b * width),
                                      tensor.begin() + static_cast<std::ptrdiff_t>((b + 1) * width));
            reduced[b] = envelope_by_hand(m[k].family, block);
        }
        tensor = std::move(reduced);
    }
    return tensor.front();
}

inline double pow_abs(double v, double p) { return std::pow(std::abs(v), p); }

}  // namespace fixtures
