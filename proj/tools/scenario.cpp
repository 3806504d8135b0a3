#include "scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cli {

using sublinear::DiscreteMeasure;
using sublinear::Marginal;
using sublinear::MeasureFamily;
using sublinear::RandomVariable;
using sublinear::SequenceSpec;

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": " << message;
    return os.str();
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    static std::size_t line(const YAML::Node& n) {
        const auto m = n.Mark();
        return m.line >= 0 ? static_cast<std::size_t>(m.line) + 1 : 0;
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
        throw ConfigError(source_, line(at), message);
    }

    void require_map(const YAML::Node& n, const std::string& what) const {
        if (!n.IsMap()) fail(n, what + " must be a mapping");
    }

    // Rejects keys outside `allowed`, so typos surface instead of being ignored.
    void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& what) const {
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
        }
    }

    template <typename T>
    T scalar(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) fail(n, what + " must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "cannot read " + what + " from '" + n.Scalar() + "'");
        }
    }

    double real(const YAML::Node& n, const std::string& what) const {
        const double v = scalar<double>(n, what);
        if (!std::isfinite(v)) fail(n, what + " must be finite");
        return v;
    }

    std::size_t count(const YAML::Node& n, const std::string& what) const {
        if (n.IsScalar() && !n.Scalar().empty() && n.Scalar()[0] == '-') fail(n, what + " must be non-negative");
        return scalar<std::size_t>(n, what);
    }

    template <typename F>
    auto list(const YAML::Node& n, const std::string& what, F&& item) const {
        if (!n.IsSequence()) fail(n, what + " must be a list");
        std::vector<decltype(item(n, what))> out;
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(item(n[i], what + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::vector<double> reals(const YAML::Node& n, const std::string& what) const {
        return list(n, what, [this](const YAML::Node& e, const std::string& w) { return real(e, w); });
    }

    std::vector<std::size_t> counts(const YAML::Node& n, const std::string& what) const {
        return list(n, what, [this](const YAML::Node& e, const std::string& w) { return count(e, w); });
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

void read_parameters(const Reader& r, const YAML::Node& n, Parameters& p) {
    r.require_map(n, "parameters");
    r.check_keys(n,
                 {"p", "q", "c", "mu", "eps", "window", "replicates", "checkpoints", "threshold", "ratio_bound",
                  "tail_grid", "axiom_trials", "fuzz_instances", "square_sum", "rosenthal"},
                 "parameters");
    if (n["p"]) {
        p.p = r.real(n["p"], "p");
        if (!(p.p > 0.0 && p.p < 2.0)) r.fail(n["p"], "p must lie in (0, 2)");
    }
    if (n["q"]) {
        p.q = r.real(n["q"], "q");
        if (!(p.q >= 1.0 && p.q <= 2.0)) r.fail(n["q"], "q must lie in [1, 2]");
    }
    if (n["c"]) {
        p.c = r.real(n["c"], "c");
        if (!(p.c > 0.0)) r.fail(n["c"], "truncation level c must be positive");
    }
    if (n["mu"]) p.mu = r.real(n["mu"], "mu");
    if (n["eps"]) {
        p.eps = r.real(n["eps"], "eps");
        if (!(p.eps > 0.0)) r.fail(n["eps"], "eps must be positive");
    }
    if (n["window"]) {
        p.window = r.count(n["window"], "window");
        if (p.window == 0) r.fail(n["window"], "window must be positive");
    }
    if (n["replicates"]) {
        p.replicates = r.count(n["replicates"], "replicates");
        if (p.replicates == 0) r.fail(n["replicates"], "replicates must be positive");
    }
    if (n["checkpoints"]) {
        p.checkpoints = r.counts(n["checkpoints"], "checkpoints");
        if (p.checkpoints.empty()) r.fail(n["checkpoints"], "checkpoints must not be empty");
        for (std::size_t i = 0; i < p.checkpoints.size(); ++i) {
            if (p.checkpoints[i] == 0 || (i > 0 && p.checkpoints[i] <= p.checkpoints[i - 1])) {
                r.fail(n["checkpoints"][i], "checkpoints must be positive and strictly increasing");
            }
        }
    }
    if (n["threshold"]) {
        p.threshold = r.real(n["threshold"], "threshold");
        if (!(p.threshold > 0.0)) r.fail(n["threshold"], "threshold must be positive");
    }
    if (n["ratio_bound"]) {
        p.ratio_bound = r.real(n["ratio_bound"], "ratio_bound");
        if (!(p.ratio_bound > 0.0)) r.fail(n["ratio_bound"], "ratio_bound must be positive");
    }
    if (n["tail_grid"]) {
        p.tail_grid = r.reals(n["tail_grid"], "tail_grid");
        for (std::size_t i = 0; i < p.tail_grid.size(); ++i) {
            if (p.tail_grid[i] < 0.0) r.fail(n["tail_grid"][i], "tail levels must be non-negative");
        }
    }
    if (n["axiom_trials"]) {
        p.axiom_trials = r.count(n["axiom_trials"], "axiom_trials");
        if (p.axiom_trials == 0) r.fail(n["axiom_trials"], "axiom_trials must be positive");
    }
    if (n["fuzz_instances"]) {
        p.fuzz_instances = r.count(n["fuzz_instances"], "fuzz_instances");
        if (p.fuzz_instances == 0) r.fail(n["fuzz_instances"], "fuzz_instances must be positive");
    }
    if (const auto s = n["square_sum"]) {
        r.require_map(s, "square_sum");
        r.check_keys(s, {"eps", "window"}, "square_sum");
        if (s["eps"]) {
            p.square_sum_eps = r.real(s["eps"], "square_sum.eps");
            if (!(p.square_sum_eps > 0.0)) r.fail(s["eps"], "square_sum.eps must be positive");
        }
        if (s["window"]) {
            p.square_sum_window = r.count(s["window"], "square_sum.window");
            if (p.square_sum_window == 0) r.fail(s["window"], "square_sum.window must be positive");
        }
    }
    if (const auto ro = n["rosenthal"]) {
        r.require_map(ro, "rosenthal");
        r.check_keys(ro, {"support", "probability_grid", "exponents", "max_length", "compare_enumeration", "tightness_probe"},
                     "rosenthal");
        auto& cfg = p.rosenthal;
        if (ro["support"]) cfg.support_values = r.reals(ro["support"], "rosenthal.support");
        if (ro["probability_grid"]) {
            cfg.probability_grid = r.reals(ro["probability_grid"], "rosenthal.probability_grid");
            for (std::size_t i = 0; i < cfg.probability_grid.size(); ++i) {
                const double g = cfg.probability_grid[i];
                if (!(g >= 0.0 && g <= 1.0)) r.fail(ro["probability_grid"][i], "grid probabilities must lie in [0, 1]");
            }
        }
        if (ro["exponents"]) {
            cfg.exponents = r.reals(ro["exponents"], "rosenthal.exponents");
            for (std::size_t i = 0; i < cfg.exponents.size(); ++i) {
                const double e = cfg.exponents[i];
                if (!(e >= 1.0 && e <= 2.0)) r.fail(ro["exponents"][i], "Rosenthal exponents must lie in [1, 2]");
            }
        }
        if (ro["max_length"]) {
            cfg.max_length = r.count(ro["max_length"], "rosenthal.max_length");
            if (cfg.max_length == 0 || cfg.max_length > 4) r.fail(ro["max_length"], "rosenthal.max_length must be 1..4");
        }
        if (ro["compare_enumeration"]) cfg.compare_enumeration = r.scalar<bool>(ro["compare_enumeration"], "compare_enumeration");
        if (ro["tightness_probe"]) p.rosenthal_tightness_probe = r.scalar<bool>(ro["tightness_probe"], "tightness_probe");
    }
}

void read_space(const Reader& r, const YAML::Node& n, Scenario& s) {
    r.require_map(n, "space");
    r.check_keys(n, {"values", "labels", "measures"}, "space");
    if (!n["values"]) r.fail(n, "space.values is required");
    s.values = r.reals(n["values"], "space.values");
    if (s.values.empty()) r.fail(n["values"], "space.values must not be empty");
    if (n["labels"]) {
        s.labels = r.list(n["labels"], "space.labels",
                          [&r](const YAML::Node& e, const std::string& w) { return r.scalar<std::string>(e, w); });
        if (s.labels.size() != s.values.size()) r.fail(n["labels"], "space.labels must match space.values in length");
    }
    const auto ms = n["measures"];
    if (!ms) r.fail(n, "space.measures is required");
    if (!ms.IsSequence() || ms.size() == 0) r.fail(ms, "space.measures must be a nonempty list");
    std::vector<DiscreteMeasure> measures;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto m = ms[i];
        r.require_map(m, "measure");
        r.check_keys(m, {"name", "probabilities"}, "measure");
        const std::string name = m["name"] ? r.scalar<std::string>(m["name"], "measure name") : "measure " + std::to_string(i);
        if (!m["probabilities"]) r.fail(m, "measure '" + name + "' has no probabilities");
        const auto probs = r.reals(m["probabilities"], "probabilities of '" + name + "'");
        if (probs.size() != s.values.size()) {
            r.fail(m["probabilities"], "measure '" + name + "' has " + std::to_string(probs.size()) +
                                           " probabilities for " + std::to_string(s.values.size()) + " outcomes");
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            if (probs[k] < 0.0) r.fail(m["probabilities"][k], "measure '" + name + "' has a negative probability");
            sum += probs[k];
        }
        if (std::abs(sum - 1.0) > sublinear::kTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "measure '" << name << "' probabilities sum to " << sum << ", not 1";
            r.fail(m["probabilities"], os.str());
        }
        s.measure_names.push_back(name);
        measures.emplace_back(probs);
    }
    s.family = MeasureFamily(std::move(measures));
}

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(located(source, line, message)), line_(line) {}

Marginal Scenario::marginal() const { return Marginal(family, RandomVariable(values)); }

SequenceSpec Scenario::sequence() const {
    if (exponent == 0.0) return SequenceSpec::iid(marginal(), horizon);
    return SequenceSpec(horizon, [f = family, v = values, e = exponent](std::size_t k) {
        const double scale = std::pow(static_cast<double>(k + 1), e);
        std::vector<double> scaled(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = v[i] * scale;
        return Marginal(f, RandomVariable(std::move(scaled)));
    });
}

std::vector<std::size_t> Scenario::active_checkpoints() const {
    std::vector<std::size_t> out;
    for (std::size_t c : params.checkpoints) {
        if (c <= horizon) out.push_back(c);
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0, e.msg);
    }
    const Reader r(source);
    if (!root || !root.IsMap()) throw ConfigError(source, 0, "scenario must be a mapping");
    r.check_keys(root, {"name", "seed", "space", "sequence", "parameters"}, "scenario");

    Scenario s;
    s.name = root["name"] ? r.scalar<std::string>(root["name"], "name") : "unnamed";
    if (!root["seed"]) throw ConfigError(source, 0, "seed is required");
    if (root["seed"].IsScalar() && !root["seed"].Scalar().empty() && root["seed"].Scalar()[0] == '-') {
        r.fail(root["seed"], "seed must be a non-negative 64-bit integer");
    }
    s.seed = r.scalar<std::uint64_t>(root["seed"], "seed");
    if (!root["space"]) throw ConfigError(source, 0, "space is required");
    read_space(r, root["space"], s);
    if (const auto q = root["sequence"]) {
        r.require_map(q, "sequence");
        r.check_keys(q, {"horizon", "exponent"}, "sequence");
        if (q["horizon"]) {
            s.horizon = r.count(q["horizon"], "sequence.horizon");
            if (s.horizon == 0) r.fail(q["horizon"], "sequence.horizon must be positive");
        }
        if (q["exponent"]) s.exponent = r.real(q["exponent"], "sequence.exponent");
    }
    if (root["parameters"]) read_parameters(r, root["parameters"], s.params);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

nlohmann::ordered_json to_json(const Scenario& s) {
    using nlohmann::ordered_json;
    ordered_json measures = ordered_json::array();
    for (std::size_t j = 0; j < s.family.measure_count(); ++j) {
        const auto probs = s.family.measure(j).probabilities();
        measures.push_back({{"name", s.measure_names[j]},
                            {"probabilities", std::vector<double>(probs.begin(), probs.end())}});
    }
    ordered_json space{{"values", s.values}};
    if (!s.labels.empty()) space["labels"] = s.labels;
    space["measures"] = measures;

    const auto& p = s.params;
    const auto& ro = p.rosenthal;
    return ordered_json{
        {"name", s.name},
        {"seed", s.seed},
        {"space", space},
        {"sequence", {{"horizon", s.horizon}, {"exponent", s.exponent}}},
        {"parameters",
         {{"p", p.p},
          {"q", p.q},
          {"c", p.c},
          {"mu", p.mu},
          {"eps", p.eps},
          {"window", p.window},
          {"replicates", p.replicates},
          {"checkpoints", p.checkpoints},
          {"threshold", p.threshold},
          {"ratio_bound", p.ratio_bound},
          {"tail_grid", p.tail_grid},
          {"axiom_trials", p.axiom_trials},
          {"fuzz_instances", p.fuzz_instances},
          {"square_sum", {{"eps", p.square_sum_eps}, {"window", p.square_sum_window}}},
          {"rosenthal",
           {{"support", ro.support_values},
            {"probability_grid", ro.probability_grid},
            {"exponents", ro.exponents},
            {"max_length", ro.max_length},
            {"compare_enumeration", ro.compare_enumeration},
            {"tightness_probe", p.rosenthal_tightness_probe}}}}}};
}

}  // namespace cli
