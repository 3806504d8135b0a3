#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sublinear/independence.hpp"
#include "sublinear/inequalities.hpp"

namespace cli {

/// Parse or validation failure; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct Parameters {
    double p = 1.5;
    double q = 2.0;
    double c = 1.0;
    double mu = 0.0;
    double eps = 1e-6;
    std::size_t window = 1000;
    std::size_t replicates = 100;
    std::vector<std::size_t> checkpoints{100, 1000, 10000, 100000};
    double threshold = 0.7;
    double ratio_bound = 0.5;
    std::vector<double> tail_grid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::size_t axiom_trials = 10000;
    std::size_t fuzz_instances = 100000;
    double square_sum_eps = 1e-3;
    std::size_t square_sum_window = 100;
    sublinear::RosenthalSweepConfig rosenthal;
    bool rosenthal_tightness_probe = true;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<double> values;
    std::vector<std::string> labels;
    std::vector<std::string> measure_names;
    sublinear::MeasureFamily family;
    std::size_t horizon = 1000;
    double exponent = 0.0;  // marginal n takes values values * n^exponent
    Parameters params;

    /// The base marginal (n = 1).
    sublinear::Marginal marginal() const;
    /// Sequence of `horizon` coordinates; i.i.d. when exponent == 0.
    sublinear::SequenceSpec sequence() const;
    /// Checkpoints not exceeding the horizon.
    std::vector<std::size_t> active_checkpoints() const;
};

/// Parses YAML text (JSON is accepted too). `source` names the document in
/// error messages.
Scenario parse_scenario(const std::string& text, const std::string& source);
Scenario load_scenario(const std::string& path);

/// Complete normalized form, defaults included. Parsing it back yields an
/// equal scenario.
nlohmann::ordered_json to_json(const Scenario& s);

}  // namespace cli
