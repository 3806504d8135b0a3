#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenario.hpp"

namespace cli {

/// Comma-separated table with a header row. Cells are preformatted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

/// %.17g
std::string fmt(double v);

struct CommandResult {
    std::string name;
    nlohmann::ordered_json report;
    Table table;
    std::size_t violations = 0;
};

struct RunOptions {
    unsigned threads = 1;
};

/// axioms, choquet, inequalities, rosenthal, three-series, slln
const std::vector<std::string>& command_names();

/// Throws std::invalid_argument for an unknown name; errors raised by the
/// library (precondition failures, bad horizons) propagate.
CommandResult run_command(const std::string& name, const Scenario& scenario, const RunOptions& options);

}  // namespace cli
