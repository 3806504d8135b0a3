#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "scenario.hpp"
#include "sublinear/independence.hpp"

#ifndef SUBLINEAR_VERSION
#define SUBLINEAR_VERSION "0.0.0"
#endif

namespace cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

struct Flags {
    std::string scenario;
    std::string manifest;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t horizon = 0;
    unsigned threads = 1;
};

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("SUBLINEAR_OUT_DIR"); env && *env) return env;
    return "out";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

int execute(const std::string& command, const Scenario& scenario, const std::string& source, const fs::path& dir,
            unsigned threads) {
    const std::vector<std::string> names =
        command == "all" ? command_names() : std::vector<std::string>{command};
    RunOptions options;
    options.threads = threads;

    // Everything is computed before anything is written.
    std::vector<CommandResult> results;
    for (const auto& n : names) results.push_back(run_command(n, scenario, options));

    fs::create_directories(dir);
    ordered_json outputs = ordered_json::array();
    std::size_t violations = 0;
    for (const auto& r : results) {
        ordered_json doc{{"subcommand", r.name}, {"scenario", scenario.name}, {"seed", scenario.seed}};
        for (const auto& [k, v] : r.report.items()) doc[k] = v;
        write_file(dir / (r.name + ".json"), doc.dump(2) + "\n");
        write_file(dir / (r.name + ".csv"), r.table.to_csv());
        outputs.push_back(r.name + ".json");
        outputs.push_back(r.name + ".csv");
        violations += r.violations;
        std::cout << r.name << ": " << r.violations << " violation(s)\n";
    }
    const ordered_json manifest{{"tool", "sublinear"},
                                {"version", SUBLINEAR_VERSION},
                                {"subcommand", command},
                                {"threads", threads},
                                {"seed", scenario.seed},
                                {"horizon", scenario.horizon},
                                {"scenario_source", source},
                                {"scenario", to_json(scenario)},
                                {"outputs", outputs}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << dir.string() << "\n";
    return violations == 0 ? kOk : kViolation;
}

int run_scenario(const std::string& command, const Flags& flags, const CLI::App& sub) {
    Scenario s = load_scenario(flags.scenario);
    if (sub.count("--seed")) s.seed = flags.seed;
    if (sub.count("--horizon")) {
        if (flags.horizon == 0) throw ConfigError("--horizon", 0, "horizon must be positive");
        s.horizon = flags.horizon;
    }
    return execute(command, s, flags.scenario, output_dir(flags.out), flags.threads);
}

int replay(const Flags& flags, const CLI::App& sub) {
    std::ifstream in(flags.manifest);
    if (!in) throw ConfigError(flags.manifest, 0, "cannot open manifest");
    ordered_json manifest;
    try {
        manifest = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(flags.manifest, 0, e.what());
    }
    if (!manifest.contains("scenario") || !manifest.contains("subcommand")) {
        throw ConfigError(flags.manifest, 0, "manifest lacks a scenario or subcommand");
    }
    const std::string command = manifest["subcommand"].get<std::string>();
    // JSON is a subset of YAML, so the embedded scenario goes through the same validator.
    const Scenario s = parse_scenario(manifest["scenario"].dump(2), flags.manifest + "#scenario");
    const unsigned threads = sub.count("--threads") ? flags.threads : manifest.value("threads", 1u);
    return execute(command, s, flags.manifest, output_dir(flags.out), threads);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Sub-linear expectation toolkit: axioms, capacities, inequalities, series and SLLN experiments"};
    app.require_subcommand(1);
    Flags flags;

    std::vector<std::pair<std::string, CLI::App*>> subs;
    const std::vector<std::pair<std::string, std::string>> described{
        {"axioms", "randomized axiom checks and capacity sub-additivity"},
        {"choquet", "expectations, Choquet integrals, moments and tail expectations"},
        {"inequalities", "Hoelder, Chebyshev, Jensen, Cr and positive-part fuzzing"},
        {"rosenthal", "exhaustive Rosenthal sweep against full path enumeration"},
        {"three-series", "three-series and convergence condition traces"},
        {"slln", "Marcinkiewicz strong-law trajectories under selection strategies"},
        {"all", "every subcommand above"}};
    for (const auto& [name, help] : described) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", flags.scenario, "scenario file (YAML)")->required();
        sub->add_option("--out", flags.out, "output directory (default $SUBLINEAR_OUT_DIR or ./out)");
        sub->add_option("--seed", flags.seed, "override the scenario seed");
        sub->add_option("--horizon", flags.horizon, "override the sequence horizon");
        sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
        subs.emplace_back(name, sub);
    }
    CLI::App* rep = app.add_subcommand("replay", "rerun the subcommand recorded in a manifest");
    rep->add_option("manifest", flags.manifest, "manifest.json from an earlier run")->required();
    rep->add_option("--out", flags.out, "output directory (default $SUBLINEAR_OUT_DIR or ./out)");
    rep->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (rep->parsed()) return replay(flags, *rep);
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) return run_scenario(name, flags, *sub);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const sublinear::StateSpaceError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace cli
