#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kScenarios = SCENARIO_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "sublinear");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("sublinear_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Scenario, ParsesWorkedExamples) {
    for (const char* f : {"coin.yaml", "mean_zero.yaml", "classical_singleton.yaml", "inverse_squares.yaml"}) {
        EXPECT_NO_THROW(cli::load_scenario(kScenarios + "/" + f)) << f;
    }
    const auto coin = cli::load_scenario(kScenarios + "/coin.yaml");
    EXPECT_EQ(coin.seed, 42u);
    EXPECT_EQ(coin.family.measure_count(), 2u);
    EXPECT_EQ(coin.labels[1], "heads");
}

TEST(Scenario, NormalizedFormRoundTrips) {
    const auto s = cli::load_scenario(kScenarios + "/mean_zero.yaml");
    const auto j = cli::to_json(s);
    const auto again = cli::parse_scenario(j.dump(), "roundtrip");
    EXPECT_EQ(cli::to_json(again), j);
}

TEST(Scenario, BadSumNamesMeasureAndLine) {
    const std::string text =
        "name: bad\nseed: 1\nspace:\n  values: [-1, 1]\n  measures:\n    - name: skewed\n      probabilities: [0.5, 0.4]\n";
    try {
        cli::parse_scenario(text, "bad.yaml");
        FAIL() << "accepted a measure summing to 0.9";
    } catch (const cli::ConfigError& e) {
        EXPECT_EQ(e.line(), 7u);
        EXPECT_NE(std::string(e.what()).find("'skewed'"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("bad.yaml:7"), std::string::npos) << e.what();
    }
}

TEST(Scenario, RejectsBadParameters) {
    const std::string head = "seed: 1\nspace:\n  values: [0, 1]\n  measures: [{probabilities: [0.5, 0.5]}]\n";
    EXPECT_THROW(cli::parse_scenario(head + "parameters: {p: 2.5}\n", "x"), cli::ConfigError);
    EXPECT_THROW(cli::parse_scenario(head + "parameters: {checkpoints: [10, 5]}\n", "x"), cli::ConfigError);
    EXPECT_THROW(cli::parse_scenario(head + "parameters: {typo: 1}\n", "x"), cli::ConfigError);
    EXPECT_THROW(cli::parse_scenario("space:\n  values: [1]\n  measures: [{probabilities: [1]}]\n", "x"),
                 cli::ConfigError);
    EXPECT_THROW(cli::parse_scenario(head + "sequence: {horizon: -3}\n", "x"), cli::ConfigError);
}

TEST(Scenario, ExponentScalesMarginals) {
    auto s = cli::load_scenario(kScenarios + "/inverse_squares.yaml");
    const auto spec = s.sequence();
    EXPECT_EQ(spec.common_marginal(), nullptr);
    EXPECT_DOUBLE_EQ(spec.marginal(1).values[1], 0.25);
}

TEST(Cli, AxiomsOnCoinIsClean) {
    const auto dir = fresh_dir("axioms");
    EXPECT_EQ(run({"axioms", "--scenario", kScenarios + "/coin.yaml", "--out", dir.string()}), 0);
    const auto report = nlohmann::json::parse(slurp(dir / "axioms.json"));
    EXPECT_EQ(report["violations"], 0);
    EXPECT_TRUE(fs::exists(dir / "axioms.csv"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, MalformedScenarioExitsTwo) {
    const auto dir = fresh_dir("malformed");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.yaml") << "seed: 1\nspace:\n  values: [-1, 1]\n  measures:\n"
                                       "    - name: skewed\n      probabilities: [0.5, 0.4]\n";
    testing::internal::CaptureStderr();
    const int code = run({"axioms", "--scenario", (dir / "bad.yaml").string(), "--out", dir.string()});
    const std::string err = testing::internal::GetCapturedStderr();
    EXPECT_EQ(code, 2);
    EXPECT_NE(err.find("skewed"), std::string::npos) << err;
    EXPECT_NE(err.find(":6:"), std::string::npos) << err;
}

TEST(Cli, UsageErrorsExitTwo) {
    testing::internal::CaptureStderr();
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"axioms"}), 2);
    EXPECT_EQ(run({"nonsense", "--scenario", "x"}), 2);
    EXPECT_EQ(run({"axioms", "--scenario", "/nonexistent.yaml"}), 2);
    testing::internal::GetCapturedStdout();
    testing::internal::GetCapturedStderr();
}

TEST(Cli, PreconditionFailureExitsTwo) {
    // Coin has upper mean 0.4 != lower mean, so p = 1.5 is refused.
    testing::internal::CaptureStderr();
    const auto dir = fresh_dir("precondition");
    EXPECT_EQ(run({"slln", "--scenario", kScenarios + "/coin.yaml", "--out", dir.string(), "--horizon", "1000"}), 0);
    const auto s = cli::load_scenario(kScenarios + "/coin.yaml");
    auto j = cli::to_json(s);
    j["parameters"]["p"] = 1.5;
    std::ofstream(dir / "coin15.yaml") << j.dump(2);
    EXPECT_EQ(run({"slln", "--scenario", (dir / "coin15.yaml").string(), "--out", dir.string(), "--horizon", "1000"}), 2);
    testing::internal::GetCapturedStderr();
}

TEST(Cli, ReportsReparseAndTablesAreRectangular) {
    const auto dir = fresh_dir("reports");
    const auto scenario = kScenarios + "/mean_zero.yaml";
    for (const char* cmd : {"choquet", "three-series", "slln"}) {
        // slln may legitimately report a violation on a short horizon; only the format is under test.
        const int code = run({cmd, "--scenario", scenario, "--out", dir.string(), "--horizon", "5000"});
        ASSERT_TRUE(code == 0 || code == 1) << cmd;
        const auto report = nlohmann::json::parse(slurp(dir / (std::string(cmd) + ".json")));
        EXPECT_EQ(report["subcommand"], cmd);
        std::istringstream csv(slurp(dir / (std::string(cmd) + ".csv")));
        std::string line;
        std::getline(csv, line);
        const auto columns = std::count(line.begin(), line.end(), ',');
        std::size_t rows = 0;
        while (std::getline(csv, line)) {
            EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns) << cmd;
            ++rows;
        }
        EXPECT_GT(rows, 0u) << cmd;
        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        EXPECT_EQ(manifest["subcommand"], cmd);
        EXPECT_EQ(manifest["scenario"]["sequence"]["horizon"], 5000);
    }
}

TEST(Cli, SllnIsDeterministicAndReplayable) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b"), c = fresh_dir("det_c"), d = fresh_dir("det_d");
    const auto scenario = kScenarios + "/mean_zero.yaml";
    const int first = run({"slln", "--scenario", scenario, "--out", a.string(), "--horizon", "20000", "--seed", "99"});
    ASSERT_NE(first, 2);
    EXPECT_EQ(run({"slln", "--scenario", scenario, "--out", b.string(), "--horizon", "20000", "--seed", "99",
                   "--threads", "3"}),
              first);
    EXPECT_EQ(run({"replay", (a / "manifest.json").string(), "--out", c.string()}), first);
    EXPECT_NE(run({"slln", "--scenario", scenario, "--out", d.string(), "--horizon", "20000", "--seed", "100"}), 2);
    EXPECT_EQ(slurp(a / "slln.csv"), slurp(b / "slln.csv"));
    EXPECT_EQ(slurp(a / "slln.csv"), slurp(c / "slln.csv"));
    EXPECT_EQ(slurp(a / "slln.json"), slurp(c / "slln.json"));
    EXPECT_NE(slurp(a / "slln.csv"), slurp(d / "slln.csv"));
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(manifest["seed"], 99);
    EXPECT_EQ(manifest["scenario"]["seed"], 99);
}

TEST(Cli, EnvironmentSetsDefaultOutput) {
    const auto dir = fresh_dir("env");
    setenv("SUBLINEAR_OUT_DIR", dir.string().c_str(), 1);
    const int code = run({"choquet", "--scenario", kScenarios + "/coin.yaml"});
    unsetenv("SUBLINEAR_OUT_DIR");
    EXPECT_EQ(code, 0);
    EXPECT_TRUE(fs::exists(dir / "choquet.csv"));
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(cli::fmt(0.1), "0.10000000000000001");
    EXPECT_EQ(cli::fmt(1.0), "1");
    cli::Table t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}};
    EXPECT_EQ(t.to_csv(), "a,b\n1,2\n");
}
