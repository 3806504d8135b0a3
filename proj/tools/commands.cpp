#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sublinear/capacity.hpp"
#include "sublinear/core.hpp"
#include "sublinear/inequalities.hpp"
#include "sublinear/series.hpp"
#include "sublinear/slln.hpp"

namespace cli {

using nlohmann::ordered_json;
using namespace sublinear;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

namespace {

std::string n2s(std::size_t n) { return std::to_string(n); }

ordered_json witness_json(const std::optional<EventPairWitness>& w) {
    if (!w) return nullptr;
    return {{"a", w->a}, {"b", w->b}, {"lhs", w->lhs}, {"rhs", w->rhs}};
}

CommandResult axioms(const Scenario& s, const RunOptions&) {
    CommandResult out;
    out.name = "axioms";
    const auto report = check_axioms(s.family, s.params.axiom_trials, s.seed);
    const CapacityPair pair(s.family);
    const auto cap = check_capacity_subadditivity(pair, 12, 1'000'000, s.seed);

    out.table.header = {"check", "cases", "violations", "max_excess"};
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"axiom", c.axiom}, {"checks", c.checks}, {"violations", c.violations}, {"max_excess", c.max_excess}});
        out.table.rows.push_back({c.axiom, n2s(c.checks), n2s(c.violations), fmt(c.max_excess)});
    }
    ordered_json witnesses = ordered_json::array();
    for (const auto& v : report.violations) {
        witnesses.push_back({{"axiom", v.axiom}, {"witness", v.witness}, {"excess", v.excess}});
    }
    out.table.rows.push_back({"capacity_subadditivity", n2s(cap.pairs_checked), n2s(cap.upper_violations), fmt(0.0)});
    out.table.rows.push_back({"capacity_mixed_bound", n2s(cap.pairs_checked), n2s(cap.mixed_violations), fmt(0.0)});
    out.table.rows.push_back({"capacity_normalization", n2s(cap.pairs_checked), n2s(cap.normalization_violations), fmt(0.0)});
    out.table.rows.push_back({"capacity_monotonicity", n2s(cap.pairs_checked), n2s(cap.monotonicity_violations), fmt(0.0)});

    const std::size_t cap_violations =
        cap.upper_violations + cap.mixed_violations + cap.normalization_violations + cap.monotonicity_violations;
    out.violations = report.violation_count() + cap_violations;
    out.report = {
        {"trials", report.trials},
        {"checks", checks},
        {"witnesses", witnesses},
        {"capacity",
         {{"exhaustive", cap.exhaustive},
          {"pairs_checked", cap.pairs_checked},
          {"upper_violations", cap.upper_violations},
          {"mixed_violations", cap.mixed_violations},
          {"normalization_violations", cap.normalization_violations},
          {"monotonicity_violations", cap.monotonicity_violations},
          {"first_violation", witness_json(cap.first_violation)},
          {"lower_nonsubadditive_witness", witness_json(cap.lower_nonsubadditive_witness)}}},
        {"violations", out.violations}};
    return out;
}

CommandResult choquet(const Scenario& s, const RunOptions&) {
    CommandResult out;
    out.name = "choquet";
    const RandomVariable x(s.values);
    const CapacityPair pair(s.family);
    const double p = s.params.p;
    const double upper = upper_expectation(s.family, x);
    const double lower = lower_expectation(s.family, x);
    const double cu = choquet_integral(pair, x, CapacitySide::upper).value;
    const double cl = choquet_integral(pair, x, CapacitySide::lower).value;
    const double moment = choquet_moment(s.family, x, p);
    const double upper_moment = upper_expectation(s.family, x.map([p](double v) { return std::pow(std::abs(v), p); }));

    std::size_t violations = 0;
    ordered_json ordering = ordered_json::array();
    auto order = [&](const char* name, double lhs, double rhs) {
        const bool ok = within_bound(lhs, rhs);
        if (!ok) ++violations;
        ordering.push_back({{"check", name}, {"lhs", lhs}, {"rhs", rhs}, {"holds", ok}});
    };
    order("upper_le_choquet_upper", upper, cu);
    order("lower_le_upper", lower, upper);
    order("choquet_lower_le_lower", cl, lower);
    order("upper_moment_le_choquet_moment", upper_moment, moment);

    out.table.header = {"quantity", "argument", "value"};
    out.table.rows = {{"upper_expectation", "", fmt(upper)},
                      {"lower_expectation", "", fmt(lower)},
                      {"choquet_upper", "", fmt(cu)},
                      {"choquet_lower", "", fmt(cl)},
                      {"choquet_moment", fmt(p), fmt(moment)},
                      {"upper_moment", fmt(p), fmt(upper_moment)}};
    ordered_json tails = ordered_json::array();
    double previous = INFINITY;
    for (double a : s.params.tail_grid) {
        const double t = tail_expectation(s.family, x, a);
        if (t > previous + kTolerance) ++violations;
        previous = t;
        tails.push_back({{"a", a}, {"value", t}});
        out.table.rows.push_back({"tail_expectation", fmt(a), fmt(t)});
    }
    out.violations = violations;
    out.report = {{"p", p},
                  {"upper_expectation", upper},
                  {"lower_expectation", lower},
                  {"choquet_upper", cu},
                  {"choquet_lower", cl},
                  {"choquet_moment", moment},
                  {"upper_moment", upper_moment},
                  {"ordering", ordering},
                  {"tail_expectations", tails},
                  {"violations", violations}};
    return out;
}

CommandResult inequalities(const Scenario& s, const RunOptions& opt) {
    CommandResult out;
    out.name = "inequalities";
    out.table.header = {"sweep", "inequality", "instances", "violations", "min_slack"};
    ordered_json sweeps = ordered_json::object();
    for (const bool own_family : {false, true}) {
        FuzzConfig cfg;
        cfg.instances = s.params.fuzz_instances;
        cfg.seed = mix_seed(s.seed, own_family ? 1 : 0);
        cfg.threads = opt.threads;
        if (own_family) cfg.family = s.family;
        const auto report = fuzz_inequalities(cfg);
        const char* sweep = own_family ? "scenario_family" : "random_families";
        ordered_json rows = ordered_json::array();
        for (const auto& r : report.rows) {
            rows.push_back({{"inequality", r.inequality},
                            {"instances", r.instances},
                            {"violations", r.violations},
                            {"min_slack", r.min_slack},
                            {"first_violation", r.first_violation}});
            out.table.rows.push_back({sweep, r.inequality, n2s(r.instances), n2s(r.violations), fmt(r.min_slack)});
        }
        sweeps[sweep] = rows;
        out.violations += report.violations();
    }
    out.report = {{"instances_per_inequality", s.params.fuzz_instances}, {"sweeps", sweeps}, {"violations", out.violations}};
    return out;
}

ordered_json sweep_json(const RosenthalSweepReport& r) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"length", row.length},
                        {"p", row.p},
                        {"cases", row.cases},
                        {"violations", row.violations},
                        {"min_slack_ratio", row.min_slack_ratio},
                        {"max_enumeration_gap", row.max_enumeration_gap}});
    }
    return {{"marginal_count", r.marginal_count},
            {"cases", r.cases},
            {"violations", r.violations},
            {"centered_cases", r.centered_cases},
            {"centered_violations", r.centered_violations},
            {"min_slack_ratio", r.min_slack_ratio},
            {"tightest_case", r.tightest_case},
            {"max_enumeration_gap", r.max_enumeration_gap},
            {"rows", rows}};
}

CommandResult rosenthal(const Scenario& s, const RunOptions& opt) {
    constexpr double kGapTolerance = 1e-10;
    CommandResult out;
    out.name = "rosenthal";
    out.table.header = {"grid", "length", "p", "cases", "violations", "min_slack_ratio", "max_enumeration_gap"};

    auto run = [&](const char* name, RosenthalSweepConfig cfg) {
        cfg.threads = opt.threads;
        const auto r = rosenthal_sweep(cfg);
        for (const auto& row : r.rows) {
            out.table.rows.push_back({name, n2s(row.length), fmt(row.p), n2s(row.cases), n2s(row.violations),
                                      fmt(row.min_slack_ratio), fmt(row.max_enumeration_gap)});
        }
        out.violations += r.violations + r.centered_violations;
        if (r.max_enumeration_gap > kGapTolerance) ++out.violations;
        return r;
    };

    const auto base = run("scenario", s.params.rosenthal);
    out.report["grid"] = sweep_json(base);
    if (s.params.rosenthal_tightness_probe) {
        RosenthalSweepConfig wide = widened_rosenthal_grid();
        wide.exponents = s.params.rosenthal.exponents;
        wide.compare_enumeration = s.params.rosenthal.compare_enumeration;
        const auto probe = run("tightness_probe", wide);
        out.report["tightness_probe"] = sweep_json(probe);
        out.report["tight_case_found"] = std::min(base.min_slack_ratio, probe.min_slack_ratio) < 0.1;
    } else {
        out.report["tight_case_found"] = base.min_slack_ratio < 0.1;
    }

    // The scenario's own sequence, when its mean condition allows.
    ordered_json own = ordered_json::array();
    const std::size_t n = std::min<std::size_t>(s.horizon, 4);
    const auto spec = s.sequence().prefix(n);
    for (double p : s.params.rosenthal.exponents) {
        for (auto form : {RosenthalForm::drawdown, RosenthalForm::centered}) {
            const char* fname = form == RosenthalForm::drawdown ? "drawdown" : "centered";
            try {
                const auto r = verify_rosenthal(spec, p, form);
                if (!r.holds) ++out.violations;
                own.push_back({{"form", fname}, {"p", p}, {"length", n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}});
            } catch (const PreconditionError& e) {
                own.push_back({{"form", fname}, {"p", p}, {"length", n}, {"skipped", e.what()}});
            }
        }
    }
    out.report["scenario_sequence"] = own;
    out.report["violations"] = out.violations;
    return out;
}

ordered_json diagnostics_json(const SeriesDiagnostics& d) {
    ordered_json traces = ordered_json::array();
    for (const auto& t : d.traces) {
        traces.push_back({{"name", t.name}, {"verdict", to_string(t.verdict)}, {"final", t.partial_sums.back()}});
    }
    return {{"overall", to_string(d.overall)},
            {"window", d.window},
            {"eps", d.eps},
            {"assertion_violations", d.assertion_violations},
            {"traces", traces}};
}

CommandResult three_series(const Scenario& s, const RunOptions&) {
    CommandResult out;
    out.name = "three-series";
    const auto& p = s.params;
    const auto spec = s.sequence();
    const auto three = three_series_check(spec, p.c, p.q, s.horizon, p.eps, p.window);
    const auto thm = theorem1_check(spec, p.q, s.horizon, p.eps, p.window);

    out.table.header = {"n"};
    for (const auto& t : three.traces) out.table.header.push_back(t.name);
    for (const auto& t : thm.traces) out.table.header.push_back(t.name);
    out.table.rows.reserve(s.horizon);
    for (std::size_t n = 0; n < s.horizon; ++n) {
        std::vector<std::string> row{n2s(n + 1)};
        for (const auto& t : three.traces) row.push_back(fmt(t.partial_sums[n]));
        for (const auto& t : thm.traces) row.push_back(fmt(t.partial_sums[n]));
        out.table.rows.push_back(std::move(row));
    }
    out.violations = three.assertion_violations + thm.assertion_violations;
    out.report = {{"c", p.c},
                  {"q", p.q},
                  {"horizon", s.horizon},
                  {"three_series", diagnostics_json(three)},
                  {"theorem1", diagnostics_json(thm)},
                  {"note", "criterion-not-satisfied makes no claim that the series diverges"},
                  {"violations", out.violations}};
    return out;
}

CommandResult slln(const Scenario& s, const RunOptions& opt) {
    CommandResult out;
    out.name = "slln";
    const auto& p = s.params;
    MarcinkiewiczConfig cfg;
    cfg.replicates = p.replicates;
    cfg.checkpoints = s.active_checkpoints();
    if (cfg.checkpoints.empty()) throw std::invalid_argument("no checkpoint lies within the horizon");
    cfg.threshold = p.threshold;
    cfg.ratio_bound = p.ratio_bound;
    cfg.tail_grid = p.tail_grid;
    cfg.seed = s.seed;
    cfg.threads = opt.threads;
    const auto spec = s.sequence();
    const auto m = marcinkiewicz_check(spec, p.p, p.mu, cfg);

    out.table.header = {"strategy", "n", "median", "q90", "max"};
    ordered_json strategies = ordered_json::array();
    for (const auto& t : m.trajectories.strategies) {
        for (std::size_t j = 0; j < cfg.checkpoints.size(); ++j) {
            out.table.rows.push_back({t.strategy, n2s(cfg.checkpoints[j]), fmt(t.median[j]), fmt(t.q90[j]), fmt(t.maximum[j])});
        }
        strategies.push_back({{"strategy", t.strategy},
                              {"median", t.median},
                              {"q90", t.q90},
                              {"max", t.maximum},
                              {"decade_ratios", t.decade_ratios},
                              {"scaling_ratio", t.scaling_ratio},
                              {"values", t.values}});
    }

    ordered_json square = nullptr;
    bool square_diverged = false;
    if (s.horizon >= 2 * p.square_sum_window) {
        const auto sq = square_sum_trace(s.family, RandomVariable(s.values), p.p, s.horizon, p.square_sum_eps,
                                         p.square_sum_window);
        square_diverged = sq.verdict == Verdict::not_converged;
        square = {{"verdict", to_string(sq.verdict)},
                  {"limit_estimate", sq.limit_estimate},
                  {"choquet_moment", sq.choquet_moment},
                  {"clamp_inactive_from", sq.clamp_inactive_from}};
    }

    const bool falsified = !m.consistent && !m.outside_proven_scope;
    out.violations = (falsified ? 1 : 0) + (square_diverged ? 1 : 0);
    out.report = {{"p", m.p},
                  {"mu", m.mu},
                  {"verdict", m.verdict()},
                  {"outside_proven_scope", m.outside_proven_scope},
                  {"hypotheses",
                   {{"choquet_moment", m.choquet_moment},
                    {"upper_mean", m.upper_mean},
                    {"lower_mean", m.lower_mean},
                    {"mean_condition", m.mean_condition},
                    {"tail_grid", p.tail_grid},
                    {"tail_expectations", m.tail_expectations},
                    {"tail_vanishes", m.tail_vanishes},
                    {"identical_distribution_gap", m.identical_distribution_gap}}},
                  {"threshold", p.threshold},
                  {"ratio_bound", p.ratio_bound},
                  {"final_max", m.final_max},
                  {"worst_scaling_ratio", m.worst_scaling_ratio},
                  {"consistent", m.consistent},
                  {"replicates", p.replicates},
                  {"checkpoints", cfg.checkpoints},
                  {"strategies", strategies},
                  {"square_sum", square},
                  {"violations", out.violations}};
    return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"axioms", "choquet", "inequalities", "rosenthal", "three-series", "slln"};
    return names;
}

CommandResult run_command(const std::string& name, const Scenario& scenario, const RunOptions& options) {
    if (name == "axioms") return axioms(scenario, options);
    if (name == "choquet") return choquet(scenario, options);
    if (name == "inequalities") return inequalities(scenario, options);
    if (name == "rosenthal") return rosenthal(scenario, options);
    if (name == "three-series") return three_series(scenario, options);
    if (name == "slln") return slln(scenario, options);
    throw std::invalid_argument("unknown subcommand " + name);
}

}  // namespace cli
