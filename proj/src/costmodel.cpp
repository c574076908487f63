#include "qsearch/costmodel.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qsearch/errors.hpp"
#include "qsearch/expansion.hpp"

namespace qsearch {

namespace {

// Depth constants. S1 is the ancilla-free quadratic decomposition; S2 and S3
// trade borrowed or clean ancillas for linear depth. Values are per
// two-qubit-gate layer and normalized so a single controlled gate has
// depth 1.
constexpr double kQuadA = 8.0, kQuadB = 4.0, kQuadC = 1.0; // S1
constexpr double kDirtyA = 8.0, kDirtyB = 5.0;             // S2
constexpr double kCleanA = 6.0, kCleanB = 5.0;             // S3
constexpr double kDiffusionPadLayers = 4.0; // prep + X on both sides
constexpr double kGroverLayersPerQubit = 2.0;

double infinity() { return std::numeric_limits<double>::infinity(); }

void validate_sizes(const std::vector<int>& sizes) {
    if (sizes.empty())
        throw ConfigError("partition must have at least one register");
    long long total = 0;
    for (int s : sizes) {
        if (s < 1)
            throw ConfigError("register sizes must be positive");
        total += s;
    }
    if (total > 63)
        throw ConfigError("partitions beyond 63 qubits are not supported");
}

std::vector<double> uniform_thetas(const std::vector<int>& sizes_outer_first) {
    std::vector<double> thetas;
    thetas.reserve(sizes_outer_first.size());
    for (auto it = sizes_outer_first.rbegin(); it != sizes_outer_first.rend();
         ++it)
        thetas.push_back(theta_for_uniform_stage(*it));
    return thetas;
}

std::string format_value(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

} // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "S1" || name == "s1")
        return Scenario::s1_no_ancilla;
    if (name == "S2" || name == "s2")
        return Scenario::s2_dirty_chain;
    if (name == "S3" || name == "s3")
        return Scenario::s3_clean_ancilla;
    throw ConfigError("unknown scenario '" + name + "' (expected S1, S2, S3)");
}

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
    case Scenario::s1_no_ancilla:
        return "S1";
    case Scenario::s2_dirty_chain:
        return "S2";
    case Scenario::s3_clean_ancilla:
        return "S3";
    }
    throw ConfigError("invalid scenario value");
}

double DepthModel::mcx_depth(int controls) const {
    if (controls < 0)
        throw ConfigError("control counts must be non-negative");
    if (controls <= 1)
        return 1.0;
    const double k1 = controls - 1;
    switch (scenario) {
    case Scenario::s1_no_ancilla:
        return kQuadA * k1 * k1 + kQuadB * k1 + kQuadC;
    case Scenario::s2_dirty_chain:
        return kDirtyA * k1 + kDirtyB;
    case Scenario::s3_clean_ancilla:
        return kCleanA * k1 + kCleanB;
    }
    throw ConfigError("invalid scenario value");
}

double DepthModel::diffusion_depth(int stage_qubits) const {
    if (stage_qubits < 1)
        throw ConfigError("a register needs at least one qubit");
    return mcx_depth(stage_qubits - 1) + kDiffusionPadLayers;
}

double DepthModel::grover_diffusion_depth(int total_qubits) const {
    if (total_qubits < 1)
        throw ConfigError("the search space needs at least one qubit");
    return mcx_depth(total_qubits - 1) + kGroverLayersPerQubit * total_qubits;
}

nlohmann::json DepthModel::constants() const {
    nlohmann::json j;
    j["scenario"] = scenario_name(scenario);
    j["single_control_depth"] = 1.0;
    switch (scenario) {
    case Scenario::s1_no_ancilla:
        j["mcx_closed_form"] = "a*(k-1)^2 + b*(k-1) + c";
        j["mcx_constants"] = {kQuadA, kQuadB, kQuadC};
        break;
    case Scenario::s2_dirty_chain:
        j["mcx_closed_form"] = "a*(k-1) + b";
        j["mcx_constants"] = {kDirtyA, kDirtyB};
        break;
    case Scenario::s3_clean_ancilla:
        j["mcx_closed_form"] = "a*(k-1) + b";
        j["mcx_constants"] = {kCleanA, kCleanB};
        break;
    }
    j["diffusion_pad_layers"] = kDiffusionPadLayers;
    j["grover_layers_per_qubit"] = kGroverLayersPerQubit;
    return j;
}

std::vector<std::vector<long long>> round_diffusion_counts(
    const SchedulePrediction& plan) {
    std::vector<std::vector<long long>> counts;
    counts.reserve(plan.rounds.size());
    for (const auto& round : plan.rounds)
        counts.push_back(
            summarize_round(round.stages, round.iterates).diffusion_totals());
    return counts;
}

std::vector<long long> diffusion_application_counts(
    const SchedulePrediction& plan) {
    if (plan.rounds.empty())
        throw ConfigError("the plan has no rounds");
    std::vector<long long> totals(
        static_cast<std::size_t>(plan.rounds.front().stages), 0);
    for (const auto& per_round : round_diffusion_counts(plan))
        for (std::size_t r = 0; r < per_round.size(); ++r)
            totals[r] += per_round[r];
    return totals;
}

std::vector<int> near_equal_partition(int n, int stages) {
    if (n < 1)
        throw ConfigError("qubit count must be positive");
    if (stages < 1 || stages > n)
        throw ConfigError("stage count must lie in [1, n]");
    const int base = n / stages;
    const int rem = n - base * stages;
    std::vector<int> sizes(static_cast<std::size_t>(stages), base);
    for (int i = 0; i < rem; ++i)
        ++sizes[static_cast<std::size_t>(i)];
    return sizes;
}

CostReport analyze_cost(const std::vector<int>& sizes_outer_first,
                        Scenario scenario, BoostPolicy policy,
                        std::vector<double> oracle_multipliers) {
    validate_sizes(sizes_outer_first);
    for (double mult : oracle_multipliers)
        if (!(mult > 0.0))
            throw ConfigError("oracle multipliers must be positive");

    CostReport report;
    report.sizes_outer_first = sizes_outer_first;
    report.scenario = scenario;
    report.plan = multi_round_plan(uniform_thetas(sizes_outer_first), policy);
    report.diffusion_counts = diffusion_application_counts(report.plan);
    for (long long c : report.diffusion_counts)
        report.amplifier_applications.push_back(2 * c);

    const DepthModel model{scenario};
    const int m = static_cast<int>(sizes_outer_first.size());
    int n = 0;
    for (int s : sizes_outer_first)
        n += s;

    double recursive_depth = 0.0;
    for (int r = 1; r <= m; ++r)
        recursive_depth +=
            static_cast<double>(
                report.diffusion_counts[static_cast<std::size_t>(r) - 1]) *
            model.diffusion_depth(
                sizes_outer_first[static_cast<std::size_t>(m - r)]);
    report.recursive_diffusion_depth = recursive_depth;

    const double gdd = model.grover_diffusion_depth(n);
    const long long tg = report.plan.grover.iterations;
    report.grover_oracle_calls = tg;
    report.grover_capped = report.plan.grover.capped_at_peak;
    report.grover_diffusion_depth_total = static_cast<double>(tg) * gdd;
    report.recursive_oracle_calls = report.plan.total_oracle_calls;

    const long long extra_calls = report.recursive_oracle_calls - tg;
    if (extra_calls <= 0) {
        report.break_even = infinity();
        report.break_even_infinite = true;
    } else {
        report.break_even =
            (report.grover_diffusion_depth_total - recursive_depth) /
            (static_cast<double>(extra_calls) * gdd);
    }

    report.oracle_multipliers = std::move(oracle_multipliers);
    for (double mult : report.oracle_multipliers) {
        const double oracle_depth = mult * gdd;
        const double grover_total =
            static_cast<double>(tg) * (oracle_depth + gdd);
        const double recursive_total =
            static_cast<double>(report.recursive_oracle_calls) * oracle_depth +
            recursive_depth;
        report.relative_depths.push_back(
            grover_total > 0.0 ? recursive_total / grover_total : infinity());
    }
    return report;
}

double break_even_ratio(int n, int stages, Scenario scenario) {
    return analyze_cost(near_equal_partition(n, stages), scenario,
                        BoostPolicy::none, {})
        .break_even;
}

double relative_total_depth(int n, int stages, Scenario scenario,
                            double oracle_multiplier) {
    return analyze_cost(near_equal_partition(n, stages), scenario,
                        BoostPolicy::none, {oracle_multiplier})
        .relative_depths.front();
}

nlohmann::json cost_report_to_json(const CostReport& report) {
    nlohmann::json j;
    j["partition"] = report.sizes_outer_first;
    j["depth_model"] = DepthModel{report.scenario}.constants();
    j["boost"] = boost_policy_name(report.plan.policy);
    j["diffusion_counts"] = report.diffusion_counts;
    j["amplifier_applications"] = report.amplifier_applications;
    j["recursive_diffusion_depth"] = report.recursive_diffusion_depth;
    j["grover_diffusion_depth_total"] = report.grover_diffusion_depth_total;
    j["recursive_oracle_calls"] = report.recursive_oracle_calls;
    j["grover_oracle_calls"] = report.grover_oracle_calls;
    j["grover_capped"] = report.grover_capped;
    j["overhead"] = report.plan.overhead;
    j["success"] = report.plan.overall_success;
    if (report.break_even_infinite)
        j["break_even"] = "inf";
    else
        j["break_even"] = report.break_even;
    nlohmann::json rel = nlohmann::json::array();
    for (std::size_t k = 0; k < report.oracle_multipliers.size(); ++k)
        rel.push_back({{"oracle_multiplier", report.oracle_multipliers[k]},
                       {"relative_depth", report.relative_depths[k]}});
    j["relative_total_depth"] = std::move(rel);
    return j;
}

std::vector<SweepRow> depth_sweep(const std::vector<int>& qubit_counts,
                                  const std::vector<int>& stage_counts,
                                  const std::vector<Scenario>& scenarios,
                                  const std::vector<double>& multipliers) {
    if (qubit_counts.empty() || stage_counts.empty() || scenarios.empty() ||
        multipliers.empty())
        throw ConfigError("sweep grids must be non-empty");
    std::vector<SweepRow> rows;
    for (int n : qubit_counts)
        for (int stages : stage_counts) {
            if (stages > n)
                throw ConfigError("stage count exceeds qubit count in sweep");
            for (Scenario scenario : scenarios) {
                const CostReport report =
                    analyze_cost(near_equal_partition(n, stages), scenario,
                                 BoostPolicy::none,
                                 std::vector<double>(multipliers));
                for (std::size_t k = 0; k < multipliers.size(); ++k) {
                    SweepRow row;
                    row.n = n;
                    row.stages = stages;
                    row.scenario = scenario;
                    row.oracle_multiplier = multipliers[k];
                    row.recursive_calls = report.recursive_oracle_calls;
                    row.grover_calls = report.grover_oracle_calls;
                    row.overhead = report.plan.overhead;
                    row.break_even = report.break_even;
                    row.relative_depth = report.relative_depths[k];
                    row.failure_prob = 1.0 - report.plan.overall_success;
                    rows.push_back(row);
                }
            }
        }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "n,stages,scenario,oracle_multiplier,recursive_calls,"
        << "grover_calls,overhead,break_even,relative_depth,failure_prob\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.stages << ','
            << scenario_name(row.scenario) << ','
            << format_value(row.oracle_multiplier) << ','
            << row.recursive_calls << ',' << row.grover_calls << ','
            << format_value(row.overhead) << ','
            << format_value(row.break_even) << ','
            << format_value(row.relative_depth) << ','
            << format_value(row.failure_prob) << '\n';
    }
    return out.str();
}

} // namespace qsearch
