#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qsearch/schedule.hpp"

namespace qsearch {

// Ancilla scenarios for the multi-controlled gate underlying each diffusion:
// S1 decomposes with no ancillas (quadratic depth in the control count),
// S2 borrows idle qubits as a dirty chain, S3 assumes one clean ancilla
// (both linear). Depths are modeled, not transpiled; the constants live in
// DepthModel and are echoed into every report.
enum class Scenario { s1_no_ancilla, s2_dirty_chain, s3_clean_ancilla };

Scenario parse_scenario(const std::string& name); // "S1" | "S2" | "S3"
std::string scenario_name(Scenario scenario);

struct DepthModel {
    Scenario scenario = Scenario::s1_no_ancilla;

    // Two-qubit-gate depth of a k-controlled phase gate. k <= 1 counts as a
    // single gate; larger k follows the scenario's closed form.
    double mcx_depth(int controls) const;

    // Reflection about the uniform state of one s-qubit register: the
    // multi-controlled phase plus a prep/unprep plus X/unX layer on each side.
    double diffusion_depth(int stage_qubits) const;

    // Grover-baseline reflection over all n qubits: one (n-1)-controlled
    // phase plus 2n single-qubit layers.
    double grover_diffusion_depth(int total_qubits) const;

    nlohmann::json constants() const;
};

struct CostReport {
    std::vector<int> sizes_outer_first;
    Scenario scenario = Scenario::s1_no_ancilla;
    SchedulePrediction plan;

    // Diffusion counts per register (index r-1 = register r, innermost
    // first), summed over rounds of the cancelled expansion. The amplifier
    // for stage r appears twice per surviving diffusion, hence the 2x field.
    std::vector<long long> diffusion_counts;
    std::vector<long long> amplifier_applications;

    double recursive_diffusion_depth = 0.0;
    double grover_diffusion_depth_total = 0.0;
    long long recursive_oracle_calls = 0;
    long long grover_oracle_calls = 0;
    bool grover_capped = false;

    // Oracle depth (in units of the baseline reflection depth) at which both
    // schemes reach equal total depth; infinite when the recursive schedule
    // does not make extra oracle calls.
    double break_even = 0.0;
    bool break_even_infinite = false;

    std::vector<double> oracle_multipliers;
    std::vector<double> relative_depths; // aligned with oracle_multipliers
};

// Per-round, per-register diffusion counts of the cancelled expansion;
// row j covers the registers active in round j+1.
std::vector<std::vector<long long>> round_diffusion_counts(
    const SchedulePrediction& plan);

// Flattened per-register totals across all rounds (index r-1 = register r).
std::vector<long long> diffusion_application_counts(
    const SchedulePrediction& plan);

// Splits n qubits into `stages` registers, outermost registers taking the
// remainder: near_equal_partition(20, 3) -> {7, 7, 6}.
std::vector<int> near_equal_partition(int n, int stages);

CostReport analyze_cost(const std::vector<int>& sizes_outer_first,
                        Scenario scenario, BoostPolicy policy,
                        std::vector<double> oracle_multipliers = {1.0});

double break_even_ratio(int n, int stages, Scenario scenario);

double relative_total_depth(int n, int stages, Scenario scenario,
                            double oracle_multiplier);

nlohmann::json cost_report_to_json(const CostReport& report);

struct SweepRow {
    int n = 0;
    int stages = 0;
    Scenario scenario = Scenario::s1_no_ancilla;
    double oracle_multiplier = 1.0;
    long long recursive_calls = 0;
    long long grover_calls = 0;
    double overhead = 0.0;
    double break_even = 0.0; // +inf when never breaking even
    double relative_depth = 0.0;
    double failure_prob = 0.0;
};

std::vector<SweepRow> depth_sweep(const std::vector<int>& qubit_counts,
                                  const std::vector<int>& stage_counts,
                                  const std::vector<Scenario>& scenarios,
                                  const std::vector<double>& multipliers);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

} // namespace qsearch
