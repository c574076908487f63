#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsearch/expansion.hpp"
#include "qsearch/local_state.hpp"
#include "qsearch/partition.hpp"
#include "qsearch/rng.hpp"
#include "qsearch/schedule.hpp"
#include "qsearch/statevector.hpp"

namespace qsearch {

enum class RunMode { sampling, exact_expectation };

RunMode parse_run_mode(const std::string& name);
std::string run_mode_name(RunMode mode);

struct SearchSpec {
    RegisterPartition partition;
    std::uint64_t target = 0;
    std::vector<LocalState> locals; // locals[i] is register i+1 (innermost first)
    // Final iterate per round; empty resolves them from the schedule.
    std::vector<long long> final_iterates;
    long long shots = 1000;
    std::uint64_t seed = 1;
    RunMode mode = RunMode::sampling;
    BoostPolicy boost = BoostPolicy::auto_boost;
    int max_qubits = 26;
    bool cancel_adjacent = true;

    // Uniform initial states on every register.
    static SearchSpec uniform(RegisterPartition partition, std::uint64_t target);

    // theta_i = asin(|<x_i|psi_i>|) per register, innermost first.
    std::vector<double> overlap_angles() const;
    void validate() const;
};

struct RoundCounters {
    long long oracle_calls = 0;
    std::vector<long long> diffusion_applications; // [r-1] = register r
};

struct RunReport {
    SchedulePrediction prediction; // schedule actually executed
    RunMode mode = RunMode::sampling;
    std::uint64_t seed = 0;
    long long shots = 0;
    std::string target_bits;

    // Gate counts for one pass through all rounds (shots reuse the circuit).
    std::vector<RoundCounters> round_counters;
    long long total_oracle_calls = 0;
    std::vector<long long> total_diffusion_applications;

    // Sampling mode. prefix entries run from the outermost register down:
    // entry k counts shots whose final readout matched the target on
    // registers m..m-k; the last entry is the full match.
    long long success_count = 0;
    double success_frequency = 0.0;
    std::vector<long long> prefix_match_counts;
    std::vector<double> prefix_match_frequencies;
    // round_histograms[j-1]: outcomes of the measurement closing round j
    // (mid-run rounds measure the registers below the amplified one; the
    // last entry is the full final readout), keyed by bitstring.
    std::vector<std::map<std::string, long long>> round_histograms;

    // Exact-expectation mode: same prefix convention, probabilities instead
    // of frequencies.
    double success_probability = 0.0;
    std::vector<double> prefix_probabilities;
    std::vector<double> rank_residuals; // mass outside the 2D span, per cut

    // Informational only; deliberately left out of the serialized report so
    // identical configs produce identical bytes.
    double wall_seconds = 0.0;
};

// Resolves the iterate schedule for a spec (overlap angles from its locals,
// final-iterate overrides applied).
SchedulePrediction resolve_plan(const SearchSpec& spec);

// Applies round `round_index` (1-based; round 1 amplifies the outermost
// register) to the state: (S_a W_{a-1})^{t_a} with a = m - round_index + 1.
// Counters are incremented per primitive op actually applied.
void run_round(QuantumState& state, const SearchSpec& spec, int round_index,
               const SchedulePrediction& plan, RoundCounters& counters);

RunReport run_search(const SearchSpec& spec);

nlohmann::json report_to_json(const RunReport& report);

struct ProjectionNormReport {
    int trials = 0;
    double expected_aligned = 0.0;   // cos^2(2 t gamma)
    double expected_orthogonal = 0.0;
    double max_deviation_aligned = 0.0;
    double max_deviation_orthogonal = 0.0;
};

// Empirical check that one amplification round moves the outermost register
// between |psi_m> and its orthogonal complement by the predicted rotation,
// independent of the joint state of the lower registers. Each trial draws a
// random lower-register state from the span of per-register {psi, psi_perp}
// products (the canonical all-psi state is always included), applies
// (S_m W_{m-1})^{t_m}, and compares the squared projection norms against
// cos^2 / sin^2 of 2 t_m gamma_m. gamma_bias shifts the reference angle and
// exists so callers can prove the check has teeth.
ProjectionNormReport verify_projection_norms(
    const RegisterPartition& partition, const std::vector<LocalState>& locals,
    std::uint64_t target, const std::vector<long long>& iterates, int trials,
    Rng& rng, double gamma_bias = 0.0);

} // namespace qsearch
