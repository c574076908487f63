#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qsearch {

// Whether rounds after the first enlarge their next-to-last iterate to push
// the effective rotation angle toward its ceiling before the final stage.
enum class BoostPolicy { none, auto_boost };

BoostPolicy parse_boost_policy(const std::string& name);
std::string boost_policy_name(BoostPolicy policy);

// Initial overlap angle of a uniform register of `qubits` qubits with one
// marked basis state: asin(2^{-qubits/2}).
double theta_for_uniform_stage(int qubits);

// Effective rotation angles gamma_1..gamma_m given per-register overlap
// angles (innermost register first) and the iterate applied at each
// intermediate stage (size m-1):
//   gamma_1 = theta_1
//   gamma_i = 1/2 * asin( sin(2 theta_i) * sin(2 t_{i-1} gamma_{i-1}) )
// taken on the principal branch [0, pi/4].
std::vector<double> gamma_schedule(
    const std::vector<double>& thetas,
    const std::vector<long long>& intermediate_iterates);

struct FinalIterate {
    long long t = 1;
    // pi/(4 gamma) - 1/2 landed on a half-integer; the choice between the two
    // neighbors is a convention (documented as half-away-from-zero).
    bool rounding_tie = false;
};

// Iterate maximizing the final-stage success: round(pi/(4 gamma) - 1/2),
// ties away from zero, floored at 1.
FinalIterate optimal_final_iterations(double gamma);

// Largest useful next-to-last iterate: round(pi/(4 gamma)), floored at 1,
// which drives sin(2 t gamma) to its ceiling.
long long boosted_penultimate_iterations(double gamma);

// Success probability of a stage with overlap angle theta, effective angle
// gamma and t final iterations:
//   P = 1/2 * (1 - (cos 2theta / cos 2gamma) * cos(2 (2t+1) gamma)).
// The phase 2(2t+1)gamma is accumulated in extended precision and reduced
// mod 2pi before the cosine; t*gamma is large when gamma is small.
double stage_success(double theta, double gamma, long long t);

struct RoundPlan {
    int stages = 0;                  // registers active in this round
    std::vector<long long> iterates; // t_1..t_stages (innermost first)
    std::vector<double> gammas;      // gamma_1..gamma_stages
    double success = 0.0;
    long long oracle_calls = 0;
    bool boosted = false;
    bool rounding_tie = false;
};

struct GroverBaseline {
    long long iterations = 0;
    bool capped_at_peak = false;
};

struct SchedulePrediction {
    std::vector<double> thetas;         // per register, innermost first
    std::vector<RoundPlan> rounds;      // round 1 first (amplifies register m)
    std::vector<double> prefix_success; // product of the first j round successes
    double overall_success = 0.0;
    long long total_oracle_calls = 0;
    GroverBaseline grover;
    double overhead = 0.0; // total_oracle_calls / grover.iterations
    BoostPolicy policy = BoostPolicy::auto_boost;
};

// Full multi-round schedule. Round j amplifies register m-j+1 acting on the
// registers at and below it: intermediates run one iteration each (the
// next-to-last one optionally boosted from round 2 on), the final stage runs
// its optimal iterate. Per-round oracle calls are 2^(stages-1) * prod(t).
// `final_overrides`, when non-empty, replaces the final iterate of each round
// (size must equal the register count).
SchedulePrediction multi_round_plan(
    const std::vector<double>& thetas, BoostPolicy policy,
    const std::vector<long long>& final_overrides = {});

// Smallest Grover iteration count t with sin^2((2t+1) theta) >= p (within
// 1e-15). If p is unreachable the count at the peak is returned with
// capped_at_peak set.
GroverBaseline grover_iterations_for_angle(double theta, double p);

// Same, for a uniform search over n qubits: theta = asin(2^{-n/2}).
GroverBaseline grover_baseline(int n, double matched_success);

struct OverheadBounds {
    double per_stage = 0.0; // (1 - 2^{-s})^{-n/(2s)}
    double geometric = 0.0; // 1 / (1 - 2^{1 - s/2}), needs s >= 3
    double total = 0.0;
};

// Closed-form bounds on the oracle-call overhead of an n-qubit search split
// into s-qubit stages.
OverheadBounds overhead_bounds(int s, double n);

nlohmann::json prediction_to_json(const SchedulePrediction& prediction);

} // namespace qsearch
