#include "qsearch/schedule.hpp"

#include <cmath>
#include <numbers>

#include "qsearch/errors.hpp"

namespace qsearch {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr long double kPiL = std::numbers::pi_v<long double>;

// Nearest integer, ties away from zero (arguments here are positive).
long long round_half_away(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

// cos of a possibly huge phase t_scale * gamma, reduced mod 2pi in extended
// precision first. Near gamma ~ 1e-3 and t ~ 1e3 the plain double product
// already loses the digits that decide the final probability.
double cos_reduced(long double t_scale, double gamma) {
    long double phase = t_scale * static_cast<long double>(gamma);
    phase = std::fmod(phase, 2.0L * kPiL);
    return static_cast<double>(std::cos(phase));
}

double sin_reduced(long double t_scale, double gamma) {
    long double phase = t_scale * static_cast<long double>(gamma);
    phase = std::fmod(phase, 2.0L * kPiL);
    return static_cast<double>(std::sin(phase));
}

void check_angle(double theta, std::size_t index) {
    if (!(theta > 0.0) || !(theta < kPi / 2.0))
        throw ConfigError("overlap angle " + std::to_string(index + 1) +
                          " must lie strictly between 0 and pi/2");
}

} // namespace

BoostPolicy parse_boost_policy(const std::string& name) {
    if (name == "auto")
        return BoostPolicy::auto_boost;
    if (name == "none")
        return BoostPolicy::none;
    throw ConfigError("unknown boost policy '" + name +
                      "' (expected auto or none)");
}

std::string boost_policy_name(BoostPolicy policy) {
    return policy == BoostPolicy::auto_boost ? "auto" : "none";
}

double theta_for_uniform_stage(int qubits) {
    if (qubits < 1)
        throw ConfigError("stage size must be at least one qubit");
    return std::asin(std::pow(2.0, -0.5 * qubits));
}

std::vector<double> gamma_schedule(
    const std::vector<double>& thetas,
    const std::vector<long long>& intermediate_iterates) {
    const std::size_t m = thetas.size();
    if (m == 0)
        throw ConfigError("angle schedule needs at least one stage");
    if (intermediate_iterates.size() + 1 != m)
        throw ConfigError("expected " + std::to_string(m - 1) +
                          " intermediate iterates, got " +
                          std::to_string(intermediate_iterates.size()));
    for (std::size_t i = 0; i < m; ++i)
        check_angle(thetas[i], i);
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (intermediate_iterates[i] < 1)
            throw ConfigError("intermediate iterate " + std::to_string(i + 1) +
                              " must be at least 1");

    std::vector<double> gammas(m);
    gammas[0] = thetas[0];
    for (std::size_t i = 1; i < m; ++i) {
        const long long t = intermediate_iterates[i - 1];
        double arg = std::sin(2.0 * thetas[i]) *
                     sin_reduced(2.0L * static_cast<long double>(t),
                                 gammas[i - 1]);
        if (std::abs(arg) > 1.0) {
            if (std::abs(arg) > 1.0 + 1e-12)
                throw NumericError(
                    "rotation-angle recursion produced |sin| = " +
                    std::to_string(std::abs(arg)) + " at stage " +
                    std::to_string(i + 1));
            arg = arg > 0.0 ? 1.0 : -1.0;
        }
        // Principal branch: the effective angle lives in [0, pi/4] regardless
        // of over-rotation at the previous stage.
        gammas[i] = 0.5 * std::abs(std::asin(arg));
    }
    return gammas;
}

FinalIterate optimal_final_iterations(double gamma) {
    if (!(gamma > 0.0))
        throw NumericError("effective angle must be positive to pick an iterate");
    const double x = kPi / (4.0 * gamma) - 0.5;
    FinalIterate out;
    out.t = std::max<long long>(1, round_half_away(x));
    const double frac = x - std::floor(x);
    out.rounding_tie = std::abs(frac - 0.5) <= 1e-12;
    return out;
}

long long boosted_penultimate_iterations(double gamma) {
    if (!(gamma > 0.0))
        throw NumericError("effective angle must be positive to pick an iterate");
    return std::max<long long>(1, round_half_away(kPi / (4.0 * gamma)));
}

double stage_success(double theta, double gamma, long long t) {
    if (t < 1)
        throw ConfigError("iterate must be at least 1");
    const double c2g = std::cos(2.0 * gamma);
    // On the principal branch gamma <= theta, so cos(2 gamma) >= cos(2 theta)
    // >= 0 and the ratio below stays in [0, 1]. Both cosines vanish together
    // only at theta = gamma = pi/4 (a 1-qubit uniform stage driven at full
    // rotation), where the phase cosine has a matching zero and the success
    // probability is exactly 1/2 for every iterate count.
    if (std::abs(c2g) < 1e-12)
        return 0.5;
    const double ratio = std::cos(2.0 * theta) / c2g;
    const double phase_cos =
        cos_reduced(2.0L * (2.0L * static_cast<long double>(t) + 1.0L), gamma);
    return 0.5 * (1.0 - ratio * phase_cos);
}

SchedulePrediction multi_round_plan(
    const std::vector<double>& thetas, BoostPolicy policy,
    const std::vector<long long>& final_overrides) {
    const int m = static_cast<int>(thetas.size());
    if (m == 0)
        throw ConfigError("schedule needs at least one register");
    for (std::size_t i = 0; i < thetas.size(); ++i)
        check_angle(thetas[i], i);
    if (!final_overrides.empty() &&
        static_cast<int>(final_overrides.size()) != m)
        throw ConfigError("expected one final iterate per round (" +
                          std::to_string(m) + ")");

    SchedulePrediction out;
    out.thetas = thetas;
    out.policy = policy;

    double running = 1.0;
    for (int j = 1; j <= m; ++j) {
        const int a = m - j + 1; // register amplified this round
        RoundPlan round;
        round.stages = a;
        round.iterates.assign(static_cast<std::size_t>(a), 1);

        if (policy == BoostPolicy::auto_boost && j >= 2 && a >= 2) {
            // Push the next-to-last stage to its rotation ceiling before the
            // final stage takes over. The angle feeding the boost is computed
            // with all-unit iterates below it.
            const std::vector<double> below(thetas.begin(),
                                            thetas.begin() + (a - 1));
            const std::vector<long long> unit(static_cast<std::size_t>(a - 2),
                                              1);
            const auto pen_gammas = gamma_schedule(below, unit);
            round.iterates[static_cast<std::size_t>(a) - 2] =
                boosted_penultimate_iterations(pen_gammas.back());
            round.boosted = true;
        }

        const std::vector<double> active(thetas.begin(), thetas.begin() + a);
        const std::vector<long long> intermediates(round.iterates.begin(),
                                                   round.iterates.end() - 1);
        round.gammas = gamma_schedule(active, intermediates);

        if (final_overrides.empty()) {
            const FinalIterate fi = optimal_final_iterations(round.gammas.back());
            round.iterates.back() = fi.t;
            round.rounding_tie = fi.rounding_tie;
        } else {
            const long long t = final_overrides[static_cast<std::size_t>(j) - 1];
            if (t < 1)
                throw ConfigError("final iterate of round " + std::to_string(j) +
                                  " must be at least 1");
            round.iterates.back() = t;
        }

        round.success = stage_success(thetas[static_cast<std::size_t>(a) - 1],
                                      round.gammas.back(),
                                      round.iterates.back());

        long long calls = 1;
        for (int k = 1; k < a; ++k)
            if (__builtin_mul_overflow(calls, 2LL, &calls))
                throw ResourceCapError("oracle-call count overflows 64 bits");
        for (long long t : round.iterates)
            if (__builtin_mul_overflow(calls, t, &calls))
                throw ResourceCapError("oracle-call count overflows 64 bits");
        round.oracle_calls = calls;

        running *= round.success;
        out.prefix_success.push_back(running);
        if (__builtin_add_overflow(out.total_oracle_calls, calls,
                                   &out.total_oracle_calls))
            throw ResourceCapError("oracle-call count overflows 64 bits");
        out.rounds.push_back(std::move(round));
    }
    out.overall_success = running;

    // Matched baseline: a single global amplification with the product
    // overlap, run just long enough to reach the same success.
    double sin_product = 1.0;
    for (double th : thetas)
        sin_product *= std::sin(th);
    out.grover = grover_iterations_for_angle(std::asin(sin_product),
                                             out.overall_success);
    out.overhead = static_cast<double>(out.total_oracle_calls) /
                   static_cast<double>(out.grover.iterations);
    return out;
}

GroverBaseline grover_iterations_for_angle(double theta, double p) {
    if (!(theta > 0.0) || !(theta < kPi / 2.0))
        throw ConfigError("baseline overlap angle must lie in (0, pi/2)");
    if (!(p > 0.0) || p > 1.0)
        throw ConfigError("matched success probability must lie in (0, 1]");

    const long long t_peak = std::max<long long>(
        0, round_half_away(kPi / (4.0 * theta) - 0.5));
    const double target = std::min(1.0, p);
    // First t with (2t+1) theta >= asin(sqrt(p)), then a short scan around it
    // to absorb rounding at the boundary.
    const double amp = std::asin(std::min(1.0, std::sqrt(target)));
    long long t0 = static_cast<long long>(
        std::ceil((amp / theta - 1.0) / 2.0 - 1e-12));
    t0 = std::max<long long>(0, t0 - 2);
    for (long long t = t0; t <= t_peak; ++t) {
        const double s = sin_reduced(2.0L * static_cast<long double>(t) + 1.0L,
                                     theta);
        if (s * s >= p - 1e-15)
            return GroverBaseline{t, false};
    }
    return GroverBaseline{t_peak, true};
}

GroverBaseline grover_baseline(int n, double matched_success) {
    if (n < 1)
        throw ConfigError("baseline needs at least one qubit");
    return grover_iterations_for_angle(std::asin(std::pow(2.0, -0.5 * n)),
                                       matched_success);
}

OverheadBounds overhead_bounds(int s, double n) {
    if (s < 3)
        throw ConfigError(
            "overhead bound needs stages of at least 3 qubits; the geometric "
            "ratio reaches 1 below that");
    if (!(n > 0.0))
        throw ConfigError("qubit count must be positive");
    OverheadBounds out;
    out.per_stage = std::pow(1.0 - std::pow(2.0, -s), -n / (2.0 * s));
    out.geometric = 1.0 / (1.0 - std::pow(2.0, 1.0 - 0.5 * s));
    out.total = out.per_stage * out.geometric;
    return out;
}

nlohmann::json prediction_to_json(const SchedulePrediction& prediction) {
    nlohmann::json j;
    j["thetas"] = prediction.thetas;

    std::vector<double> final_gammas;
    std::vector<long long> final_iterates;
    std::vector<double> round_success;
    std::vector<long long> per_round_calls;
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : prediction.rounds) {
        final_gammas.push_back(r.gammas.back());
        final_iterates.push_back(r.iterates.back());
        round_success.push_back(r.success);
        per_round_calls.push_back(r.oracle_calls);
        nlohmann::json rj;
        rj["stages"] = r.stages;
        rj["iterates"] = r.iterates;
        rj["gammas"] = r.gammas;
        rj["success"] = r.success;
        rj["oracle_calls"] = r.oracle_calls;
        rj["boosted"] = r.boosted;
        rj["rounding_tie"] = r.rounding_tie;
        rounds.push_back(std::move(rj));
    }
    j["gammas"] = final_gammas;
    j["iterates"] = final_iterates;
    j["round_success"] = round_success;
    j["prefix_success"] = prediction.prefix_success;
    j["overall_success"] = prediction.overall_success;
    j["oracle_calls"] = {{"per_round", per_round_calls},
                         {"total", prediction.total_oracle_calls}};
    j["grover_baseline"] = {{"iterations", prediction.grover.iterations},
                            {"capped_at_peak", prediction.grover.capped_at_peak}};
    j["overhead"] = prediction.overhead;
    j["boost"] = boost_policy_name(prediction.policy);
    j["rounds"] = std::move(rounds);
    return j;
}

} // namespace qsearch
