#include "qsearch/search.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "qsearch/errors.hpp"

namespace qsearch {

namespace {

double norm2(const std::vector<cdouble>& v) {
    double acc = 0.0;
    for (const auto& a : v)
        acc += std::norm(a);
    return acc;
}

cdouble dot(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += std::conj(a[k]) * b[k];
    return acc;
}

// <axis| applied to register `reg`: returns the vector over the remaining
// registers, compacted by dropping the contracted register's bits.
std::vector<cdouble> contract_register(const QuantumState& state, int reg,
                                       const LocalState& axis) {
    const auto& part = state.partition;
    const int off = part.offset(reg);
    const int size = part.size(reg);
    const std::uint64_t d = part.dim(reg);
    const std::uint64_t low_dim = std::uint64_t{1} << off;
    const std::uint64_t high_dim = part.total_dim() >> (off + size);
    const auto& ax = axis.amplitudes();

    std::vector<cdouble> out(part.total_dim() >> size);
    for (std::uint64_t high = 0; high < high_dim; ++high) {
        const std::uint64_t base = high << (off + size);
        for (std::uint64_t low = 0; low < low_dim; ++low) {
            cdouble acc{0.0, 0.0};
            for (std::uint64_t v = 0; v < d; ++v)
                acc += std::conj(ax[v]) *
                       state.amplitudes[base | (v << off) | low];
            out[(high << off) | low] = acc;
        }
    }
    return out;
}

std::string register_bits(std::uint64_t value, int qubits) {
    std::string bits(static_cast<std::size_t>(qubits), '0');
    for (int b = 0; b < qubits; ++b)
        if ((value >> b) & 1u)
            bits[static_cast<std::size_t>(qubits - 1 - b)] = '1';
    return bits;
}

double cos2_reduced(long double t_scale, double gamma) {
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double phase =
        std::fmod(t_scale * static_cast<long double>(gamma), two_pi);
    const long double c = std::cos(phase);
    return static_cast<double>(c * c);
}

struct MeasurementCut {
    double on_weight = 0.0; // probability the register eventually reads x_r
    double residual = 0.0;  // reduced-state mass outside span{psi, psi_perp}
};

// Exact-expectation handling of "measure the lower registers, keep register
// reg". The kept register's reduced state is spectrally decomposed in the
// {psi, psi_perp} plane (rank <= 2 by the tensor-structure argument; the
// residual outside that plane is verified small). Each eigen-branch is split
// against |x_r>: the aligned parts of every branch collapse to the same
// pinned product state, so their weights simply add, and the orthogonal
// parts can never be flipped again (the oracle only touches the amplitude
// where every register sits at its target value), so they contribute zero
// to every statistic that conditions on register reg reading x_r.
MeasurementCut analyze_cut(const QuantumState& state, const SearchSpec& spec,
                           int reg) {
    const auto& part = state.partition;
    const LocalState& psi = spec.locals[static_cast<std::size_t>(reg) - 1];
    const std::uint64_t x_r = part.register_value(spec.target, reg);
    const LocalState perp = psi.orthogonal_against_basis(x_r);

    const auto w_psi = contract_register(state, reg, psi);
    const auto w_perp = contract_register(state, reg, perp);

    const double total = norm2(state.amplitudes);
    const double n_psi = norm2(w_psi);
    const double n_perp = norm2(w_perp);

    MeasurementCut cut;
    cut.residual = total - n_psi - n_perp;
    if (cut.residual > 1e-8)
        throw NumericError(
            "reduced state of register " + std::to_string(reg) +
            " leaks " + std::to_string(cut.residual) +
            " outside its two-dimensional span; tensor assumption broken");

    // 2x2 reduced density matrix in the {psi, psi_perp} basis.
    const double r00 = n_psi;
    const double r11 = n_perp;
    const cdouble r01 = dot(w_perp, w_psi); // <psi-row, perp-column> entry
    const double mean = 0.5 * (r00 + r11);
    const double half_gap = 0.5 * (r00 - r11);
    const double rad = std::sqrt(half_gap * half_gap + std::norm(r01));
    const double lambda[2] = {mean + rad, std::max(0.0, mean - rad)};

    const cdouble c = psi.overlap_with_basis(x_r);
    const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(c)));

    double on_weight = 0.0;
    for (int k = 0; k < 2; ++k) {
        // Two algebraically equivalent eigenvector forms. Each one
        // degenerates to rounding noise when its eigenvalue lands on the
        // matching diagonal entry (e.g. a near-diagonal density matrix),
        // so take the longer of the two; any mix stays orthogonal across
        // branches because the cross terms cancel through the trace.
        cdouble a = r01;
        cdouble b = cdouble{lambda[k] - r00, 0.0};
        if (std::norm(a) + std::norm(b) <
            (lambda[k] - r11) * (lambda[k] - r11) + std::norm(r01)) {
            a = cdouble{lambda[k] - r11, 0.0};
            b = std::conj(r01);
        }
        const double len = std::sqrt(std::norm(a) + std::norm(b));
        if (len < 1e-150) {
            // Fully degenerate density matrix: any orthonormal basis of
            // the plane gives the same spectral sum.
            a = cdouble{k == 0 ? 1.0 : 0.0, 0.0};
            b = cdouble{k == 0 ? 0.0 : 1.0, 0.0};
        } else {
            a /= len;
            b /= len;
        }
        const cdouble alpha = a * c + b * s; // <x_r | branch_k>
        on_weight += lambda[k] * std::norm(alpha);
    }
    cut.on_weight = on_weight;
    return cut;
}

// Product state with registers >= pin_from held at their target values and
// the registers below freshly prepared.
QuantumState pinned_product(const SearchSpec& spec, int pin_from) {
    const auto& part = spec.partition;
    std::vector<LocalState> locals;
    for (int reg = 1; reg <= part.stage_count(); ++reg) {
        if (reg >= pin_from)
            locals.push_back(LocalState::basis(
                part.size(reg), part.register_value(spec.target, reg)));
        else
            locals.push_back(spec.locals[static_cast<std::size_t>(reg) - 1]);
    }
    return prepare_product_state(part, locals, spec.max_qubits);
}

} // namespace

RunMode parse_run_mode(const std::string& name) {
    if (name == "sampling")
        return RunMode::sampling;
    if (name == "exact" || name == "exact-expectation")
        return RunMode::exact_expectation;
    throw ConfigError("unknown mode '" + name +
                      "' (expected sampling or exact)");
}

std::string run_mode_name(RunMode mode) {
    return mode == RunMode::sampling ? "sampling" : "exact-expectation";
}

SearchSpec SearchSpec::uniform(RegisterPartition partition,
                               std::uint64_t target) {
    std::vector<LocalState> locals;
    for (int reg = 1; reg <= partition.stage_count(); ++reg)
        locals.push_back(LocalState::uniform(partition.size(reg)));
    SearchSpec spec{std::move(partition), target, std::move(locals)};
    return spec;
}

std::vector<double> SearchSpec::overlap_angles() const {
    std::vector<double> thetas;
    for (int reg = 1; reg <= partition.stage_count(); ++reg) {
        const std::uint64_t x_r = partition.register_value(target, reg);
        const double c = std::abs(
            locals[static_cast<std::size_t>(reg) - 1].overlap_with_basis(x_r));
        if (c <= 0.0)
            throw ConfigError("register " + std::to_string(reg) +
                              " has zero overlap with its target value; the "
                              "search can never reach it");
        thetas.push_back(std::asin(std::min(1.0, c)));
    }
    return thetas;
}

void SearchSpec::validate() const {
    if (target >= partition.total_dim())
        throw ConfigError("target outside the state space");
    if (static_cast<int>(locals.size()) != partition.stage_count())
        throw ConfigError("expected one register state per register");
    for (int reg = 1; reg <= partition.stage_count(); ++reg)
        if (locals[static_cast<std::size_t>(reg) - 1].qubits() !=
            partition.size(reg))
            throw ConfigError("register state " + std::to_string(reg) +
                              " does not match the partition");
    if (mode == RunMode::sampling && shots < 1)
        throw ConfigError("sampling needs at least one shot");
    if (!final_iterates.empty() &&
        static_cast<int>(final_iterates.size()) != partition.stage_count())
        throw ConfigError("expected one final iterate per round");
}

SchedulePrediction resolve_plan(const SearchSpec& spec) {
    spec.validate();
    return multi_round_plan(spec.overlap_angles(), spec.boost,
                            spec.final_iterates);
}

void run_round(QuantumState& state, const SearchSpec& spec, int round_index,
               const SchedulePrediction& plan, RoundCounters& counters) {
    const int m = spec.partition.stage_count();
    if (round_index < 1 || round_index > m)
        throw ConfigError("round index out of range");
    const RoundPlan& round = plan.rounds[static_cast<std::size_t>(round_index) - 1];
    const OperatorSequence seq =
        expand_round(round.stages, round.iterates, spec.cancel_adjacent);
    if (static_cast<int>(counters.diffusion_applications.size()) < m)
        counters.diffusion_applications.resize(static_cast<std::size_t>(m), 0);
    for (const auto& op : seq.ops) {
        if (op.kind == OpKind::oracle) {
            apply_oracle(state, spec.target);
            ++counters.oracle_calls;
        } else {
            apply_partial_diffusion(
                state, op.reg, spec.locals[static_cast<std::size_t>(op.reg) - 1]);
            ++counters.diffusion_applications[static_cast<std::size_t>(op.reg) - 1];
        }
    }
}

RunReport run_search(const SearchSpec& spec) {
    const auto t_start = std::chrono::steady_clock::now();
    const auto plan = resolve_plan(spec);
    const auto& part = spec.partition;
    const int m = part.stage_count();

    RunReport rep;
    rep.prediction = plan;
    rep.mode = spec.mode;
    rep.seed = spec.seed;
    rep.shots = spec.mode == RunMode::sampling ? spec.shots : 0;
    rep.target_bits = format_target_bits(spec.target, part);
    rep.round_counters.assign(static_cast<std::size_t>(m), RoundCounters{});
    for (auto& c : rep.round_counters)
        c.diffusion_applications.assign(static_cast<std::size_t>(m), 0);

    // Round 1 is the expensive unitary segment and is identical for every
    // shot: simulate it once and fork shots from the pre-measurement state.
    QuantumState cached = prepare_product_state(part, spec.locals,
                                                spec.max_qubits);
    run_round(cached, spec, 1, plan, rep.round_counters[0]);

    if (spec.mode == RunMode::sampling) {
        rep.round_histograms.assign(static_cast<std::size_t>(m), {});
        rep.prefix_match_counts.assign(static_cast<std::size_t>(m), 0);
        const Rng master(spec.seed);

        for (long long shot = 0; shot < spec.shots; ++shot) {
            QuantumState state = cached;
            Rng rng = master.derived(static_cast<std::uint64_t>(shot));

            for (int j = 1; j < m; ++j) {
                const int a = m - j + 1;
                std::vector<int> regs;
                std::vector<LocalState> fresh;
                for (int r = a - 1; r >= 1; --r) {
                    regs.push_back(r);
                    fresh.push_back(spec.locals[static_cast<std::size_t>(r) - 1]);
                }
                const auto outcomes = measure_registers(state, regs, rng);
                std::string key;
                for (std::size_t k = 0; k < regs.size(); ++k)
                    key += register_bits(outcomes[k], part.size(regs[k]));
                ++rep.round_histograms[static_cast<std::size_t>(j) - 1][key];

                reinitialize_registers(state, regs, fresh);

                RoundCounters scratch;
                run_round(state, spec, j + 1, plan,
                          shot == 0 ? rep.round_counters[static_cast<std::size_t>(j)]
                                    : scratch);
            }

            std::vector<int> all;
            for (int r = m; r >= 1; --r)
                all.push_back(r);
            const auto outcomes = measure_registers(state, all, rng);
            std::uint64_t value = 0;
            for (std::size_t k = 0; k < all.size(); ++k)
                value |= outcomes[k] << part.offset(all[k]);
            ++rep.round_histograms[static_cast<std::size_t>(m) - 1]
                                  [format_target_bits(value, part)];

            for (int k = 0; k < m; ++k) {
                const int r = m - k;
                if (part.register_value(value, r) !=
                    part.register_value(spec.target, r))
                    break;
                ++rep.prefix_match_counts[static_cast<std::size_t>(k)];
            }
            if (value == spec.target)
                ++rep.success_count;
        }

        rep.success_frequency = static_cast<double>(rep.success_count) /
                                static_cast<double>(spec.shots);
        for (long long c : rep.prefix_match_counts)
            rep.prefix_match_frequencies.push_back(
                static_cast<double>(c) / static_cast<double>(spec.shots));
    } else {
        QuantumState state = std::move(cached);
        double weight = 1.0;
        for (int j = 1; j <= m; ++j) {
            if (j > 1)
                run_round(state, spec, j, plan,
                          rep.round_counters[static_cast<std::size_t>(j) - 1]);
            if (j < m) {
                const int r = m - j + 1;
                const MeasurementCut cut = analyze_cut(state, spec, r);
                rep.rank_residuals.push_back(cut.residual);
                weight *= cut.on_weight;
                rep.prefix_probabilities.push_back(weight);
                state = pinned_product(spec, r);
            } else {
                rep.success_probability =
                    weight * std::norm(state.amplitudes[spec.target]);
                rep.prefix_probabilities.push_back(rep.success_probability);
            }
        }
    }

    rep.total_diffusion_applications.assign(static_cast<std::size_t>(m), 0);
    for (const auto& c : rep.round_counters) {
        rep.total_oracle_calls += c.oracle_calls;
        for (std::size_t r = 0; r < c.diffusion_applications.size(); ++r)
            rep.total_diffusion_applications[r] += c.diffusion_applications[r];
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return rep;
}

nlohmann::json report_to_json(const RunReport& rep) {
    nlohmann::json j;
    j["mode"] = run_mode_name(rep.mode);
    j["seed"] = rep.seed;
    j["target"] = rep.target_bits;
    j["prediction"] = prediction_to_json(rep.prediction);

    nlohmann::json per_round = nlohmann::json::array();
    for (const auto& c : rep.round_counters)
        per_round.push_back({{"oracle_calls", c.oracle_calls},
                             {"diffusion_applications",
                              c.diffusion_applications}});
    j["counters"] = {
        {"per_round", std::move(per_round)},
        {"total_oracle_calls", rep.total_oracle_calls},
        {"total_diffusion_applications", rep.total_diffusion_applications}};

    if (rep.mode == RunMode::sampling) {
        j["shots"] = rep.shots;
        j["success_count"] = rep.success_count;
        j["success_frequency"] = rep.success_frequency;
        j["prefix_match_counts"] = rep.prefix_match_counts;
        j["prefix_match_frequencies"] = rep.prefix_match_frequencies;
        nlohmann::json hists = nlohmann::json::array();
        for (const auto& h : rep.round_histograms) {
            nlohmann::json hj = nlohmann::json::object();
            for (const auto& [bits, count] : h)
                hj[bits] = count;
            hists.push_back(std::move(hj));
        }
        j["round_histograms"] = std::move(hists);
    } else {
        j["success_probability"] = rep.success_probability;
        j["prefix_probabilities"] = rep.prefix_probabilities;
        j["rank_residuals"] = rep.rank_residuals;
    }
    return j;
}

ProjectionNormReport verify_projection_norms(
    const RegisterPartition& partition, const std::vector<LocalState>& locals,
    std::uint64_t target, const std::vector<long long>& iterates, int trials,
    Rng& rng, double gamma_bias) {
    const int m = partition.stage_count();
    if (static_cast<int>(locals.size()) != m)
        throw ConfigError("expected one register state per register");
    if (static_cast<int>(iterates.size()) != m)
        throw ConfigError("expected one iterate per stage");
    if (trials < 1)
        throw ConfigError("at least one trial is required");
    if (partition.total_qubits() > 16)
        throw ResourceCapError(
            "projection-norm verification is a dense small-instance check; "
            "use 16 qubits or fewer");

    std::vector<double> thetas;
    for (int reg = 1; reg <= m; ++reg)
        thetas.push_back(std::asin(std::min(
            1.0, std::abs(locals[static_cast<std::size_t>(reg) - 1]
                              .overlap_with_basis(
                                  partition.register_value(target, reg))))));
    const std::vector<long long> intermediates(iterates.begin(),
                                               iterates.end() - 1);
    const auto gammas = gamma_schedule(thetas, intermediates);
    const double gamma = gammas.back() + gamma_bias;
    const long long t = iterates.back();

    ProjectionNormReport rep;
    rep.trials = trials;
    rep.expected_aligned =
        cos2_reduced(2.0L * static_cast<long double>(t), gamma);
    rep.expected_orthogonal = 1.0 - rep.expected_aligned;

    const OperatorSequence seq = expand_round(m, iterates, true);
    const LocalState& psi_m = locals[static_cast<std::size_t>(m) - 1];
    const LocalState perp_m = psi_m.orthogonal_against_basis(
        partition.register_value(target, m));

    // Basis of the lower-register span: one product vector per choice of
    // psi/psi_perp on each lower register.
    const int lower_regs = m - 1;
    const std::uint64_t lower_dim = std::uint64_t{1} << partition.offset(m);
    std::vector<std::vector<cdouble>> branch;
    for (std::uint64_t mask = 0;
         mask < (std::uint64_t{1} << lower_regs); ++mask) {
        std::vector<cdouble> v{cdouble{1.0, 0.0}};
        for (int reg = 1; reg <= lower_regs; ++reg) {
            const LocalState& base = locals[static_cast<std::size_t>(reg) - 1];
            const LocalState factor =
                ((mask >> (reg - 1)) & 1u)
                    ? base.orthogonal_against_basis(
                          partition.register_value(target, reg))
                    : base;
            const auto& f = factor.amplitudes();
            std::vector<cdouble> next(v.size() * f.size());
            for (std::uint64_t hi = 0; hi < f.size(); ++hi)
                for (std::uint64_t lo = 0; lo < v.size(); ++lo)
                    next[hi * v.size() + lo] = f[hi] * v[lo];
            v = std::move(next);
        }
        branch.push_back(std::move(v));
    }

    auto gaussian = [&rng]() {
        const double u1 = std::max(rng.uniform(), 1e-300);
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               cdouble{std::cos(2.0 * std::numbers::pi * u2),
                       std::sin(2.0 * std::numbers::pi * u2)};
    };

    // Trial -1 is the canonical all-psi lower state; the rest are random
    // unit vectors in the span.
    for (int trial = -1; trial < trials; ++trial) {
        std::vector<cdouble> phi(lower_dim, cdouble{0.0, 0.0});
        if (trial < 0) {
            phi = branch[0];
        } else {
            std::vector<cdouble> coeff(branch.size());
            double n2 = 0.0;
            for (auto& c : coeff) {
                c = gaussian();
                n2 += std::norm(c);
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t b = 0; b < branch.size(); ++b)
                for (std::uint64_t k = 0; k < lower_dim; ++k)
                    phi[k] += coeff[b] * inv * branch[b][k];
        }

        std::vector<cdouble> amps(partition.total_dim());
        const auto& top = psi_m.amplitudes();
        for (std::uint64_t v = 0; v < top.size(); ++v)
            for (std::uint64_t k = 0; k < lower_dim; ++k)
                amps[(v << partition.offset(m)) | k] = top[v] * phi[k];
        QuantumState state{partition, std::move(amps)};

        for (const auto& op : seq.ops) {
            if (op.kind == OpKind::oracle)
                apply_oracle(state, target);
            else
                apply_partial_diffusion(
                    state, op.reg,
                    locals[static_cast<std::size_t>(op.reg) - 1]);
        }

        const double aligned = norm2(contract_register(state, m, psi_m));
        const double orthogonal = norm2(contract_register(state, m, perp_m));
        rep.max_deviation_aligned =
            std::max(rep.max_deviation_aligned,
                     std::abs(aligned - rep.expected_aligned));
        rep.max_deviation_orthogonal =
            std::max(rep.max_deviation_orthogonal,
                     std::abs(orthogonal - rep.expected_orthogonal));
    }
    return rep;
}

} // namespace qsearch
