#include "qsearch/statevector.hpp"

#include <cmath>
#include <sstream>

#include "qsearch/errors.hpp"

namespace qsearch {

double QuantumState::norm() const {
    double n2 = 0.0;
    for (const auto& a : amplitudes)
        n2 += std::norm(a);
    return std::sqrt(n2);
}

QuantumState prepare_product_state(const RegisterPartition& partition,
                                   const std::vector<LocalState>& locals,
                                   int max_qubits) {
    const int m = partition.stage_count();
    if (static_cast<int>(locals.size()) != m)
        throw ConfigError("expected one register state per register (" +
                          std::to_string(m) + "), got " +
                          std::to_string(locals.size()));
    for (int reg = 1; reg <= m; ++reg) {
        if (locals[static_cast<std::size_t>(reg) - 1].qubits() !=
            partition.size(reg))
            throw ConfigError("register state " + std::to_string(reg) +
                              " has the wrong qubit count for the partition");
    }
    if (partition.total_qubits() > max_qubits)
        throw ResourceCapError(
            "state over " + std::to_string(partition.total_qubits()) +
            " qubits exceeds the cap of " + std::to_string(max_qubits) +
            " (raise max_qubits to override)");

    // Build the product iteratively from register 1 outward so that the
    // innermost register varies fastest, matching the bit layout.
    std::vector<cdouble> amps{cdouble{1.0, 0.0}};
    for (int reg = 1; reg <= m; ++reg) {
        const auto& local = locals[static_cast<std::size_t>(reg) - 1].amplitudes();
        std::vector<cdouble> next(amps.size() * local.size());
        for (std::uint64_t hi = 0; hi < local.size(); ++hi)
            for (std::uint64_t lo = 0; lo < amps.size(); ++lo)
                next[hi * amps.size() + lo] = local[hi] * amps[lo];
        amps = std::move(next);
    }
    return QuantumState{partition, std::move(amps)};
}

void apply_partial_diffusion(QuantumState& state, int reg,
                             const LocalState& psi) {
    const auto& part = state.partition;
    if (psi.qubits() != part.size(reg))
        throw ConfigError("diffusion state size does not match register " +
                          std::to_string(reg));
    double n2 = 0.0;
    for (const auto& a : psi.amplitudes())
        n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-9)
        throw ConfigError("diffusion axis for register " + std::to_string(reg) +
                          " is not normalized");

    const std::uint64_t d = part.dim(reg);
    const std::uint64_t stride = std::uint64_t{1} << part.offset(reg);
    const std::uint64_t total = part.total_dim();
    const std::uint64_t block = d * stride;
    const auto& p = psi.amplitudes();
    auto* a = state.amplitudes.data();

    // For every joint value of the other registers, reflect the length-d
    // strided slice about |psi>: slice -= 2 <psi|slice> psi.
    for (std::uint64_t base = 0; base < total; base += block) {
        for (std::uint64_t low = 0; low < stride; ++low) {
            const std::uint64_t start = base + low;
            cdouble dot{0.0, 0.0};
            for (std::uint64_t v = 0; v < d; ++v)
                dot += std::conj(p[v]) * a[start + v * stride];
            dot *= 2.0;
            for (std::uint64_t v = 0; v < d; ++v)
                a[start + v * stride] -= dot * p[v];
        }
    }
}

void apply_oracle(QuantumState& state, std::uint64_t target) {
    if (target >= state.partition.total_dim())
        throw ConfigError("oracle target outside the state space");
    state.amplitudes[target] = -state.amplitudes[target];
}

std::vector<std::uint64_t> measure_registers(QuantumState& state,
                                             const std::vector<int>& regs,
                                             Rng& rng) {
    const auto& part = state.partition;
    if (regs.empty())
        throw ConfigError("measurement needs at least one register");

    // Compact the measured registers into a small joint outcome index so the
    // marginal fits in a vector even when the full state is large.
    std::uint64_t joint_dim = 1;
    std::uint64_t sel_mask = 0;
    for (int reg : regs) {
        sel_mask |= part.mask(reg);
        joint_dim *= part.dim(reg);
    }
    auto compact = [&](std::uint64_t index) {
        std::uint64_t key = 0;
        for (int reg : regs)
            key = key * part.dim(reg) + part.register_value(index, reg);
        return key;
    };

    std::vector<double> marginal(joint_dim, 0.0);
    const std::uint64_t total = part.total_dim();
    for (std::uint64_t i = 0; i < total; ++i) {
        const double w = std::norm(state.amplitudes[i]);
        if (w != 0.0)
            marginal[compact(i)] += w;
    }

    double total_prob = 0.0;
    for (double w : marginal)
        total_prob += w;
    if (total_prob < 1e-14)
        throw NumericError("measurement on a state with vanishing norm");

    // Sample the joint outcome by a cumulative scan; the final bucket absorbs
    // any rounding shortfall.
    const double draw = rng.uniform() * total_prob;
    double acc = 0.0;
    std::uint64_t outcome = joint_dim - 1;
    for (std::uint64_t k = 0; k < joint_dim; ++k) {
        acc += marginal[k];
        if (draw < acc) {
            outcome = k;
            break;
        }
    }

    // Unpack the compact outcome back into per-register values.
    std::vector<std::uint64_t> values(regs.size());
    {
        std::uint64_t rest = outcome;
        for (std::size_t k = regs.size(); k-- > 0;) {
            const std::uint64_t d = part.dim(regs[k]);
            values[k] = rest % d;
            rest /= d;
        }
    }
    std::uint64_t selected = 0;
    for (std::size_t k = 0; k < regs.size(); ++k)
        selected |= values[k] << part.offset(regs[k]);

    const double p_outcome = marginal[outcome];
    if (p_outcome < 1e-300)
        throw NumericError("sampled a measurement outcome with zero support");
    const double scale = 1.0 / std::sqrt(p_outcome);
    for (std::uint64_t i = 0; i < total; ++i) {
        if ((i & sel_mask) == selected)
            state.amplitudes[i] *= scale;
        else
            state.amplitudes[i] = cdouble{0.0, 0.0};
    }
    return values;
}

void reinitialize_registers(QuantumState& state, const std::vector<int>& regs,
                            const std::vector<LocalState>& locals) {
    const auto& part = state.partition;
    if (regs.size() != locals.size())
        throw ConfigError("one replacement state is needed per register");

    std::uint64_t sel_mask = 0;
    for (std::size_t k = 0; k < regs.size(); ++k) {
        if (locals[k].qubits() != part.size(regs[k]))
            throw ConfigError("replacement state size does not match register " +
                              std::to_string(regs[k]));
        sel_mask |= part.mask(regs[k]);
    }

    // The registers being replaced must hold a definite basis value, i.e. all
    // amplitude mass sits at a single setting of the selected bits.
    const std::uint64_t total = part.total_dim();
    std::uint64_t current = 0;
    {
        double best = -1.0;
        std::uint64_t best_bits = 0;
        double outside = 0.0;
        // First pass: locate the dominant setting.
        for (std::uint64_t i = 0; i < total; ++i) {
            const double w = std::norm(state.amplitudes[i]);
            if (w > best) {
                best = w;
                best_bits = i & sel_mask;
            }
        }
        for (std::uint64_t i = 0; i < total; ++i)
            if ((i & sel_mask) != best_bits)
                outside += std::norm(state.amplitudes[i]);
        if (outside > 1e-20)
            throw ConfigError(
                "registers being reinitialized are not in a definite basis "
                "state (stray probability " + std::to_string(outside) + ")");
        current = best_bits;
    }

    // Scatter in place: each surviving amplitude (selected bits == current)
    // fans out over the replacement product state. Zero the old slots first
    // when they do not coincide with a destination.
    // Product of the replacement states with regs[0] as the fastest-varying
    // factor; the scatter below only needs consistent indexing.
    std::vector<cdouble> replacement{cdouble{1.0, 0.0}};
    for (std::size_t k = 0; k < regs.size(); ++k) {
        const auto& local = locals[k].amplitudes();
        std::vector<cdouble> next(replacement.size() * local.size());
        for (std::uint64_t hi = 0; hi < local.size(); ++hi)
            for (std::uint64_t lo = 0; lo < replacement.size(); ++lo)
                next[hi * replacement.size() + lo] = local[hi] * replacement[lo];
        replacement = std::move(next);
    }
    auto scatter_bits = [&](std::uint64_t packed) {
        std::uint64_t bits = 0;
        std::uint64_t rest = packed;
        for (std::size_t k = 0; k < regs.size(); ++k) {
            const std::uint64_t d = part.dim(regs[k]);
            bits |= (rest % d) << part.offset(regs[k]);
            rest /= d;
        }
        return bits;
    };

    for (std::uint64_t base = 0; base < total; ++base) {
        if ((base & sel_mask) != 0)
            continue; // enumerate each residual index once, selected bits clear
        const cdouble src = state.amplitudes[base | current];
        for (std::uint64_t packed = 0; packed < replacement.size(); ++packed)
            state.amplitudes[base | scatter_bits(packed)] =
                src * replacement[packed];
    }
}

double probability_of_prefix(const QuantumState& state,
                             const std::vector<int>& regs,
                             const std::vector<std::uint64_t>& values) {
    const auto& part = state.partition;
    if (regs.size() != values.size())
        throw ConfigError("one value is needed per register");
    std::uint64_t sel_mask = 0;
    std::uint64_t selected = 0;
    for (std::size_t k = 0; k < regs.size(); ++k) {
        sel_mask |= part.mask(regs[k]);
        selected |= values[k] << part.offset(regs[k]);
    }
    double p = 0.0;
    const std::uint64_t total = part.total_dim();
    for (std::uint64_t i = 0; i < total; ++i)
        if ((i & sel_mask) == selected)
            p += std::norm(state.amplitudes[i]);
    return p;
}

std::string amplitudes_to_json(const QuantumState& state) {
    std::ostringstream out;
    out.precision(17);
    out << "[";
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        if (i)
            out << ",";
        out << "[" << state.amplitudes[i].real() << ","
            << state.amplitudes[i].imag() << "]";
    }
    out << "]";
    return out.str();
}

} // namespace qsearch
