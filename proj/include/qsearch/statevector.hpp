#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qsearch/local_state.hpp"
#include "qsearch/partition.hpp"
#include "qsearch/rng.hpp"

namespace qsearch {

// Dense multi-register state. Amplitudes are indexed by the basis-state
// integer; register 1 owns the least-significant bits (see RegisterPartition).
struct QuantumState {
    RegisterPartition partition;
    std::vector<cdouble> amplitudes;

    double norm() const;
};

// Tensor product of per-register states, given innermost register first
// (locals[0] is register 1). Refuses to allocate beyond max_qubits.
QuantumState prepare_product_state(const RegisterPartition& partition,
                                   const std::vector<LocalState>& locals,
                                   int max_qubits);

// Reflection about |psi> on one register: a -> a - 2 |psi><psi| a, acting as
// identity on every other register. psi must match the register's size and
// be normalized.
void apply_partial_diffusion(QuantumState& state, int reg,
                             const LocalState& psi);

// Phase oracle for a single marked basis state of the full index space.
void apply_oracle(QuantumState& state, std::uint64_t target);

// Projective measurement of the listed registers in the computational basis.
// Collapses and renormalizes the state; returns one outcome per requested
// register, in the order requested.
std::vector<std::uint64_t> measure_registers(QuantumState& state,
                                             const std::vector<int>& regs,
                                             Rng& rng);

// Replaces registers that currently hold a definite basis value with fresh
// copies of the given local states (locals[k] goes to regs[k]). Used after a
// mid-run measurement to restart the inner registers.
void reinitialize_registers(QuantumState& state, const std::vector<int>& regs,
                            const std::vector<LocalState>& locals);

// Probability that measuring the listed registers would yield the given
// values, without disturbing the state.
double probability_of_prefix(const QuantumState& state,
                             const std::vector<int>& regs,
                             const std::vector<std::uint64_t>& values);

// Amplitudes as a JSON array of [re, im] pairs (diagnostic dumps).
std::string amplitudes_to_json(const QuantumState& state);

} // namespace qsearch
