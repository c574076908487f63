#pragma once

#include <cstdint>
#include <vector>

namespace qsearch {

enum class OpKind { oracle, diffusion };

// One primitive gate of the flattened circuit. reg is the 1-based register a
// diffusion acts on; the oracle touches every register and carries reg = 0.
struct PrimitiveOp {
    OpKind kind = OpKind::oracle;
    int reg = 0;

    bool operator==(const PrimitiveOp&) const = default;
};

struct OperatorSequence {
    std::vector<PrimitiveOp> ops; // application order (first op acts first)
    long long oracle_count = 0;
    std::vector<long long> diffusion_counts; // [r-1] = applications on register r
    bool cancelled = false;
};

// Flattens the recursive reflection W_i into primitive ops:
//   W_0 = Oracle
//   W_i = (S_i W_{i-1})^{t_i} S_i (W_{i-1} S_i)^{t_i}
// (products act right to left, so the application order of W_i is
// [S_i, W_{i-1}] x t_i, then S_i, then [W_{i-1}, S_i] x t_i).
// With cancel set, runs of diffusions between oracles collapse to their
// parity: diffusions on distinct registers commute, equal pairs square to
// the identity. iterates supplies t_1..t_stage.
OperatorSequence expand_w(int stage, const std::vector<long long>& iterates,
                          bool cancel);

// Flattens one amplification round, (S_a W_{a-1})^{t_a} with a = stages:
// application order [W_{a-1}, S_a] repeated t_a times. iterates supplies
// t_1..t_a.
OperatorSequence expand_round(int stages,
                              const std::vector<long long>& iterates,
                              bool cancel);

// Applies the same parity cancellation to an existing op list.
OperatorSequence cancel_sequence(const std::vector<PrimitiveOp>& ops,
                                 int register_count);

// Gate counts of a cancelled sequence without materializing it. Tracks, per
// register, the diffusion parity before the first oracle (lead), after the
// last oracle (trail), and the number of surviving diffusions strictly
// between oracles (interior). Concatenation and powers then reduce to XORs
// and popcounts, so counts for iterates in the millions stay O(1).
struct SequenceSummary {
    bool has_oracle = false;
    long long oracles = 0;
    std::uint64_t lead = 0;  // parity mask; whole-sequence parity if no oracle
    std::uint64_t trail = 0; // zero when has_oracle is false
    std::vector<long long> interior; // [r-1] = survivors between oracles

    static SequenceSummary oracle_op(int register_count);
    static SequenceSummary diffusion_op(int reg, int register_count);

    // Summary of "this sequence, then `later`".
    SequenceSummary then(const SequenceSummary& later) const;
    SequenceSummary power(long long t) const;

    long long oracle_total() const { return has_oracle ? oracles : 0; }
    // Cancelled diffusion count per register (index r-1).
    std::vector<long long> diffusion_totals() const;
};

SequenceSummary summarize_w(int stage, const std::vector<long long>& iterates);
SequenceSummary summarize_round(int stages,
                                const std::vector<long long>& iterates);

} // namespace qsearch
