#include "qsearch/expansion.hpp"

#include <string>

#include "qsearch/errors.hpp"

namespace qsearch {

namespace {

constexpr long long kMaxMaterializedOps = 1LL << 26;

void check_iterates(int needed, const std::vector<long long>& iterates) {
    if (static_cast<int>(iterates.size()) < needed)
        throw ConfigError("expansion needs " + std::to_string(needed) +
                          " iterates, got " + std::to_string(iterates.size()));
    for (int j = 0; j < needed; ++j)
        if (iterates[static_cast<std::size_t>(j)] < 1)
            throw ConfigError("iterate t_" + std::to_string(j + 1) +
                              " must be at least 1");
}

// Ops in W_i: N_0 = 1, N_i = 2 t_i (N_{i-1} + 1) + 1.
long long w_op_count(int stage, const std::vector<long long>& iterates) {
    long long n = 1;
    for (int i = 1; i <= stage; ++i) {
        const long long t = iterates[static_cast<std::size_t>(i) - 1];
        long long grown = 0;
        if (__builtin_add_overflow(n, 1LL, &grown) ||
            __builtin_mul_overflow(grown, 2 * t, &grown) ||
            __builtin_add_overflow(grown, 1LL, &grown))
            throw ResourceCapError("expanded sequence length overflows");
        n = grown;
    }
    return n;
}

void append_w(int stage, const std::vector<long long>& iterates,
              std::vector<PrimitiveOp>& out) {
    if (stage == 0) {
        out.push_back(PrimitiveOp{OpKind::oracle, 0});
        return;
    }
    const long long t = iterates[static_cast<std::size_t>(stage) - 1];
    const PrimitiveOp s{OpKind::diffusion, stage};
    for (long long k = 0; k < t; ++k) {
        out.push_back(s);
        append_w(stage - 1, iterates, out);
    }
    out.push_back(s);
    for (long long k = 0; k < t; ++k) {
        append_w(stage - 1, iterates, out);
        out.push_back(s);
    }
}

OperatorSequence finalize(std::vector<PrimitiveOp> ops, int register_count,
                          bool cancelled) {
    OperatorSequence seq;
    seq.diffusion_counts.assign(static_cast<std::size_t>(register_count), 0);
    seq.cancelled = cancelled;
    for (const auto& op : ops) {
        if (op.kind == OpKind::oracle)
            ++seq.oracle_count;
        else
            ++seq.diffusion_counts[static_cast<std::size_t>(op.reg) - 1];
    }
    seq.ops = std::move(ops);
    return seq;
}

} // namespace

OperatorSequence cancel_sequence(const std::vector<PrimitiveOp>& ops,
                                 int register_count) {
    if (register_count < 1 || register_count > 63)
        throw ConfigError("register count out of range for cancellation");
    std::vector<PrimitiveOp> out;
    out.reserve(ops.size());
    std::uint64_t pending = 0; // diffusion parity per register since last flush
    auto flush = [&] {
        // Emit survivors outermost register first; order among commuting
        // diffusions is a convention.
        for (int r = register_count; r >= 1; --r)
            if ((pending >> (r - 1)) & 1u)
                out.push_back(PrimitiveOp{OpKind::diffusion, r});
        pending = 0;
    };
    for (const auto& op : ops) {
        if (op.kind == OpKind::diffusion) {
            pending ^= std::uint64_t{1} << (op.reg - 1);
        } else {
            flush();
            out.push_back(op);
        }
    }
    flush();
    return finalize(std::move(out), register_count, true);
}

OperatorSequence expand_w(int stage, const std::vector<long long>& iterates,
                          bool cancel) {
    if (stage < 0)
        throw ConfigError("stage index must be non-negative");
    check_iterates(stage, iterates);
    const long long size = w_op_count(stage, iterates);
    if (size > kMaxMaterializedOps)
        throw ResourceCapError(
            "expanded sequence would hold " + std::to_string(size) +
            " ops; use the summary path for counts at this scale");
    std::vector<PrimitiveOp> ops;
    ops.reserve(static_cast<std::size_t>(size));
    append_w(stage, iterates, ops);
    const int regs = stage > 0 ? stage : 1;
    if (cancel)
        return cancel_sequence(ops, regs);
    return finalize(std::move(ops), regs, false);
}

OperatorSequence expand_round(int stages,
                              const std::vector<long long>& iterates,
                              bool cancel) {
    if (stages < 1)
        throw ConfigError("a round needs at least one stage");
    check_iterates(stages, iterates);
    const long long t = iterates[static_cast<std::size_t>(stages) - 1];
    const long long inner = w_op_count(stages - 1, iterates);
    long long size = 0;
    if (__builtin_add_overflow(inner, 1LL, &size) ||
        __builtin_mul_overflow(size, t, &size))
        throw ResourceCapError("expanded sequence length overflows");
    if (size > kMaxMaterializedOps)
        throw ResourceCapError(
            "expanded sequence would hold " + std::to_string(size) +
            " ops; use the summary path for counts at this scale");

    std::vector<PrimitiveOp> ops;
    ops.reserve(static_cast<std::size_t>(size));
    const PrimitiveOp s{OpKind::diffusion, stages};
    for (long long k = 0; k < t; ++k) {
        append_w(stages - 1, iterates, ops);
        ops.push_back(s);
    }
    if (cancel)
        return cancel_sequence(ops, stages);
    return finalize(std::move(ops), stages, false);
}

SequenceSummary SequenceSummary::oracle_op(int register_count) {
    SequenceSummary s;
    s.has_oracle = true;
    s.oracles = 1;
    s.interior.assign(static_cast<std::size_t>(register_count), 0);
    return s;
}

SequenceSummary SequenceSummary::diffusion_op(int reg, int register_count) {
    if (reg < 1 || reg > register_count)
        throw ConfigError("diffusion register out of range");
    SequenceSummary s;
    s.lead = std::uint64_t{1} << (reg - 1);
    s.interior.assign(static_cast<std::size_t>(register_count), 0);
    return s;
}

SequenceSummary SequenceSummary::then(const SequenceSummary& later) const {
    if (interior.size() != later.interior.size())
        throw ConfigError("summaries cover different register counts");
    SequenceSummary out;
    out.interior.assign(interior.size(), 0);
    if (!has_oracle && !later.has_oracle) {
        out.lead = lead ^ later.lead;
        return out;
    }
    if (!has_oracle) { // pure diffusions folding into later's lead
        out = later;
        out.lead = lead ^ later.lead;
        return out;
    }
    if (!later.has_oracle) { // pure diffusions folding into our trail
        out = *this;
        out.trail = trail ^ later.lead;
        return out;
    }
    out.has_oracle = true;
    if (__builtin_add_overflow(oracles, later.oracles, &out.oracles))
        throw ResourceCapError("oracle count overflows 64 bits");
    out.lead = lead;
    out.trail = later.trail;
    const std::uint64_t junction = trail ^ later.lead;
    for (std::size_t r = 0; r < interior.size(); ++r) {
        long long v = 0;
        if (__builtin_add_overflow(interior[r], later.interior[r], &v) ||
            __builtin_add_overflow(
                v, static_cast<long long>((junction >> r) & 1u), &v))
            throw ResourceCapError("diffusion count overflows 64 bits");
        out.interior[r] = v;
    }
    return out;
}

SequenceSummary SequenceSummary::power(long long t) const {
    if (t < 1)
        throw ConfigError("sequence power must be at least 1");
    if (!has_oracle) {
        SequenceSummary out;
        out.interior.assign(interior.size(), 0);
        out.lead = (t & 1) ? lead : 0;
        return out;
    }
    SequenceSummary out = *this;
    if (__builtin_mul_overflow(oracles, t, &out.oracles))
        throw ResourceCapError("oracle count overflows 64 bits");
    const std::uint64_t junction = trail ^ lead;
    for (std::size_t r = 0; r < interior.size(); ++r) {
        long long v = 0;
        if (__builtin_mul_overflow(interior[r], t, &v) ||
            __builtin_add_overflow(
                v,
                static_cast<long long>((junction >> r) & 1u) * (t - 1), &v))
            throw ResourceCapError("diffusion count overflows 64 bits");
        out.interior[r] = v;
    }
    return out;
}

std::vector<long long> SequenceSummary::diffusion_totals() const {
    std::vector<long long> totals(interior.size());
    for (std::size_t r = 0; r < interior.size(); ++r)
        totals[r] = interior[r] + static_cast<long long>((lead >> r) & 1u) +
                    static_cast<long long>((trail >> r) & 1u);
    return totals;
}

SequenceSummary summarize_w(int stage,
                            const std::vector<long long>& iterates) {
    if (stage < 0)
        throw ConfigError("stage index must be non-negative");
    check_iterates(stage, iterates);
    const int regs = stage > 0 ? stage : 1;
    SequenceSummary w = SequenceSummary::oracle_op(regs);
    for (int i = 1; i <= stage; ++i) {
        const long long t = iterates[static_cast<std::size_t>(i) - 1];
        const SequenceSummary s = SequenceSummary::diffusion_op(i, regs);
        // Application order [S_i, W]^t, S_i, [W, S_i]^t.
        const SequenceSummary left = s.then(w).power(t);
        const SequenceSummary right = w.then(s).power(t);
        w = left.then(s).then(right);
    }
    return w;
}

SequenceSummary summarize_round(int stages,
                                const std::vector<long long>& iterates) {
    if (stages < 1)
        throw ConfigError("a round needs at least one stage");
    check_iterates(stages, iterates);
    const std::vector<long long> inner_iterates(
        iterates.begin(), iterates.begin() + (stages - 1));
    // Resize the inner summary to cover this round's outermost register.
    SequenceSummary inner = summarize_w(stages - 1, inner_iterates);
    inner.interior.resize(static_cast<std::size_t>(stages), 0);
    const SequenceSummary s = SequenceSummary::diffusion_op(stages, stages);
    return inner.then(s).power(iterates[static_cast<std::size_t>(stages) - 1]);
}

} // namespace qsearch
