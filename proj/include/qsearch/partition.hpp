#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qsearch/errors.hpp"

namespace qsearch {

// Ordered register sizes for a staged search, written outermost stage first
// (the way a partition appears on the command line: "6,6,6" or "9,9").
//
// Bit layout: register 1 is the innermost register and occupies the
// least-significant bits of a basis-state index; register i starts at
// offset(i). A target string therefore reads left to right from register m
// down to register 1, matching the printed outcome order.
class RegisterPartition {
public:
    explicit RegisterPartition(std::vector<int> sizes_outer_first)
        : sizes_(std::move(sizes_outer_first)) {
        if (sizes_.empty())
            throw ConfigError("partition must contain at least one register");
        for (std::size_t k = 0; k < sizes_.size(); ++k) {
            if (sizes_[k] < 1)
                throw ConfigError("partition entry " + std::to_string(k + 1) +
                                  " must be a positive qubit count");
        }
        total_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
        if (total_ > 63)
            throw ConfigError("partition spans " + std::to_string(total_) +
                              " qubits; indices are limited to 63 bits");
        offsets_.resize(sizes_.size());
        int off = 0;
        for (int reg = 1; reg <= stage_count(); ++reg) {
            offsets_[static_cast<std::size_t>(reg) - 1] = off;
            off += size(reg);
        }
    }

    int stage_count() const { return static_cast<int>(sizes_.size()); }
    int total_qubits() const { return total_; }

    // Register access is 1-based with register 1 innermost.
    int size(int reg) const {
        check_register(reg);
        return sizes_[static_cast<std::size_t>(stage_count() - reg)];
    }
    int offset(int reg) const {
        check_register(reg);
        return offsets_[static_cast<std::size_t>(reg) - 1];
    }

    std::uint64_t dim(int reg) const { return std::uint64_t{1} << size(reg); }
    std::uint64_t mask(int reg) const { return (dim(reg) - 1) << offset(reg); }
    std::uint64_t total_dim() const { return std::uint64_t{1} << total_; }

    std::uint64_t register_value(std::uint64_t index, int reg) const {
        return (index >> offset(reg)) & (dim(reg) - 1);
    }

    const std::vector<int>& sizes_outer_first() const { return sizes_; }

    bool operator==(const RegisterPartition& other) const {
        return sizes_ == other.sizes_;
    }

private:
    void check_register(int reg) const {
        if (reg < 1 || reg > stage_count())
            throw ConfigError("register index " + std::to_string(reg) +
                              " outside partition with " +
                              std::to_string(stage_count()) + " registers");
    }

    std::vector<int> sizes_;   // outermost first, as constructed
    std::vector<int> offsets_; // innermost first: offsets_[i-1] for register i
    int total_ = 0;
};

// Parses a bitstring written outermost register first ("x_m ... x_1") into a
// basis-state index, or the shorthand "all-ones".
inline std::uint64_t parse_target_bits(const std::string& bits,
                                       const RegisterPartition& partition) {
    const int n = partition.total_qubits();
    if (bits == "all-ones")
        return partition.total_dim() - 1;
    if (static_cast<int>(bits.size()) != n)
        throw ConfigError("target has " + std::to_string(bits.size()) +
                          " bits but the partition spans " + std::to_string(n));
    std::uint64_t index = 0;
    for (int b = 0; b < n; ++b) {
        const char c = bits[static_cast<std::size_t>(n - 1 - b)];
        if (c == '1')
            index |= std::uint64_t{1} << b;
        else if (c != '0')
            throw ConfigError(std::string("target contains character '") + c +
                              "'; only 0 and 1 are allowed");
    }
    return index;
}

inline std::string format_target_bits(std::uint64_t index,
                                      const RegisterPartition& partition) {
    const int n = partition.total_qubits();
    std::string bits(static_cast<std::size_t>(n), '0');
    for (int b = 0; b < n; ++b)
        if ((index >> b) & 1u)
            bits[static_cast<std::size_t>(n - 1 - b)] = '1';
    return bits;
}

} // namespace qsearch
