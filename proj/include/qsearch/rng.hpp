#pragma once

#include <cstdint>

namespace qsearch {

// Splittable counter-style generator built on the SplitMix64 finalizer.
// std::mt19937 plus the standard distributions are avoided deliberately:
// distribution output is implementation-defined, and run reports must be
// byte-identical for a given seed across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Independent generator for a numbered sub-task (one shot, one trial).
    // Pure: does not advance this generator, so the derivation is stable
    // no matter how many draws the parent has made.
    Rng derived(std::uint64_t stream) const {
        return Rng(mix(state_ ^ mix(stream + 0x2545f4914f6cdd1dull)));
    }

    std::uint64_t state() const { return state_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace qsearch
