#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qsearch/errors.hpp"

namespace qsearch {

using cdouble = std::complex<double>;

// Single-register state |psi> used as both the initial state and the axis of
// that register's partial diffusion. Stored dense; registers are small (a
// handful of qubits) even when the joint state is large.
class LocalState {
public:
    LocalState(int qubits, std::vector<cdouble> amplitudes)
        : qubits_(qubits), amps_(std::move(amplitudes)) {
        if (qubits_ < 1)
            throw ConfigError("register state needs at least one qubit");
        const std::uint64_t want = std::uint64_t{1} << qubits_;
        if (amps_.size() != want)
            throw ConfigError("register state has " +
                              std::to_string(amps_.size()) +
                              " amplitudes; expected " + std::to_string(want));
        double norm2 = 0.0;
        for (const auto& a : amps_)
            norm2 += std::norm(a);
        if (std::abs(norm2 - 1.0) > 1e-12)
            throw ConfigError("register state norm deviates from 1 by " +
                              std::to_string(std::abs(norm2 - 1.0)));
    }

    static LocalState uniform(int qubits) {
        const std::uint64_t d = std::uint64_t{1} << qubits;
        const double a = 1.0 / std::sqrt(static_cast<double>(d));
        return LocalState(qubits, std::vector<cdouble>(d, cdouble{a, 0.0}));
    }

    static LocalState basis(int qubits, std::uint64_t value) {
        const std::uint64_t d = std::uint64_t{1} << qubits;
        if (value >= d)
            throw ConfigError("basis value out of range for register");
        std::vector<cdouble> amps(d, cdouble{0.0, 0.0});
        amps[value] = cdouble{1.0, 0.0};
        return LocalState(qubits, std::move(amps));
    }

    int qubits() const { return qubits_; }
    std::uint64_t dim() const { return std::uint64_t{1} << qubits_; }
    const std::vector<cdouble>& amplitudes() const { return amps_; }

    // <x|psi> for a computational basis state x of this register.
    cdouble overlap_with_basis(std::uint64_t x) const { return amps_[x]; }

    // Component of |x> orthogonal to |psi>, normalized:
    // (|x> - conj(c) |psi>) / sqrt(1 - |c|^2) with c = <x|psi>.
    // Degenerates when |psi> is (numerically) the basis state itself.
    LocalState orthogonal_against_basis(std::uint64_t x) const {
        const cdouble c = amps_[x];
        const double rem = 1.0 - std::norm(c);
        if (rem < 1e-14)
            throw NumericError(
                "register state coincides with the marked basis state; no "
                "orthogonal direction exists");
        const double s = std::sqrt(rem);
        std::vector<cdouble> out(amps_.size());
        const cdouble cc = std::conj(c);
        for (std::uint64_t v = 0; v < amps_.size(); ++v) {
            cdouble val = -cc * amps_[v];
            if (v == x)
                val += 1.0;
            out[v] = val / s;
        }
        return LocalState(qubits_, std::move(out));
    }

private:
    int qubits_;
    std::vector<cdouble> amps_;
};

} // namespace qsearch
