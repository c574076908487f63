#pragma once

#include <stdexcept>
#include <string>

namespace qsearch {

// Bad user input: malformed partitions, mismatched dimensions, invalid flags.
// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested computation exceeds a configured limit (qubit cap, counter
// overflow). The CLI maps this to exit code 4.
class ResourceCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical assumption failed at runtime: degenerate measurement,
// reduced-state rank above 2, arcsin argument out of range. These indicate a
// broken invariant rather than bad input, so they are never silently patched.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qsearch
