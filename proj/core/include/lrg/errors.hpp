#pragma once

#include <stdexcept>
#include <string>

namespace lrg {

/// Invalid or inconsistent configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An output constraint was violated in a phase where the update law
/// guarantees it cannot be. This means the configured Holder constants
/// (L, beta) do not actually hold for the plant and must be revised.
/// CLI exit code 3.
class SafetyFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, a singular model matrix, or a failed integration
/// step. CLI exit code 4.
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lrg
