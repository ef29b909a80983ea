#pragma once

#include <stdexcept>
#include <string>

namespace qhlab {

// Bad build parameters: malformed grids, precondition violations, unusable
// profile targets. Maps to CLI usage handling when raised during parsing.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A density node (rho at or below the working floor) where a phase, a
// velocity, or the Madelung integrator is undefined.
struct NodeError : std::runtime_error {
    explicit NodeError(const std::string& msg) : std::runtime_error(msg) {}
};

// The time stepper produced NaN/Inf, or a phase could not be unwrapped at
// the available resolution.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Root finding could not reach its target (e.g. a plateau density level
// above the achievable maximum).
struct CalibrationError : std::runtime_error {
    explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Command-line / config-file errors: unknown command or key, bad value type,
// missing required key. CLI exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qhlab
