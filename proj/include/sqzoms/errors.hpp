// errors.hpp - exception types and the warning sink shared by all modules

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sqz {

// Operand shapes disagree or a truncation is out of range.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad configuration values (unknown keys, negative rates, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameters outside the stability domain Delta_c > 2 Lambda >= 0.
struct StabilityError : std::domain_error {
    using std::domain_error::domain_error;
};

// Operation requested in a frame that cannot represent it.
struct UnsupportedFrameError : std::logic_error {
    using std::logic_error::logic_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

struct StiffnessError : NumericalError {
    using NumericalError::NumericalError;
};

struct VanishingPopulationError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegeneracyError : NumericalError {
    // -1 when the null space was too large to measure
    int nullity;
    DegeneracyError(const std::string& what, int nullity_)
        : NumericalError(what), nullity(nullity_) {}
};

using WarningSink = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink and returns the previous one.
// The default sink writes "warning: <msg>" to stderr.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

} // namespace sqz
