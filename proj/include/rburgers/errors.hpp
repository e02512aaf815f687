#pragma once

#include <stdexcept>
#include <string>

namespace rburgers {

/// Malformed arguments handed to a library routine.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration: grid, kernel or boundary mismatch, bad file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside the region where a formula or model is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Traveling-wave data violating 0 < 3|F| <= (2S)^{3/2} or the segment shape rules.
class AdmissibilityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Non-finite state or loss of monotonicity during time stepping.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rburgers
