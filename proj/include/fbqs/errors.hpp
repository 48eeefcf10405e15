#pragma once

#include <stdexcept>
#include <string>

namespace fbqs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value lies outside the structure it is used with (node not in universe, ...).
struct DomainError : Error {
    using Error::Error;
};

// An enumeration would exceed the configured universe cap.
struct CapacityError : Error {
    using Error::Error;
};

// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

// An internal consistency assertion failed; must never fire on valid inputs.
struct InternalInvariantError : Error {
    using Error::Error;
};

// A scenario or command configuration is unusable.
struct ConfigError : Error {
    using Error::Error;
};

// Scenario text could not be parsed; the message names the first violated
// constraint and the field it occurred in.
struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};

} // namespace fbqs
