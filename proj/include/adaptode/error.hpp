#pragma once

#include <stdexcept>
#include <string>

namespace adaptode {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN/Inf, or an adaptive integrator underflowed.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A file was readable but its content does not follow the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace adaptode
