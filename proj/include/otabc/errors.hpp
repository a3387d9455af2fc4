#pragma once

#include <stdexcept>
#include <string>

namespace otabc {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arguments violate a documented precondition (empty input, bad dimension,
// value outside its admissible range, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// The operation is not defined for the given object, e.g. quantiles of a
// multivariate measure or the log-density of a simulator that has none.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Problem size exceeds a configured cap.
class TooLargeError : public Error {
public:
    using Error::Error;
};

// Posterior query against a run with zero accepted draws.
class NoPosteriorError : public Error {
public:
    using Error::Error;
};

} // namespace otabc
