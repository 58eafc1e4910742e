#pragma once

#include <stdexcept>
#include <string>

namespace dpinv {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: wrong sizes, bad ids, violated
/// preconditions on the data itself.
class InputError : public Error {
public:
    using Error::Error;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

/// A numerical procedure failed: non-convergence, breakdown that cannot be
/// recovered from, singular pivots, non-finite values.
class NumericalError : public Error {
public:
    using Error::Error;
};

void require_dims(bool ok, const std::string& what);

}  // namespace dpinv
