#pragma once

#include <stdexcept>
#include <string>

namespace cagegen {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input (instance files, bad arguments).
class InputError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened or read.
class IoError : public InputError {
public:
    using InputError::InputError;
};

/// Geometrically degenerate arguments (zero-length vectors, coincident points).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// The endpoint graph admits no interconnection tree.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace cagegen
