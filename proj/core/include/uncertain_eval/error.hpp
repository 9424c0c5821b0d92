#pragma once

#include <stdexcept>
#include <string>

namespace ueval {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad files, inconsistent dimensions, ids out of range.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Coordinate or index outside the image / tile grid.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Operation undefined on its argument (e.g. pignistic of a total-conflict bba).
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace ueval
