#pragma once

#include <stdexcept>
#include <string>

namespace cdslab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Subsystem names or dimensions do not line up.
class LayoutError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration or a dense representation would be too large.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace cdslab
