#pragma once

#include <stdexcept>
#include <string>

namespace klnmf {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shapes of two operands do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value violates a domain constraint (negative data, non-finite entry, ...).
class ValueError : public Error {
public:
    using Error::Error;
};

/// A matrix file could not be parsed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// The solver produced or detected a non-finite quantity.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A factor column (or row) has decayed to all zeros while unregularized.
class DeadComponentError : public Error {
public:
    using Error::Error;
};

} // namespace klnmf
