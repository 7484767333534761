#pragma once

#include <stdexcept>
#include <string>

namespace spn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input values: non-symmetric matrices, negative weights, bad options.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition does not hold (e.g. fewer than two nodes).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied function violates its contract (e.g. a non-monotone map).
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// The study design is not a complete, balanced repeated-measures block.
class UnsupportedDesignError : public Error {
public:
    using Error::Error;
};

/// A (subject, condition) cell is absent from the manifest.
class IncompleteDesignError : public Error {
public:
    using Error::Error;
};

/// File contents have the wrong shape or structure.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// File contents are well-formed but hold out-of-range values.
class DataError : public Error {
public:
    using Error::Error;
};

/// A statistic could not be estimated (zero variance, undefined rescaling).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace spn
