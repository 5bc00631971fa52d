#pragma once

#include <stdexcept>
#include <string>

namespace hivdyn {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state vector contained non-finite entries.
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the admissible domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The endemic equilibrium was requested but does not exist (R <= 1).
class EndemicAbsentError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Scenario / configuration parsing failed.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File output failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (solver, eigensolver).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Step size collapsed below the representable minimum.
class StiffnessError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A simulated state left the positive orthant by more than the allowed slack.
class PositivityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Closed-form and numeric stability classifications disagree.
class VerdictMismatchError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace hivdyn
