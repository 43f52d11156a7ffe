#pragma once

#include <stdexcept>
#include <string>

namespace cqi {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the documented domain (negative rates, odd node count, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A closed-form denominator or linear system is singular at the requested point.
class SingularInput : public Error {
public:
    using Error::Error;
};

/// Numerical solver could not produce an answer meeting its tolerance.
class SolverError : public Error {
public:
    using Error::Error;
};

/// The physical model's assumptions are violated (weak drive, click probability > 1, ...).
class ModelValidityError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cqi
