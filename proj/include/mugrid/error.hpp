#pragma once

#include <stdexcept>
#include <string>

namespace mugrid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent network data (duplicate lines, bad indices, ...).
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Invalid interface or tuning parameters (nonpositive inertia/damping, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Numerical failure of an iterative or decomposition routine.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// File or JSON schema problems.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace mugrid
