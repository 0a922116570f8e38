#pragma once

#include <stdexcept>
#include <string>

namespace qtp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its admissible range (eps <= 0, p <= 1, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Mesh construction or geometric query failed (degenerate element, ball with no nodes).
class MeshError : public Error {
public:
    using Error::Error;
};

/// Problem data rejected by validate_spec or by the JSON reader.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File could not be written or read.
class IoError : public Error {
public:
    using Error::Error;
};

/// Linear or nonlinear iteration did not reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double final_residual)
        : Error(what), final_residual_(final_residual) {}

    double final_residual() const noexcept { return final_residual_; }

private:
    double final_residual_;
};

}  // namespace qtp
