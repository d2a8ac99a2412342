#pragma once

#include <stdexcept>
#include <string>

namespace gpx {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite samples, grid mismatch, malformed configuration.
struct InvalidInputError : Error { using Error::Error; };

/// Parameter outside its mathematical domain (tau < 2, p outside (1,inf), ...).
struct DomainError : Error { using Error::Error; };

/// Profile does not reach its asymptote at the grid boundary.
struct TruncationError : Error { using Error::Error; };

/// A |r| < 1/2 region reaches the domain boundary; no dip interval exists.
struct UnboundedDipError : Error { using Error::Error; };

/// Smallness condition violated; the requested scheme does not apply.
struct RegimeError : Error { using Error::Error; };

/// Spectral parameter on or too close to the cut (-inf,-1] u [1,inf).
struct BranchError : Error { using Error::Error; };

/// Step refinement of an ODE solve failed to converge.
struct IntegratorError : Error { using Error::Error; };

/// Denominator |r|^2 - zeta^2 degenerates.
struct SingularCoefficientError : Error { using Error::Error; };

/// NaN detected during time evolution.
struct BlowUpError : Error { using Error::Error; };

/// Quadrature could not reach the requested tolerance.
struct ToleranceError : Error { using Error::Error; };

} // namespace gpx
