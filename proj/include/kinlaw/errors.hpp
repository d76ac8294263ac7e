#pragma once

#include <stdexcept>
#include <string>

namespace kinlaw {

// Base type for all toolkit failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State left the invariant region / chart domain.
struct DomainError : Error { using Error::Error; };

// Eigenvalue gap collapsed below tolerance.
struct HyperbolicityError : Error { using Error::Error; };

// Iterative inverse failed to converge.
struct ConvergenceError : Error { using Error::Error; };

// Genuine-nonlinearity certificate failed (grid minimum <= 0).
struct NotGnlError : Error { using Error::Error; };

// Non-finite integrand in a quadrature.
struct QuadratureError : Error { using Error::Error; };

// Cut parameter incompatible with the grid.
struct GridError : Error { using Error::Error; };

// Strict kinetic-speed query outside the admissible strip.
struct StripError : Error { using Error::Error; };

// No positive strip width could be certified.
struct DegenerateStripError : Error { using Error::Error; };

// Sample grids do not match the family grids.
struct GridMismatchError : Error { using Error::Error; };

// Explicit step would violate the CFL / diffusion-number limits.
struct StabilityError : Error { using Error::Error; };

// Solution and family were built on different charts.
struct ChartMismatchError : Error { using Error::Error; };

// Curve seeding found a band with zero mass.
struct EmptyBandError : Error { using Error::Error; };

// Curve pair geometry invalid for the requested functional.
struct GeometryError : Error { using Error::Error; };

// Query point too close to the space-time window boundary.
struct BoundaryError : Error { using Error::Error; };

// Persisted table does not match its manifest.
struct FormatError : Error { using Error::Error; };

// Trace left the solution window before the requested end time.
struct WindowExitError : Error { using Error::Error; };

}  // namespace kinlaw
