#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcs {

using cpx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cpx I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (point on a branch cut, bad parameters).
struct DomainError : NumericsError {
    using NumericsError::NumericsError;
};

/// Evaluation requested exactly at one of the four corners.
struct SingularPointError : NumericsError {
    using NumericsError::NumericsError;
};

/// A path segment passes through a corner.
struct SingularPathError : NumericsError {
    using NumericsError::NumericsError;
};

struct InsufficientDataError : NumericsError {
    using NumericsError::NumericsError;
};

struct ConfigError : NumericsError {
    using NumericsError::NumericsError;
};

/// The running image of a path hit a rectangle corner exactly; the chart
/// switch is ambiguous there and the caller should perturb the path.
struct PerturbPathError : NumericsError {
    using NumericsError::NumericsError;
};

/// An ODE trajectory came closer than r0 to a corner.
struct NearSingularError : NumericsError {
    using NumericsError::NumericsError;
};

/// Root finder failed; carries the last iterate and its residual.
struct SolverError : NumericsError {
    SolverError(const std::string& what, double last_iterate, double residual)
        : NumericsError(what), last_iterate(last_iterate), residual(residual) {}
    double last_iterate;
    double residual;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Beltrami datum: vertical ellipses of ratio K on [-w,w]x[-h,h], circles
/// outside. K is stored as ln K so that K = 1e50 and beyond is representable.
struct DilatationParams {
    double lnK = 0.0;
    double half_width = 1.0;
    double half_height = 1.0;

    static DilatationParams square(double lnK) { return {lnK, 1.0, 1.0}; }

    /// Exponent lnK / (2 i pi) of the Schwarz-Christoffel integrand.
    cpx exponent() const { return cpx(0.0, -lnK / (2.0 * pi)); }
    /// tau = lnK / 2pi (the sign flips on corners 2 and 4).
    double tau() const { return lnK / (2.0 * pi); }
    cpx target() const { return {half_width, half_height}; }

    void validate() const;
};

enum class TailRule {
    /// Regular factor frozen at the cutoff point (the tracked branch value).
    FrozenAtCutoff,
    /// Regular factor frozen at the corner itself (series expansion of m_p).
    CornerExpansion,
};

struct SolverConfig {
    double d0 = 0.01;       // Simpson subinterval density: b - a = d0 * dist(a, corner)
    double r0 = 1e-8;       // below this distance to a corner the closed form is used
    double tol_secant = 1e-12;
    int max_secant_iters = 30;
    double eps0 = 1e-5;     // boundary trace step
    double map_step = 2e-3; // forward map ODE step
    long long max_trace_steps = 100'000'000;
    TailRule tail_rule = TailRule::CornerExpansion;

    void validate() const;
};

}  // namespace qcs
