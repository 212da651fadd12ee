#pragma once

// Diagonal Padé approximants in working precision, their zeros and poles,
// and the positive-real-axis branch-point estimate.

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "helm/mp.hpp"
#include "helm/series.hpp"

namespace helm::pade {

struct PadeApproximant {
    int m = 0;
    unsigned digits = 0;
    /// Numerator coefficients, degree <= m.
    std::vector<mp::Complex> num;
    /// Denominator coefficients, den[0] == 1.
    std::vector<mp::Complex> den;
    /// Radius used to normalize the series before the Toeplitz solve.
    double scale = 1.0;
    /// Denominator degree actually used. Smaller than m when the series is
    /// exactly rational of lower degree (a square block of the Padé table).
    int den_degree = 0;
};

/// PA[m/m] of the series `coeffs` (needs at least 2m+1 terms).
/// Throws DegenerateTable when the Toeplitz system is singular and no
/// lower-degree block solution reproduces the series.
PadeApproximant pade(std::span<const mp::Complex> coeffs, int m);

/// num(z)/den(z) by Horner's rule. Throws PoleAtPoint when den(z) vanishes
/// to working precision.
mp::Complex eval(const PadeApproximant& pa, const mp::Complex& z);

struct ZeroPoleSet {
    std::vector<mp::Complex> zeros;
    std::vector<mp::Complex> poles;
    /// Froissart doublet markers, parallel to zeros / poles.
    std::vector<bool> zero_spurious;
    std::vector<bool> pole_spurious;
    std::optional<double> branch_point;
};

/// Zeros and poles with doublets flagged (zero-pole distance below
/// 10^(-digits/4)); branch_point is filled in as well.
ZeroPoleSet roots(const PadeApproximant& pa);

/// Closest branch point on the positive real axis, estimated from the
/// cluster of non-spurious poles within kClusterAngle of the axis. Needs at least two such poles.
/// When the lowest three follow an edge law p_k ~ c + A (k + d)^2, with
/// d = 0 (square-root zero) or d = -1/2 (inverse square root) chosen from
/// their spacing, the endpoint c is extrapolated from the first two;
/// otherwise it is the lowest pole.
std::optional<double> branch_point(const ZeroPoleSet& zp);

/// The same estimate from the denominator roots alone, with the doublet
/// test applied only to the poles near the positive axis.
std::optional<double> branch_point_of(const PadeApproximant& pa);

/// Poles within this angle (radians) of the positive axis count towards
/// the branch-point cluster.
inline constexpr double kClusterAngle = 0.02;

/// True when |Im z| < 1e-6 (1 + |z|) and Re z > 0.
bool on_positive_axis(std::complex<double> z);

struct ConvergenceVerdict {
    enum class Status { Converged, Diverged };

    Status status = Status::Diverged;
    /// Value at z = 1 of the largest order, when converged.
    std::optional<std::complex<double>> value;
    std::vector<int> orders_used;
    /// |PA_k(1) - PA_{k-1}(1)| for consecutive orders.
    std::vector<double> deltas;
    /// PA(1) for every order.
    std::vector<std::complex<double>> values;
    /// Order from which every later delta stays below tol.
    std::optional<int> converged_from;
};

/// Evaluates PA[m/m](1) for every m in `orders` (ascending) and declares
/// convergence when the last successive delta is below `tol`.
ConvergenceVerdict assess(std::span<const mp::Complex> coeffs, std::span<const int> orders, double tol);

/// Per-bus assessment of a voltage series, in the series' bus order.
std::vector<ConvergenceVerdict> assess(const series::VoltageSeries& s, std::span<const int> orders, double tol);

/// kind,re,im,spurious
void write_zero_pole_csv(std::ostream& out, const ZeroPoleSet& zp);
/// Scatter of zeros (circles) and poles (crosses) with z = 1 marked.
void write_zero_pole_svg(std::ostream& out, const ZeroPoleSet& zp, const std::string& title);

}  // namespace helm::pade
