#pragma once

// Holomorphic embedding of the power-flow equations and the power-series
// recurrence for bus voltages.
//
// Embedding (z is the complex embedding parameter, W_i(z) V_i*(z) = 1):
//   slack:  V_s(z) = 1 + (V_s^sp - 1) z
//   PQ:     sum_k Y_ik V_k(z) = z conj(S_i) W_i(z)
//   PV:     sum_k Y_ik V_k(z) = (z P_i - j Q_i(z)) W_i(z)
//           V_i(z) V_i*(z) = 1 + (|V_i^sp|^2 - 1) z
// with S_i the complex injection. z = 0 is the zero-current germ (every
// voltage equal to 1) and z = 1 is the original problem. Each order n of the
// series solves one real linear system whose matrix does not depend on n;
// it is factored once per network.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "helm/mp.hpp"
#include "helm/netmodel.hpp"

namespace helm::series {

struct VoltageSeries;

class EmbeddedSystem {
public:
    const Network& network() const { return net_; }
    const AdmittanceMatrix& admittance() const { return y_; }
    unsigned digits() const { return digits_; }
    /// Real unknowns per order: two per PQ bus, three per PV bus.
    std::size_t unknowns() const { return dim_; }
    /// Offset of a bus's unknowns in the per-order vector (-1 for the slack).
    int offset(std::size_t bus_index) const { return offset_[bus_index]; }
    /// The order-independent real system matrix (row-major, unknowns^2).
    std::vector<double> matrix_as_double() const;
    /// log10 of the infinity-norm condition estimate of the system matrix.
    double log10_condition() const { return log10_cond_; }

private:
    friend EmbeddedSystem embed(const Network& net, unsigned digits);
    friend void extend(const EmbeddedSystem& sys, VoltageSeries& s, int target_order);
    void solve(std::vector<mp::Real>& rhs) const;

    Network net_;
    AdmittanceMatrix y_;
    unsigned digits_ = 0;
    std::size_t dim_ = 0;
    std::vector<int> offset_;
    std::vector<mp::Real> g_, b_;       // n x n admittance parts
    std::vector<mp::Real> matrix_;      // dim x dim, row-major
    std::vector<mp::Real> lu_;          // packed LU factors
    std::vector<std::size_t> perm_;
    double log10_cond_ = 0.0;
};

/// Builds and factors the embedded system at `digits` decimal digits.
/// Throws SingularEmbedding if the system matrix is numerically singular.
EmbeddedSystem embed(const Network& net, unsigned digits);

/// Number of system-matrix factorizations performed by this process.
std::size_t factorization_count();

struct VoltageSeries {
    int order = -1;
    unsigned digits = 0;
    /// Bus ids in the network's internal order (slack last).
    std::vector<int> ids;
    /// Voltage coefficients per bus, including the slack.
    std::vector<std::vector<mp::Complex>> v;
    /// Coefficients of W = 1 / V*(z*) per bus.
    std::vector<std::vector<mp::Complex>> w;
    /// Embedded reactive output Q(z) per PV bus; empty for other buses.
    std::vector<std::vector<mp::Real>> q;

    std::size_t index_of(int id) const;
    const std::vector<mp::Complex>& voltage(int id) const { return v[index_of(id)]; }
    const std::vector<mp::Real>& reactive(int id) const { return q[index_of(id)]; }
};

/// The order-0 series: every voltage 1, W = 1, Q = 0.
VoltageSeries germ(const EmbeddedSystem& sys);

/// Extends `s` in place through `target_order`. Throws PrecisionExhausted
/// when the rounding-error estimate of the recurrence exceeds half of the
/// working digits.
void extend(const EmbeddedSystem& sys, VoltageSeries& s, int target_order);

/// germ + extend.
VoltageSeries compute(const EmbeddedSystem& sys, int order);

/// Debug dump: bus,order,re,im at full precision.
void write_csv(std::ostream& out, const VoltageSeries& s);

}  // namespace helm::series
