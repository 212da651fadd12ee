#pragma once

// Polar Newton-Raphson power flow in double precision.
//
// Unknowns are the angles of every non-slack bus followed by the voltage
// magnitudes of the PQ buses, in the network's internal bus order. PV buses
// keep |V| fixed and contribute only their P equation.

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "helm/netmodel.hpp"

namespace helm::newton {

/// Voltage magnitude and angle (radians) per bus, internal order.
struct BusState {
    std::vector<double> vm;
    std::vector<double> va;

    std::vector<std::complex<double>> phasors() const;
};

enum class JacobianVariant {
    Standard,
    /// dP/d|V| and dQ/d|V| diagonals written as P_i/|V_i| + G_ii|V_i| and
    /// Q_i/|V_i| - B_ii|V_i| with the scheduled injections in place of the
    /// computed ones. The two forms agree only on solutions.
    AltDiagonal,
};

enum class NRStatus { Converged, Diverged, MaxIterations };

std::string_view to_string(NRStatus status);
std::string_view to_string(JacobianVariant variant);

struct TraceEntry {
    int iteration = 0;
    double mismatch_norm = 0.0;
    double min_vm = 0.0;
};

struct NRResult {
    NRStatus status = NRStatus::MaxIterations;
    BusState state;
    int iterations = 0;
    double final_mismatch = 0.0;
    std::vector<TraceEntry> trajectory;
    /// Reactive output of every bus at the final state.
    std::vector<double> q_out;
};

struct NROptions {
    JacobianVariant variant = JacobianVariant::Standard;
    double tol = 1e-8;
    int max_iter = 50;
    double divergence_limit = 1e8;
};

/// Computed injections P_i, Q_i at every bus.
std::pair<Eigen::VectorXd, Eigen::VectorXd> bus_powers(const AdmittanceMatrix& y, const BusState& s);

/// P_i - P_i^spec for non-slack buses, then Q_i - Q_i^spec for PQ buses.
Eigen::VectorXd mismatch(const Network& net, const AdmittanceMatrix& y, const BusState& s);

/// Jacobian of `mismatch` with respect to (angles, PQ magnitudes).
/// AltDiagonal throws DivisionByZeroVm at a zero PQ magnitude.
Eigen::MatrixXd jacobian(const Network& net, const AdmittanceMatrix& y, const BusState& s,
                         JacobianVariant variant = JacobianVariant::Standard);

/// Zero angles, PQ magnitudes at the slack magnitude, setpoints elsewhere.
BusState flat_start(const Network& net);

/// Full-step Newton iterations. Throws SingularJacobian when an iterate's
/// Jacobian cannot be factored.
NRResult solve_nr(const Network& net, const BusState& start, const NROptions& opt = {});
NRResult solve_nr(const Network& net, const NROptions& opt = {});

/// First-order predictor along the tangent of the solution curve: the null
/// vector of the Jacobian augmented with the parameter column, scaled to
/// move the parameter from its value in `net` to `target`.
BusState tangent_predict(const Network& net, const BusState& base, const ParameterRef& param, double target);

double min_singular_value(const Eigen::MatrixXd& j);

/// d|V|/dQ at `bus_id` (a PQ bus of `net`) for a unit reactive injection,
/// from the inverse Jacobian at a solution.
double vq_sensitivity(const Network& net, const BusState& solution, int bus_id);

/// iteration,mismatch_norm,min_vm
void write_trace_csv(std::ostream& out, const NRResult& r);

}  // namespace helm::newton
