#pragma once

// Feasibility verdicts from the embedding, parameter sweeps, saddle-node
// bisection and reactive-limit handling.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helm/netmodel.hpp"
#include "helm/newton.hpp"
#include "helm/pade.hpp"

namespace helm::stability {

struct SolveOptions {
    /// Ascending Padé half-orders; the last two decide convergence.
    std::vector<int> schedule{20, 30, 40, 50, 60};
    double tol = 5e-5;
    /// Largest half-order reachable by escalation when the delta test and
    /// the branch point disagree.
    int max_half_order = 160;
    /// Working digits; 0 selects the precision policy for the top order.
    unsigned digits = 0;
};

enum class Feasibility { Feasible, Infeasible, Indeterminate };
std::string_view to_string(Feasibility f);

struct BusVoltage {
    int id = 0;
    std::complex<double> v;
    double mag() const { return std::abs(v); }
    double deg() const;
};

/// Largest approximant order used for the branch-point estimate. The
/// estimate is already stable to about 1e-4 at this order, and root finding
/// beyond it dominates the cost of a verdict.
inline constexpr int kBranchOrder = 120;

struct Evidence {
    /// Schedule that produced the verdict (after any escalation).
    std::vector<int> orders;
    unsigned digits = 0;
    /// Per-bus convergence record, network internal order (slack included).
    std::vector<int> ids;
    std::vector<pade::ConvergenceVerdict> per_bus;
    /// Bus whose final delta was largest; its top approximant supplies z_c.
    int slowest_bus = 0;
    std::optional<double> branch_point;
    int branch_order = 0;
    bool all_converged = false;
    int escalations = 0;
    std::string note;
};

struct FeasibilityVerdict {
    Feasibility status = Feasibility::Indeterminate;
    /// Values at z = 1 of the top approximant, internal order.
    std::optional<std::vector<BusVoltage>> solution;
    std::optional<double> margin;
    Evidence evidence;

    const BusVoltage& voltage(int id) const;
};

FeasibilityVerdict solve_stable(const Network& net, const SolveOptions& opt = {});

/// The verdict's voltages as a Newton state (internal order).
newton::BusState to_state(const FeasibilityVerdict& v);

/// Newton polish of a feasible verdict; returns the PA state when Newton
/// does not converge to a nearby point.
newton::BusState polished_state(const Network& net, const FeasibilityVerdict& v);

struct SweepRecord {
    double value = 0.0;
    FeasibilityVerdict helm;
    std::optional<newton::NRResult> nr_flat;
    std::optional<newton::NRResult> nr_alt;
    std::string nr_flat_error;
    std::string nr_alt_error;
    bool match_flat = false;
    bool match_alt = false;
};

/// Infinity-norm tolerance on complex bus voltages for the match flags.
inline constexpr double kMatchTolerance = 1e-4;

bool profiles_match(const FeasibilityVerdict& helm, const newton::NRResult& nr);

/// Evaluates from, from + step, ... up to `to` (inclusive within step/2),
/// concurrently; records come back ordered by parameter value.
std::vector<SweepRecord> sweep(const Network& net, const ParameterRef& param, double from, double to, double step,
                               const SolveOptions& opt = {});

/// param,helm_status,helm_V1..Vn,zc,nr_flat_status,nr_flat_V1..Vn,
/// nr_alt_status,nr_alt_V1..Vn,match_flat,match_alt (magnitudes by bus id).
void write_sweep_csv(std::ostream& out, const Network& net, const std::vector<SweepRecord>& records);

struct BracketStep {
    double lo = 0.0;
    double hi = 0.0;
    double mid = 0.0;
    Feasibility status = Feasibility::Indeterminate;
    bool escalated = false;
};

struct SnbResult {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<BracketStep> history;
    /// Midpoints that stayed Indeterminate after escalation and were
    /// counted as infeasible.
    int indeterminate_count = 0;
};

/// Bisection on feasibility. Throws BadBracket unless `lo` is Feasible and
/// `hi` is Infeasible.
SnbResult find_snb(const Network& net, const ParameterRef& param, double lo, double hi, double tol_param,
                   const SolveOptions& opt = {});

/// Smallest singular value of the Standard Jacobian at the stable solution
/// for the given parameter value.
double snb_singularity_check(const Network& net, const ParameterRef& param, double value, const SolveOptions& opt = {});

enum class LimitSide { QMax, QMin };
std::string_view to_string(LimitSide s);

enum class LimitStatus {
    NoViolation,
    SwitchedStable,
    LimitInducedBifurcation,
    /// The on-limit network has no stable solution; reported as the reason
    /// of a limit-induced bifurcation.
    InfeasibleOnLimit,
    /// The unconstrained problem itself has no stable solution, so there
    /// is no reactive output to compare with the limits.
    OffLimitNotFeasible,
};
std::string_view to_string(LimitStatus s);

struct SwitchedBus {
    int id = 0;
    LimitSide side = LimitSide::QMax;
    double q_off = 0.0;
    double limit = 0.0;
    double v_setpoint = 0.0;
    std::optional<double> v_on;
    std::optional<double> sensitivity;
};

struct LimitOutcome {
    LimitStatus status = LimitStatus::NoViolation;
    /// For LimitInducedBifurcation: InfeasibleOnLimit or the unstable
    /// on-limit point (LimitInducedBifurcation).
    LimitStatus reason = LimitStatus::NoViolation;
    FeasibilityVerdict off_limit;
    std::optional<FeasibilityVerdict> on_limit;
    std::optional<Network> on_limit_network;
    /// Reactive output of every bus off-limit, internal order.
    std::vector<double> q_off;
    std::vector<SwitchedBus> switched;
    int rounds = 0;
};

/// Strict exceedance margin for a limit violation.
inline constexpr double kLimitTolerance = 1e-6;

LimitOutcome enforce_q_limits(const Network& net, const SolveOptions& opt = {});

/// The classification rule alone: infeasible on-limit, or an on-limit
/// voltage above its setpoint with positive d|V|/dQ, is a limit-induced
/// bifurcation; anything else is a stable switched point.
LimitStatus classify_limit_rule(bool on_limit_feasible, double v_switched, double v_setpoint, double sensitivity);

/// Classifies a switched case; fills `bus.v_on` and `bus.sensitivity`.
LimitStatus classify_limit(const FeasibilityVerdict& off_limit, const Network& on_net,
                           const FeasibilityVerdict& on_limit, SwitchedBus& bus);

}  // namespace helm::stability
