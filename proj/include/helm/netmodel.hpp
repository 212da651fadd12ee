#pragma once

// Per-unit network model: buses, branches, the bus admittance matrix and
// the built-in fixture networks.

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace helm {

enum class BusKind { Slack, PQ, PV };

std::string_view to_string(BusKind kind);

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    /// Active injection, generation positive, load negative.
    double p = 0.0;
    /// Reactive injection (PQ only), generation positive.
    double q = 0.0;
    /// Voltage magnitude setpoint (Slack and PV).
    double v = 1.0;
    std::optional<double> q_max;
    std::optional<double> q_min;
    /// Fixed at zero for the slack bus.
    double slack_angle = 0.0;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    int from = 0;
    int to = 0;
    /// Series impedance r + jx, per unit.
    std::complex<double> z;

    bool operator==(const Branch&) const = default;
};

/// A validated network. Buses are kept in the internal order used by every
/// solver: PQ buses, then PV buses, then the slack, each group sorted by id.
struct Network {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    std::size_t size() const { return buses.size(); }
    /// Position of bus `id` in `buses`; throws ValidationError if absent.
    std::size_t index_of(int id) const;
    const Bus& bus(int id) const { return buses[index_of(id)]; }
    Bus& bus(int id) { return buses[index_of(id)]; }
    const Bus& slack() const { return buses.back(); }
    std::size_t count(BusKind kind) const;

    bool operator==(const Network&) const = default;
};

/// Checks every invariant and puts the buses in internal order.
/// Throws ValidationError naming the offending element.
void validate(Network& net);

/// Parses and validates the JSON network format. Throws SchemaError for
/// malformed or unsupported fields, ValidationError for invariant breaches.
Network parse_network(std::string_view text);
Network load_network(const std::string& path);
std::string to_json(const Network& net);

/// "paper-6bus", "paper-7bus" or "paper-7bus-no12"; UnknownFixture otherwise.
Network builtin_network(std::string_view name);
std::vector<std::string> builtin_names();

struct AdmittanceMatrix {
    /// Bus id of each row/column, in the network's internal order.
    std::vector<int> ids;
    Eigen::MatrixXcd y;

    Eigen::MatrixXd g() const { return y.real(); }
    Eigen::MatrixXd b() const { return y.imag(); }
    std::complex<double> at(int from_id, int to_id) const;
};

AdmittanceMatrix ybus(const Network& net);

/// A scalar network parameter that can be freed for sweeps and bisection.
struct ParameterRef {
    enum class Field { ActiveInjection, ReactiveLoad };

    int bus_id = 0;
    Field field = Field::ActiveInjection;
    std::string description;

    /// Parses "bus<N>.p" or "bus<N>.qload".
    static ParameterRef parse(std::string_view text);
    std::string str() const;
};

double get_parameter(const Network& net, const ParameterRef& ref);
/// Copy of `net` with the parameter set. ReactiveLoad is the consumed
/// reactive power, i.e. the negated reactive injection of a PQ bus.
Network with_parameter(const Network& net, const ParameterRef& ref, double value);

}  // namespace helm
