#include "helm/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "helm/error.hpp"

namespace helm {
namespace {

using json = nlohmann::json;

int kind_rank(BusKind k) {
    switch (k) {
        case BusKind::PQ: return 0;
        case BusKind::PV: return 1;
        case BusKind::Slack: return 2;
    }
    return 3;
}

std::string bus_label(const Bus& b) { return "bus " + std::to_string(b.id); }

std::string branch_label(const Branch& br) {
    return "branch " + std::to_string(br.from) + "-" + std::to_string(br.to);
}

double number_field(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

// Fields the format reserves for shunts, taps and phase shifters. The engine
// models none of them, so their presence is an error rather than silently
// ignored.
const std::set<std::string> kReservedBusFields = {"g_shunt", "b_shunt", "gs", "bs"};
const std::set<std::string> kReservedBranchFields = {"b", "g", "tap", "shift", "b_charging"};

Bus parse_bus(const json& jb, std::size_t pos) {
    std::string where = "buses[" + std::to_string(pos) + "]";
    if (!jb.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& [key, _] : jb.items()) {
        if (kReservedBusFields.count(key))
            throw SchemaError(where + ": field '" + key + "' is reserved and not supported");
        static const std::set<std::string> known = {"id", "kind", "p", "q", "v", "q_max", "q_min"};
        if (!known.count(key)) throw SchemaError(where + ": unknown field '" + key + "'");
    }
    if (!jb.contains("id") || !jb["id"].is_number_integer())
        throw SchemaError(where + ": field 'id' must be an integer");
    if (!jb.contains("kind") || !jb["kind"].is_string())
        throw SchemaError(where + ": field 'kind' must be a string");

    Bus b;
    b.id = jb["id"].get<int>();
    where = "bus " + std::to_string(b.id);
    const auto kind = jb["kind"].get<std::string>();
    if (kind == "slack") {
        b.kind = BusKind::Slack;
    } else if (kind == "pq") {
        b.kind = BusKind::PQ;
    } else if (kind == "pv") {
        b.kind = BusKind::PV;
    } else {
        throw SchemaError(where + ": kind '" + kind + "' is not one of slack|pq|pv");
    }

    auto reject = [&](const char* key) {
        if (jb.contains(key))
            throw ValidationError(where + ": field '" + std::string(key) + "' not allowed for " +
                                  kind + " bus");
    };
    switch (b.kind) {
        case BusKind::Slack:
            reject("p");
            reject("q");
            reject("q_max");
            reject("q_min");
            break;
        case BusKind::PQ:
            reject("v");
            reject("q_max");
            reject("q_min");
            break;
        case BusKind::PV:
            reject("q");
            break;
    }
    if (jb.contains("p")) b.p = number_field(jb, "p", where);
    if (jb.contains("q")) b.q = number_field(jb, "q", where);
    if (jb.contains("v")) b.v = number_field(jb, "v", where);
    if (jb.contains("q_max")) b.q_max = number_field(jb, "q_max", where);
    if (jb.contains("q_min")) b.q_min = number_field(jb, "q_min", where);
    return b;
}

Branch parse_branch(const json& jb, std::size_t pos) {
    const std::string where = "branches[" + std::to_string(pos) + "]";
    if (!jb.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& [key, _] : jb.items()) {
        if (kReservedBranchFields.count(key))
            throw SchemaError(where + ": field '" + key + "' is reserved and not supported");
        static const std::set<std::string> known = {"from", "to", "r", "x"};
        if (!known.count(key)) throw SchemaError(where + ": unknown field '" + key + "'");
    }
    for (const char* key : {"from", "to"})
        if (!jb.contains(key) || !jb[key].is_number_integer())
            throw SchemaError(where + ": field '" + std::string(key) + "' must be an integer");
    for (const char* key : {"r", "x"})
        if (!jb.contains(key)) throw SchemaError(where + ": missing field '" + std::string(key) + "'");
    Branch br;
    br.from = jb["from"].get<int>();
    br.to = jb["to"].get<int>();
    br.z = {number_field(jb, "r", where), number_field(jb, "x", where)};
    return br;
}

}  // namespace

std::string_view to_string(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return "slack";
        case BusKind::PQ: return "pq";
        case BusKind::PV: return "pv";
    }
    return "?";
}

std::size_t Network::index_of(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return i;
    throw ValidationError("no bus with id " + std::to_string(id));
}

std::size_t Network::count(BusKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(buses.begin(), buses.end(), [kind](const Bus& b) { return b.kind == kind; }));
}

void validate(Network& net) {
    if (net.buses.empty()) throw ValidationError("network has no buses");

    std::set<int> ids;
    int slacks = 0;
    for (const auto& b : net.buses) {
        if (!ids.insert(b.id).second) throw ValidationError(bus_label(b) + ": duplicate bus id");
        if (b.kind == BusKind::Slack) ++slacks;
        if ((b.kind == BusKind::Slack || b.kind == BusKind::PV) && !(b.v > 0.0))
            throw ValidationError(bus_label(b) + ": voltage setpoint must be positive");
        if (b.kind == BusKind::PV && b.q != 0.0)
            throw ValidationError(bus_label(b) + ": PV bus cannot carry a reactive injection");
        if (b.q_min && b.q_max && *b.q_min > *b.q_max)
            throw ValidationError(bus_label(b) + ": q_min exceeds q_max");
        if (b.kind == BusKind::Slack && b.slack_angle != 0.0)
            throw ValidationError(bus_label(b) + ": slack angle must be zero");
    }
    if (slacks != 1)
        throw ValidationError("network must have exactly one slack bus, found " + std::to_string(slacks));

    std::set<std::pair<int, int>> pairs;
    for (const auto& br : net.branches) {
        if (br.from == br.to) throw ValidationError(branch_label(br) + ": endpoints coincide");
        for (int end : {br.from, br.to})
            if (!ids.count(end))
                throw ValidationError(branch_label(br) + ": endpoint " + std::to_string(end) +
                                      " does not exist");
        if (!(std::abs(br.z) > 0.0)) throw ValidationError(branch_label(br) + ": zero impedance");
        if (!pairs.insert(std::minmax(br.from, br.to)).second)
            throw ValidationError(branch_label(br) + ": parallel branch between the same buses");
    }

    // connectivity from the slack
    std::map<int, std::vector<int>> adj;
    for (const auto& br : net.branches) {
        adj[br.from].push_back(br.to);
        adj[br.to].push_back(br.from);
    }
    const int root = std::find_if(net.buses.begin(), net.buses.end(), [](const Bus& b) {
                         return b.kind == BusKind::Slack;
                     })->id;
    std::set<int> seen = {root};
    std::vector<int> stack = {root};
    while (!stack.empty()) {
        const int at = stack.back();
        stack.pop_back();
        for (int nb : adj[at])
            if (seen.insert(nb).second) stack.push_back(nb);
    }
    for (const auto& b : net.buses)
        if (!seen.count(b.id)) throw ValidationError(bus_label(b) + ": not connected to the slack bus");

    std::stable_sort(net.buses.begin(), net.buses.end(), [](const Bus& a, const Bus& b) {
        const int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
        return ra != rb ? ra < rb : a.id < b.id;
    });
}

Network parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("top level must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "name" && key != "buses" && key != "branches")
            throw SchemaError("unknown top-level field '" + key + "'");
    if (!doc.contains("buses") || !doc["buses"].is_array()) throw SchemaError("'buses' must be an array");
    if (!doc.contains("branches") || !doc["branches"].is_array())
        throw SchemaError("'branches' must be an array");

    Network net;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw SchemaError("'name' must be a string");
        net.name = doc["name"].get<std::string>();
    }
    for (std::size_t i = 0; i < doc["buses"].size(); ++i) net.buses.push_back(parse_bus(doc["buses"][i], i));
    for (std::size_t i = 0; i < doc["branches"].size(); ++i)
        net.branches.push_back(parse_branch(doc["branches"][i], i));
    validate(net);
    return net;
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open network file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

std::string to_json(const Network& net) {
    json doc;
    doc["name"] = net.name;
    doc["buses"] = json::array();
    for (const auto& b : net.buses) {
        json jb;
        jb["id"] = b.id;
        jb["kind"] = std::string(to_string(b.kind));
        if (b.kind != BusKind::Slack) jb["p"] = b.p;
        if (b.kind == BusKind::PQ) jb["q"] = b.q;
        if (b.kind != BusKind::PQ) jb["v"] = b.v;
        if (b.kind == BusKind::PV) {
            if (b.q_max) jb["q_max"] = *b.q_max;
            if (b.q_min) jb["q_min"] = *b.q_min;
        }
        doc["buses"].push_back(jb);
    }
    doc["branches"] = json::array();
    for (const auto& br : net.branches)
        doc["branches"].push_back({{"from", br.from}, {"to", br.to}, {"r", br.z.real()}, {"x", br.z.imag()}});
    return doc.dump(2);
}

Network builtin_network(std::string_view name) {
    auto make = [](int id, BusKind kind, double p, double q, double v) {
        Bus b;
        b.id = id;
        b.kind = kind;
        b.p = p;
        b.q = q;
        b.v = v;
        return b;
    };
    auto load = [&](int id, double p, double q) { return make(id, BusKind::PQ, -p, -q, 1.0); };
    auto gen = [&](int id, double p, double v) { return make(id, BusKind::PV, p, 0.0, v); };
    const Bus slack = make(0, BusKind::Slack, 0.0, 0.0, 1.0);

    Network net;
    if (name == "paper-6bus") {
        net.name = "paper-6bus";
        net.buses = {slack, load(1, 0.25, 0.10), load(2, 0.35, 0.10), load(3, 0.35, 0.20),
                     gen(4, 0.90, 1.10), gen(5, 1.00, 1.10)};
        net.branches = {{0, 1, {0.70, 0.40}}, {1, 2, {0.50, 0.50}}, {2, 5, {0.40, 0.50}},
                        {2, 4, {0.30, 0.50}}, {3, 5, {0.60, 0.80}}, {2, 3, {0.50, 0.80}}};
    } else if (name == "paper-7bus" || name == "paper-7bus-no12") {
        net.name = std::string(name);
        net.buses = {slack, load(1, 0.20, 0.10), load(2, 0.10, 0.05), load(3, 0.20, 0.10),
                     load(4, 0.20, 0.10), gen(5, 1.00, 1.10), gen(6, 1.00, 1.10)};
        net.branches = {{0, 1, {0.70, 0.40}}, {1, 3, {0.50, 0.50}}, {3, 6, {0.40, 0.50}},
                        {1, 2, {0.40, 0.60}}, {3, 5, {0.30, 0.50}}, {2, 5, {0.30, 0.60}},
                        {6, 4, {0.60, 0.80}}, {3, 4, {0.50, 0.80}}};
        if (name == "paper-7bus-no12")
            std::erase_if(net.branches, [](const Branch& b) { return b.from == 1 && b.to == 2; });
    } else {
        throw UnknownFixture("unknown fixture '" + std::string(name) + "'");
    }
    validate(net);
    return net;
}

std::vector<std::string> builtin_names() { return {"paper-6bus", "paper-7bus", "paper-7bus-no12"}; }

std::complex<double> AdmittanceMatrix::at(int from_id, int to_id) const {
    auto pos = [this](int id) {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw ValidationError("no bus with id " + std::to_string(id));
        return static_cast<Eigen::Index>(it - ids.begin());
    };
    return y(pos(from_id), pos(to_id));
}

AdmittanceMatrix ybus(const Network& net) {
    AdmittanceMatrix a;
    const auto n = static_cast<Eigen::Index>(net.size());
    a.ids.reserve(net.size());
    for (const auto& b : net.buses) a.ids.push_back(b.id);
    a.y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : net.branches) {
        const auto i = static_cast<Eigen::Index>(net.index_of(br.from));
        const auto k = static_cast<Eigen::Index>(net.index_of(br.to));
        const std::complex<double> y = 1.0 / br.z;
        a.y(i, i) += y;
        a.y(k, k) += y;
        a.y(i, k) -= y;
        a.y(k, i) -= y;
    }
    return a;
}

ParameterRef ParameterRef::parse(std::string_view text) {
    const auto dot = text.find('.');
    if (text.substr(0, 3) != "bus" || dot == std::string_view::npos)
        throw std::invalid_argument("parameter must look like bus<N>.p or bus<N>.qload: " + std::string(text));
    ParameterRef ref;
    const auto digits = text.substr(3, dot - 3);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref.bus_id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw std::invalid_argument("bad bus number in parameter: " + std::string(text));
    const auto field = text.substr(dot + 1);
    if (field == "p") {
        ref.field = Field::ActiveInjection;
    } else if (field == "qload") {
        ref.field = Field::ReactiveLoad;
    } else {
        throw std::invalid_argument("unknown parameter field '" + std::string(field) + "'");
    }
    ref.description = std::string(text);
    return ref;
}

std::string ParameterRef::str() const {
    return "bus" + std::to_string(bus_id) + (field == Field::ActiveInjection ? ".p" : ".qload");
}

double get_parameter(const Network& net, const ParameterRef& ref) {
    const Bus& b = net.bus(ref.bus_id);
    return ref.field == ParameterRef::Field::ActiveInjection ? b.p : -b.q;
}

Network with_parameter(const Network& net, const ParameterRef& ref, double value) {
    Network out = net;
    Bus& b = out.bus(ref.bus_id);
    if (b.kind == BusKind::Slack) throw ValidationError("parameter " + ref.str() + " refers to the slack bus");
    if (ref.field == ParameterRef::Field::ActiveInjection) {
        b.p = value;
    } else {
        if (b.kind != BusKind::PQ)
            throw ValidationError("parameter " + ref.str() + " needs a PQ bus");
        b.q = -value;
    }
    return out;
}

}  // namespace helm
