#include "helm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "helm/error.hpp"
#include "helm/pade.hpp"
#include "helm/series.hpp"

namespace helm::cli {
namespace {

using nlohmann::json;

int bus_id_of(std::string_view token, std::string_view whole) {
    if (token.substr(0, 3) != "bus" || token.size() == 3)
        throw ValidationError("expected bus<N> in '" + std::string(whole) + "'");
    int id = 0;
    for (char c : token.substr(3)) {
        if (c < '0' || c > '9') throw ValidationError("expected bus<N> in '" + std::string(whole) + "'");
        id = id * 10 + (c - '0');
    }
    return id;
}

double number_of(std::string_view text, std::string_view whole) {
    try {
        std::size_t used = 0;
        const double x = std::stod(std::string(text), &used);
        if (used != text.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ValidationError("expected a number in '" + std::string(whole) + "'");
    }
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream ss;
    ss << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

bool wants(const RunConfig& cfg, std::string_view format, std::initializer_list<std::string_view> defaults) {
    if (cfg.formats.empty()) return std::find(defaults.begin(), defaults.end(), format) != defaults.end();
    return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& report) {
    auto f = open_output(cfg, name);
    f << report.dump(2) << '\n';
}

json config_json(const RunConfig& cfg, const Network* net) {
    const auto opt = solve_options(cfg);
    json c = {
        {"command", cfg.command},
        {"sets", cfg.sets},
        {"q_max", cfg.q_max},
        {"q_min", cfg.q_min},
        {"schedule", cfg.schedule},
        {"digits", opt.digits ? opt.digits : mp::digits_for_half_order(cfg.schedule.back())},
        {"delta_tol", cfg.delta_tol},
        {"max_half_order", cfg.max_half_order},
        {"out_dir", cfg.out_dir},
        {"formats", cfg.formats},
    };
    c["fixture"] = cfg.fixture ? json(*cfg.fixture) : json(nullptr);
    c["network_path"] = cfg.network_path ? json(*cfg.network_path) : json(nullptr);
    if (cfg.param) c["param"] = *cfg.param;
    if (cfg.command == "sweep") c["range"] = {{"from", cfg.from}, {"to", cfg.to}, {"step", cfg.step}};
    if (cfg.command == "snb") c["bracket"] = {{"lo", cfg.bracket_lo}, {"hi", cfg.bracket_hi}, {"tol", cfg.tol_param}};
    if (cfg.command == "poles") {
        c["order"] = cfg.order;
        c["buses"] = cfg.buses;
        c["series_path"] = cfg.series_path ? json(*cfg.series_path) : json(nullptr);
    }
    if (net) c["network"] = json::parse(to_json(*net));
    return c;
}

json report_header(const RunConfig& cfg, const Network* net) {
    return {{"command", cfg.command}, {"timestamp", timestamp()}, {"config", config_json(cfg, net)}};
}

json verdict_json(const stability::FeasibilityVerdict& v) {
    json j;
    j["status"] = std::string(to_string(v.status));
    json volts = json::array();
    if (v.solution) {
        auto sorted = *v.solution;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& b : sorted)
            volts.push_back({{"bus", b.id}, {"re", b.v.real()}, {"im", b.v.imag()}, {"mag", b.mag()}, {"deg", b.deg()}});
    }
    j["voltages"] = volts;
    j["margin_zc"] = v.margin ? json(*v.margin) : json(nullptr);
    const auto& ev = v.evidence;
    j["orders"] = ev.orders;
    json deltas = json::object();
    for (std::size_t i = 0; i < ev.per_bus.size() && i < ev.ids.size(); ++i) {
        json d = json::array();
        for (double x : ev.per_bus[i].deltas) d.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        deltas[std::to_string(ev.ids[i])] = d;
    }
    j["deltas"] = deltas;
    j["evidence"] = {{"digits", ev.digits},
                     {"slowest_bus", ev.slowest_bus},
                     {"branch_order", ev.branch_order},
                     {"all_converged", ev.all_converged},
                     {"escalations", ev.escalations},
                     {"note", ev.note}};
    return j;
}

int exit_code(stability::Feasibility f) {
    switch (f) {
        case stability::Feasibility::Feasible: return kFeasible;
        case stability::Feasibility::Infeasible: return kInfeasible;
        case stability::Feasibility::Indeterminate: return kIndeterminate;
    }
    return kIndeterminate;
}

void print_verdict(std::ostream& out, const stability::FeasibilityVerdict& v) {
    out << "status " << to_string(v.status) << '\n';
    if (v.margin) out << "branch_point " << std::setprecision(8) << *v.margin << '\n';
    if (v.solution) {
        auto sorted = *v.solution;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& b : sorted)
            out << "V" << b.id << ' ' << std::fixed << std::setprecision(6) << b.mag() << " @ " << std::setprecision(3)
                << b.deg() << " deg\n"
                << std::defaultfloat;
    }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Network net = resolve_network(cfg);
    const auto v = stability::solve_stable(net, solve_options(cfg));
    print_verdict(out, v);
    if (wants(cfg, "json", {"json"})) {
        json report = report_header(cfg, &net);
        report.update(verdict_json(v));
        write_json(cfg, "solve.json", report);
    }
    return exit_code(v.status);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.param) throw std::invalid_argument("sweep needs --param");
    const Network net = resolve_network(cfg);
    const auto ref = ParameterRef::parse(*cfg.param);
    const auto records = stability::sweep(net, ref, cfg.from, cfg.to, cfg.step, solve_options(cfg));
    for (const auto& r : records)
        out << ref.str() << '=' << r.value << ' ' << to_string(r.helm.status) << " match_flat=" << r.match_flat
            << " match_alt=" << r.match_alt << '\n';
    if (wants(cfg, "csv", {"csv"})) {
        auto f = open_output(cfg, "sweep.csv");
        stability::write_sweep_csv(f, net, records);
    }
    if (wants(cfg, "json", {})) {
        json report = report_header(cfg, &net);
        json rows = json::array();
        auto nr_json = [](const std::optional<newton::NRResult>& r, const std::string& err) {
            if (!r) return json{{"status", "Error"}, {"error", err}};
            return json{{"status", std::string(newton::to_string(r->status))},
                        {"iterations", r->iterations},
                        {"vm", r->state.vm},
                        {"va", r->state.va}};
        };
        for (const auto& r : records) {
            json row = verdict_json(r.helm);
            row["param"] = r.value;
            row["nr_flat"] = nr_json(r.nr_flat, r.nr_flat_error);
            row["nr_alt"] = nr_json(r.nr_alt, r.nr_alt_error);
            row["match_flat"] = r.match_flat;
            row["match_alt"] = r.match_alt;
            rows.push_back(row);
        }
        report["records"] = rows;
        write_json(cfg, "sweep.json", report);
    }
    return kFeasible;
}

json zero_pole_json(const pade::ZeroPoleSet& zp) {
    auto list = [](const std::vector<mp::Complex>& r, const std::vector<bool>& spurious) {
        json a = json::array();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const auto z = r[i].to_std();
            a.push_back({{"re", z.real()}, {"im", z.imag()}, {"spurious", static_cast<bool>(spurious[i])}});
        }
        return a;
    };
    return {{"zeros", list(zp.zeros, zp.zero_spurious)},
            {"poles", list(zp.poles, zp.pole_spurious)},
            {"branch_point", zp.branch_point ? json(*zp.branch_point) : json(nullptr)}};
}

int cmd_poles(const RunConfig& cfg, std::ostream& out) {
    if (cfg.order < 1) throw std::invalid_argument("--order must be positive");
    const unsigned digits = cfg.digits ? cfg.digits : mp::digits_for_half_order(cfg.order);
    mp::PrecisionScope scope(digits);

    struct Job {
        std::string label;
        std::vector<mp::Complex> coeffs;
    };
    std::vector<Job> jobs;
    std::optional<Network> net;
    if (cfg.series_path) {
        std::ifstream f(*cfg.series_path);
        if (!f) throw std::runtime_error("cannot read " + *cfg.series_path);
        std::stringstream ss;
        ss << f.rdbuf();
        jobs.push_back({"series", parse_series(ss.str())});
    } else {
        net = resolve_network(cfg);
        const auto sys = series::embed(*net, digits);
        auto s = series::compute(sys, 2 * cfg.order);
        for (std::size_t i = 0; i < s.ids.size(); ++i) {
            if (net->buses[i].kind == BusKind::Slack) continue;
            if (!cfg.buses.empty() && std::find(cfg.buses.begin(), cfg.buses.end(), s.ids[i]) == cfg.buses.end())
                continue;
            jobs.push_back({"bus" + std::to_string(s.ids[i]), std::move(s.v[i])});
        }
        std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.label < b.label; });
        if (jobs.empty()) throw ValidationError("no non-slack bus selected");
    }

    json report = report_header(cfg, net ? &*net : nullptr);
    std::optional<double> closest;
    for (const auto& job : jobs) {
        const auto pa = pade::pade(job.coeffs, cfg.order);
        const auto zp = pade::roots(pa);
        out << job.label << " branch_point ";
        if (zp.branch_point) {
            out << std::setprecision(8) << *zp.branch_point << '\n';
            closest = closest ? std::min(*closest, *zp.branch_point) : *zp.branch_point;
        } else {
            out << "none\n";
        }
        if (wants(cfg, "csv", {"csv"})) {
            auto f = open_output(cfg, "poles_" + job.label + ".csv");
            pade::write_zero_pole_csv(f, zp);
        }
        if (wants(cfg, "svg", {})) {
            auto f = open_output(cfg, "poles_" + job.label + ".svg");
            pade::write_zero_pole_svg(f, zp, job.label + " PA[" + std::to_string(cfg.order) + "/" +
                                                 std::to_string(cfg.order) + "]");
        }
        report["approximants"][job.label] = zero_pole_json(zp);
    }
    report["branch_point"] = closest ? json(*closest) : json(nullptr);
    out << "branch_point ";
    if (closest)
        out << std::setprecision(8) << *closest << '\n';
    else
        out << "none\n";
    if (wants(cfg, "json", {"json"})) write_json(cfg, "poles.json", report);
    return kFeasible;
}

int cmd_snb(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.param) throw std::invalid_argument("snb needs --param");
    const Network net = resolve_network(cfg);
    const auto ref = ParameterRef::parse(*cfg.param);
    const auto r = stability::find_snb(net, ref, cfg.bracket_lo, cfg.bracket_hi, cfg.tol_param, solve_options(cfg));
    if (r.indeterminate_count > 0)
        err << "warning: " << r.indeterminate_count
            << " midpoint(s) stayed Indeterminate after raising the order and were counted as infeasible\n";
    out << "snb " << std::setprecision(8) << r.value << " bracket [" << r.lo << ", " << r.hi << "]\n";
    if (wants(cfg, "json", {"json"})) {
        json report = report_header(cfg, &net);
        report["snb"] = r.value;
        report["lo"] = r.lo;
        report["hi"] = r.hi;
        report["indeterminate_count"] = r.indeterminate_count;
        json hist = json::array();
        for (const auto& h : r.history)
            hist.push_back({{"lo", h.lo},
                            {"hi", h.hi},
                            {"mid", h.mid},
                            {"status", std::string(to_string(h.status))},
                            {"escalated", h.escalated}});
        report["history"] = hist;
        write_json(cfg, "snb.json", report);
    }
    return kFeasible;
}

int cmd_limits(const RunConfig& cfg, std::ostream& out) {
    const Network net = resolve_network(cfg);
    const auto r = stability::enforce_q_limits(net, solve_options(cfg));
    out << "status " << to_string(r.status) << '\n';
    if (r.status == stability::LimitStatus::LimitInducedBifurcation) out << "reason " << to_string(r.reason) << '\n';
    for (std::size_t i = 0; i < r.q_off.size(); ++i)
        if (net.buses[i].kind == BusKind::PV)
            out << "Q" << net.buses[i].id << ' ' << std::fixed << std::setprecision(6) << r.q_off[i] << '\n'
                << std::defaultfloat;
    for (const auto& sb : r.switched) {
        out << "switched bus" << sb.id << ' ' << to_string(sb.side) << " q_off=" << sb.q_off << " limit=" << sb.limit;
        if (sb.v_on) out << " v_on=" << *sb.v_on << " v_setpoint=" << sb.v_setpoint;
        if (sb.sensitivity) out << " dV/dQ=" << *sb.sensitivity;
        out << '\n';
    }
    if (wants(cfg, "json", {"json"})) {
        json report = report_header(cfg, &net);
        report["status"] = std::string(to_string(r.status));
        report["reason"] = std::string(to_string(r.reason));
        report["off_limit"] = verdict_json(r.off_limit);
        report["on_limit"] = r.on_limit ? verdict_json(*r.on_limit) : json(nullptr);
        json q = json::object();
        for (std::size_t i = 0; i < r.q_off.size(); ++i) q[std::to_string(net.buses[i].id)] = r.q_off[i];
        report["q_off"] = q;
        json sw = json::array();
        for (const auto& sb : r.switched)
            sw.push_back({{"bus", sb.id},
                          {"side", std::string(to_string(sb.side))},
                          {"q_off", sb.q_off},
                          {"limit", sb.limit},
                          {"v_setpoint", sb.v_setpoint},
                          {"v_on", sb.v_on ? json(*sb.v_on) : json(nullptr)},
                          {"sensitivity", sb.sensitivity ? json(*sb.sensitivity) : json(nullptr)}});
        report["switched"] = sw;
        report["rounds"] = r.rounds;
        write_json(cfg, "limits.json", report);
    }
    switch (r.status) {
        case stability::LimitStatus::NoViolation:
        case stability::LimitStatus::SwitchedStable: return kFeasible;
        case stability::LimitStatus::OffLimitNotFeasible: return exit_code(r.off_limit.status);
        default: return kInfeasible;
    }
}

}  // namespace

void apply_set(Network& net, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw ValidationError("expected bus<N>.field=value, got '" + std::string(assignment) + "'");
    const int id = bus_id_of(assignment.substr(0, dot), assignment);
    const std::string_view field = assignment.substr(dot + 1, eq - dot - 1);
    const double value = number_of(assignment.substr(eq + 1), assignment);
    Bus& bus = net.bus(id);
    if (field == "p" || field == "qload") {
        net = with_parameter(net, ParameterRef::parse(assignment.substr(0, eq)), value);
    } else if (field == "q") {
        if (bus.kind != BusKind::PQ) throw ValidationError("bus" + std::to_string(id) + " is not a PQ bus");
        bus.q = value;
    } else if (field == "v") {
        if (bus.kind == BusKind::PQ) throw ValidationError("bus" + std::to_string(id) + " has no voltage setpoint");
        bus.v = value;
    } else {
        throw ValidationError("unknown field '" + std::string(field) + "' in '" + std::string(assignment) + "'");
    }
}

void apply_limit(Network& net, std::string_view assignment, bool upper) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ValidationError("expected bus<N>=value, got '" + std::string(assignment) + "'");
    const int id = bus_id_of(assignment.substr(0, eq), assignment);
    Bus& bus = net.bus(id);
    if (bus.kind != BusKind::PV) throw ValidationError("reactive limits apply to PV buses; bus" + std::to_string(id) + " is not one");
    (upper ? bus.q_max : bus.q_min) = number_of(assignment.substr(eq + 1), assignment);
}

Network resolve_network(const RunConfig& cfg) {
    if (cfg.fixture.has_value() == cfg.network_path.has_value())
        throw std::invalid_argument("give exactly one of --fixture and --network");
    Network net = cfg.fixture ? builtin_network(*cfg.fixture) : load_network(*cfg.network_path);
    for (const auto& s : cfg.sets) apply_set(net, s);
    for (const auto& s : cfg.q_max) apply_limit(net, s, true);
    for (const auto& s : cfg.q_min) apply_limit(net, s, false);
    validate(net);
    return net;
}

stability::SolveOptions solve_options(const RunConfig& cfg) {
    stability::SolveOptions o;
    o.schedule = cfg.schedule;
    o.tol = cfg.delta_tol;
    o.max_half_order = cfg.max_half_order;
    o.digits = cfg.digits;
    return o;
}

std::vector<mp::Complex> parse_series(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("series file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("coefficients") || !doc["coefficients"].is_array())
        throw SchemaError("series file needs a \"coefficients\" array");
    auto real = [](const json& x) -> mp::Real {
        if (x.is_string()) return mp::Real(x.get<std::string>());
        if (x.is_number()) return mp::Real(x.get<double>());
        throw SchemaError("series coefficient must be a number or a decimal string");
    };
    std::vector<mp::Complex> out;
    for (const auto& c : doc["coefficients"]) {
        if (c.is_array()) {
            if (c.size() != 2) throw SchemaError("complex coefficient must be [re, im]");
            out.emplace_back(real(c[0]), real(c[1]));
        } else {
            out.emplace_back(real(c));
        }
    }
    return out;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    RunConfig cfg;
    CLI::App app{"Power-flow feasibility by holomorphic embedding and Padé approximants", "helmflow"};
    app.require_subcommand(1, 1);

    std::string schedule_text;
    auto common = [&](CLI::App* sub) {
        auto* fx = sub->add_option("--fixture", cfg.fixture, "Built-in network (paper-6bus, paper-7bus, paper-7bus-no12)");
        auto* nw = sub->add_option("--network", cfg.network_path, "Network JSON file");
        fx->excludes(nw);
        sub->add_option("--set", cfg.sets, "Override, e.g. bus6.p=1.12, bus2.qload=0.05, bus5.v=1.1");
        sub->add_option("--qmax", cfg.q_max, "Reactive upper limit, e.g. bus5=0.75");
        sub->add_option("--qmin", cfg.q_min, "Reactive lower limit, e.g. bus5=-0.5");
        sub->add_option("--schedule", schedule_text, "Ascending Padé half-orders, comma separated (default 20,30,40,50,60)");
        sub->add_option("--precision", cfg.digits, "Working decimal digits (default from the top order)");
        sub->add_option("--delta-tol", cfg.delta_tol, "Convergence tolerance on PA(1) between the top two orders")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-order", cfg.max_half_order, "Largest half-order reachable by escalation")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out_dir, "Output directory for reports");
        sub->add_option("--format", cfg.formats, "Report formats: json, csv, svg")
            ->check(CLI::IsMember({"json", "csv", "svg"}));
    };

    auto* solve = app.add_subcommand("solve", "Feasibility verdict and stable solution");
    common(solve);

    auto* sweep = app.add_subcommand("sweep", "Embedding and Newton-Raphson over a parameter range");
    common(sweep);
    sweep->add_option("--param", cfg.param, "Parameter, e.g. bus6.p or bus2.qload")->required();
    sweep->add_option("--from", cfg.from, "First value")->required();
    sweep->add_option("--to", cfg.to, "Last value")->required();
    sweep->add_option("--step", cfg.step, "Step")->required();

    auto* poles = app.add_subcommand("poles", "Zeros, poles and branch point of the voltage approximants");
    common(poles);
    poles->add_option("--order", cfg.order, "Padé half-order");
    poles->add_option("--bus", cfg.buses, "Restrict to these bus ids");
    poles->add_option("--series", cfg.series_path, "Analyse a series from a JSON file instead of a network");

    auto* snb = app.add_subcommand("snb", "Saddle-node bifurcation by bisection on feasibility");
    common(snb);
    snb->add_option("--param", cfg.param, "Parameter, e.g. bus6.p")->required();
    std::vector<double> bracket;
    snb->add_option("--bracket", bracket, "Feasible and infeasible ends")->expected(2)->required();
    snb->add_option("--tol", cfg.tol_param, "Final bracket width")->check(CLI::PositiveNumber);

    auto* limits = app.add_subcommand("limits", "Reactive-limit enforcement and limit-induced bifurcation check");
    common(limits);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }

    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (!schedule_text.empty()) {
        cfg.schedule.clear();
        std::stringstream ss(schedule_text);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.schedule.push_back(static_cast<int>(number_of(item, schedule_text)));
    }
    if (cfg.schedule.empty() || !std::is_sorted(cfg.schedule.begin(), cfg.schedule.end()) ||
        std::adjacent_find(cfg.schedule.begin(), cfg.schedule.end()) != cfg.schedule.end() || cfg.schedule.front() < 1)
        throw std::invalid_argument("--schedule must be strictly ascending positive half-orders");
    if (bracket.size() == 2) {
        cfg.bracket_lo = bracket[0];
        cfg.bracket_hi = bracket[1];
    }
    if (cfg.command != "poles" || !cfg.series_path) {
        if (cfg.fixture.has_value() == cfg.network_path.has_value())
            throw std::invalid_argument("give exactly one of --fixture and --network");
    }
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "solve") return cmd_solve(cfg, out);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out);
        if (cfg.command == "poles") return cmd_poles(cfg, out);
        if (cfg.command == "snb") return cmd_snb(cfg, out, err);
        if (cfg.command == "limits") return cmd_limits(cfg, out);
        err << "unknown command '" << cfg.command << "'\n";
        return kUsage;
    } catch (const PrecisionExhausted& e) {
        err << e.kind() << ": " << e.what() << '\n';
        return kIndeterminate;
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_args(argc, argv, out);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << "\nrun with --help for usage\n";
        return kUsage;
    }
    if (!cfg) return kFeasible;
    return run(*cfg, out, err);
}

}  // namespace helm::cli
