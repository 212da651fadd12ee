#include "helm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "helm/error.hpp"
#include "helm/series.hpp"

namespace helm::stability {
namespace {

// Moves the schedule up so its top order becomes 1.5 times larger
// (capped) while the spacing between orders is kept; the convergence test
// compares the top two orders, so their gap must not widen.
std::vector<int> escalated(const std::vector<int>& schedule, int cap) {
    const int top = schedule.back();
    const int shift = std::max(0, std::min(cap, static_cast<int>(std::ceil(1.5 * top))) - top);
    std::vector<int> out;
    for (int m : schedule) out.push_back(m + shift);
    return out;
}

double final_delta(const pade::ConvergenceVerdict& c) {
    if (c.deltas.empty()) return 0.0;
    const double d = c.deltas.back();
    return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
}

FeasibilityVerdict attempt(const Network& net, const std::vector<int>& schedule, double tol, unsigned digits) {
    FeasibilityVerdict out;
    Evidence& ev = out.evidence;
    ev.orders = schedule;
    const int top = schedule.back();
    ev.digits = digits ? digits : mp::digits_for_half_order(top);
    mp::PrecisionScope scope(ev.digits);

    const auto sys = series::embed(net, ev.digits);
    const auto s = series::compute(sys, 2 * top);
    ev.ids = s.ids;
    ev.per_bus = pade::assess(s, schedule, tol);

    ev.all_converged = true;
    double worst = -1.0;
    std::size_t slowest = 0;
    for (std::size_t i = 0; i < ev.per_bus.size(); ++i) {
        if (net.buses[i].kind == BusKind::Slack) continue;
        const auto& c = ev.per_bus[i];
        if (c.status != pade::ConvergenceVerdict::Status::Converged) ev.all_converged = false;
        const double d = final_delta(c);
        if (d > worst) {
            worst = d;
            slowest = i;
        }
    }
    ev.slowest_bus = s.ids[slowest];
    ev.branch_order = std::min(top, kBranchOrder);
    ev.branch_point = pade::branch_point_of(pade::pade(s.v[slowest], ev.branch_order));
    out.margin = ev.branch_point;

    const auto& zc = ev.branch_point;
    if (ev.all_converged && (!zc || *zc > 1.0)) {
        out.status = Feasibility::Feasible;
        std::vector<BusVoltage> sol;
        for (std::size_t i = 0; i < s.ids.size(); ++i) {
            const auto& vals = ev.per_bus[i].values;
            sol.push_back({s.ids[i], vals.empty() ? std::complex<double>(1.0) : vals.back()});
        }
        out.solution = std::move(sol);
    } else if (!ev.all_converged && zc && *zc <= 1.0) {
        out.status = Feasibility::Infeasible;
    } else {
        out.status = Feasibility::Indeterminate;
        ev.note = ev.all_converged ? "approximants converge but the branch point lies at or inside z = 1"
                                   : "approximants do not converge but no branch point lies at or inside z = 1";
    }
    return out;
}

}  // namespace

std::string_view to_string(Feasibility f) {
    switch (f) {
        case Feasibility::Feasible: return "Feasible";
        case Feasibility::Infeasible: return "Infeasible";
        case Feasibility::Indeterminate: return "Indeterminate";
    }
    return "?";
}

double BusVoltage::deg() const { return std::arg(v) * 180.0 / std::numbers::pi; }

const BusVoltage& FeasibilityVerdict::voltage(int id) const {
    if (solution)
        for (const auto& b : *solution)
            if (b.id == id) return b;
    throw ValidationError("verdict has no voltage for bus " + std::to_string(id));
}

FeasibilityVerdict solve_stable(const Network& net, const SolveOptions& opt) {
    if (opt.schedule.empty() || !std::is_sorted(opt.schedule.begin(), opt.schedule.end()) ||
        std::adjacent_find(opt.schedule.begin(), opt.schedule.end()) != opt.schedule.end() ||
        opt.schedule.front() < 1)
        throw ValidationError("Padé schedule must be strictly ascending positive half-orders");
    std::vector<int> schedule = opt.schedule;
    int escalations = 0;
    for (;;) {
        FeasibilityVerdict v;
        try {
            v = attempt(net, schedule, opt.tol, opt.digits);
        } catch (const PrecisionExhausted& e) {
            v.status = Feasibility::Indeterminate;
            v.evidence.orders = schedule;
            v.evidence.note = e.what();
            v.evidence.escalations = escalations;
            return v;
        } catch (const DegenerateTable& e) {
            v.status = Feasibility::Indeterminate;
            v.evidence.orders = schedule;
            v.evidence.note = e.what();
        } catch (const RootFindingStalled& e) {
            v.status = Feasibility::Indeterminate;
            v.evidence.orders = schedule;
            v.evidence.note = e.what();
        }
        v.evidence.escalations = escalations;
        if (v.status != Feasibility::Indeterminate || schedule.back() >= opt.max_half_order) return v;
        schedule = escalated(schedule, opt.max_half_order);
        ++escalations;
    }
}

newton::BusState to_state(const FeasibilityVerdict& v) {
    if (!v.solution) throw ValidationError("verdict carries no solution");
    newton::BusState s;
    for (const auto& b : *v.solution) {
        s.vm.push_back(std::abs(b.v));
        s.va.push_back(std::arg(b.v));
    }
    return s;
}

newton::BusState polished_state(const Network& net, const FeasibilityVerdict& v) {
    const auto start = to_state(v);
    try {
        const auto r = newton::solve_nr(net, start, {.tol = 1e-12, .max_iter = 20});
        if (r.status != newton::NRStatus::Converged) return start;
        const auto a = start.phasors(), b = r.state.phasors();
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-3) return start;
        return r.state;
    } catch (const SingularJacobian&) {
        return start;
    }
}

bool profiles_match(const FeasibilityVerdict& helm, const newton::NRResult& nr) {
    if (helm.status != Feasibility::Feasible || nr.status != newton::NRStatus::Converged) return false;
    const auto& sol = *helm.solution;
    const auto v = nr.state.phasors();
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) worst = std::max(worst, std::abs(sol[i].v - v[i]));
    return worst < kMatchTolerance;
}

std::vector<SweepRecord> sweep(const Network& net, const ParameterRef& param, double from, double to, double step,
                               const SolveOptions& opt) {
    if (!(step > 0.0) || !(from < to)) throw ValidationError("sweep needs from < to and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 0.5)) + 1;

    auto run = [&](double value) {
        SweepRecord r;
        r.value = value;
        const Network point = with_parameter(net, param, value);
        try {
            r.helm = solve_stable(point, opt);
        } catch (const Error& e) {
            r.helm.status = Feasibility::Indeterminate;
            r.helm.evidence.note = e.what();
        }
        auto nr = [&](newton::JacobianVariant variant, std::optional<newton::NRResult>& slot, std::string& err) {
            try {
                slot = newton::solve_nr(point, {.variant = variant});
            } catch (const Error& e) {
                err = std::string(e.kind()) + ": " + e.what();
            }
        };
        nr(newton::JacobianVariant::Standard, r.nr_flat, r.nr_flat_error);
        nr(newton::JacobianVariant::AltDiagonal, r.nr_alt, r.nr_alt_error);
        r.match_flat = r.nr_flat && profiles_match(r.helm, *r.nr_flat);
        r.match_alt = r.nr_alt && profiles_match(r.helm, *r.nr_alt);
        return r;
    };

    std::vector<SweepRecord> out(count);
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < count; base += workers) {
        std::vector<std::future<SweepRecord>> batch;
        for (std::size_t i = base; i < std::min(count, base + workers); ++i)
            batch.push_back(std::async(std::launch::async, run, from + static_cast<double>(i) * step));
        for (std::size_t i = 0; i < batch.size(); ++i) out[base + i] = batch[i].get();
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const Network& net, const std::vector<SweepRecord>& records) {
    std::vector<int> ids;
    for (const auto& b : net.buses) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    auto header = [&](const char* prefix) {
        for (int id : ids) out << ',' << prefix << "_V" << id;
    };
    out << "param,helm_status";
    header("helm");
    out << ",zc,nr_flat_status";
    header("nr_flat");
    out << ",nr_alt_status";
    header("nr_alt");
    out << ",match_flat,match_alt\n";
    out.precision(10);

    auto nr_cols = [&](const std::optional<newton::NRResult>& r, const std::string& err) {
        out << ',' << (r ? std::string(newton::to_string(r->status)) : (err.empty() ? "Error" : "SingularJacobian"));
        for (int id : ids) {
            out << ',';
            if (r && r->status == newton::NRStatus::Converged) out << std::fabs(r->state.vm[net.index_of(id)]);
        }
    };
    for (const auto& r : records) {
        out << r.value << ',' << to_string(r.helm.status);
        for (int id : ids) {
            out << ',';
            if (r.helm.solution) out << r.helm.voltage(id).mag();
        }
        out << ',';
        if (r.helm.margin) out << *r.helm.margin;
        nr_cols(r.nr_flat, r.nr_flat_error);
        nr_cols(r.nr_alt, r.nr_alt_error);
        out << ',' << (r.match_flat ? "true" : "false") << ',' << (r.match_alt ? "true" : "false") << '\n';
    }
}

SnbResult find_snb(const Network& net, const ParameterRef& param, double lo, double hi, double tol_param,
                   const SolveOptions& opt) {
    if (!(lo < hi) || !(tol_param > 0.0)) throw BadBracket("bracket must satisfy lo < hi with a positive tolerance");
    SnbResult res;
    auto classify = [&](double x) {
        BracketStep step;
        step.mid = x;
        const Network point = with_parameter(net, param, x);
        step.status = solve_stable(point, opt).status;
        if (step.status == Feasibility::Indeterminate) {
            // one further raise beyond the escalation cap, straight to the
            // raised order rather than climbing there again
            SolveOptions up = opt;
            up.max_half_order = static_cast<int>(std::ceil(1.5 * std::max(opt.max_half_order, opt.schedule.back())));
            up.schedule = opt.schedule;
            for (int& m : up.schedule) m += up.max_half_order - opt.schedule.back();
            step.status = solve_stable(point, up).status;
            step.escalated = true;
        }
        return step;
    };

    const auto at_lo = classify(lo);
    if (at_lo.status != Feasibility::Feasible)
        throw BadBracket("lower end " + std::to_string(lo) + " is " + std::string(to_string(at_lo.status)) +
                         ", expected Feasible");
    const auto at_hi = classify(hi);
    if (at_hi.status != Feasibility::Infeasible)
        throw BadBracket("upper end " + std::to_string(hi) + " is " + std::string(to_string(at_hi.status)) +
                         ", expected Infeasible");

    while (hi - lo > tol_param) {
        BracketStep step = classify(0.5 * (lo + hi));
        step.lo = lo;
        step.hi = hi;
        if (step.status == Feasibility::Feasible) {
            lo = step.mid;
        } else {
            if (step.status == Feasibility::Indeterminate) ++res.indeterminate_count;
            hi = step.mid;
        }
        res.history.push_back(step);
    }
    res.lo = lo;
    res.hi = hi;
    res.value = 0.5 * (lo + hi);
    return res;
}

double snb_singularity_check(const Network& net, const ParameterRef& param, double value, const SolveOptions& opt) {
    const Network point = with_parameter(net, param, value);
    const auto v = solve_stable(point, opt);
    if (v.status != Feasibility::Feasible)
        throw ValidationError(param.str() + " = " + std::to_string(value) + " has no certified stable solution");
    const auto s = polished_state(point, v);
    return newton::min_singular_value(newton::jacobian(point, ybus(point), s));
}

std::string_view to_string(LimitSide s) { return s == LimitSide::QMax ? "q_max" : "q_min"; }

std::string_view to_string(LimitStatus s) {
    switch (s) {
        case LimitStatus::NoViolation: return "NoViolation";
        case LimitStatus::SwitchedStable: return "SwitchedStable";
        case LimitStatus::LimitInducedBifurcation: return "LimitInducedBifurcation";
        case LimitStatus::InfeasibleOnLimit: return "InfeasibleOnLimit";
        case LimitStatus::OffLimitNotFeasible: return "OffLimitNotFeasible";
    }
    return "?";
}

LimitStatus classify_limit_rule(bool on_limit_feasible, double v_switched, double v_setpoint, double sensitivity) {
    if (!on_limit_feasible) return LimitStatus::LimitInducedBifurcation;
    if (v_switched > v_setpoint && sensitivity > 0.0) return LimitStatus::LimitInducedBifurcation;
    return LimitStatus::SwitchedStable;
}

LimitStatus classify_limit(const FeasibilityVerdict& /*off_limit*/, const Network& on_net,
                           const FeasibilityVerdict& on_limit, SwitchedBus& bus) {
    if (on_limit.status != Feasibility::Feasible) return classify_limit_rule(false, 0.0, bus.v_setpoint, 0.0);
    const auto s = polished_state(on_net, on_limit);
    bus.v_on = on_limit.voltage(bus.id).mag();
    bus.sensitivity = newton::vq_sensitivity(on_net, s, bus.id);
    return classify_limit_rule(true, *bus.v_on, bus.v_setpoint, *bus.sensitivity);
}

LimitOutcome enforce_q_limits(const Network& net, const SolveOptions& opt) {
    LimitOutcome out;
    out.off_limit = solve_stable(net, opt);
    if (out.off_limit.status != Feasibility::Feasible) {
        out.status = LimitStatus::OffLimitNotFeasible;
        return out;
    }
    auto reactive = [](const Network& n, const FeasibilityVerdict& v) {
        const auto pq = newton::bus_powers(ybus(n), to_state(v));
        return std::vector<double>(pq.second.data(), pq.second.data() + pq.second.size());
    };
    out.q_off = reactive(net, out.off_limit);

    Network current = net;
    FeasibilityVerdict verdict = out.off_limit;
    std::vector<double> q = out.q_off;
    const auto max_rounds = std::max<std::size_t>(1, 2 * net.count(BusKind::PV));
    for (std::size_t round = 0; round < max_rounds; ++round) {
        std::vector<SwitchedBus> found;
        for (std::size_t i = 0; i < current.size(); ++i) {
            const Bus& b = current.buses[i];
            if (b.kind != BusKind::PV) continue;
            if (b.q_max && q[i] > *b.q_max + kLimitTolerance)
                found.push_back({b.id, LimitSide::QMax, q[i], *b.q_max, b.v, {}, {}});
            else if (b.q_min && q[i] < *b.q_min - kLimitTolerance)
                found.push_back({b.id, LimitSide::QMin, q[i], *b.q_min, b.v, {}, {}});
        }
        if (found.empty()) break;
        for (const auto& f : found) {
            Bus& b = current.bus(f.id);
            b.kind = BusKind::PQ;
            b.q = f.limit;
            b.q_max.reset();
            b.q_min.reset();
            out.switched.push_back(f);
        }
        validate(current);
        verdict = solve_stable(current, opt);
        ++out.rounds;
        if (verdict.status != Feasibility::Feasible) break;
        q = reactive(current, verdict);
    }
    if (out.switched.empty()) {
        out.status = LimitStatus::NoViolation;
        return out;
    }
    out.on_limit = verdict;
    out.on_limit_network = current;
    out.status = LimitStatus::SwitchedStable;
    for (auto& sb : out.switched) {
        const auto st = classify_limit(out.off_limit, current, verdict, sb);
        if (st == LimitStatus::LimitInducedBifurcation) {
            out.status = st;
            out.reason = verdict.status == Feasibility::Feasible ? LimitStatus::LimitInducedBifurcation
                                                                 : LimitStatus::InfeasibleOnLimit;
        }
    }
    return out;
}

}  // namespace helm::stability
