#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helm/error.hpp"
#include "helm/stability.hpp"
#include "oracles.hpp"

using namespace helm;
using stability::Feasibility;
using stability::LimitStatus;

namespace {

const ParameterRef kP6 = ParameterRef::parse("bus6.p");

Network seven(double p6) { return with_parameter(builtin_network("paper-7bus"), kP6, p6); }
Network no12(double p6) { return with_parameter(builtin_network("paper-7bus-no12"), kP6, p6); }

Network with_qmax(Network net, int id, double q_max) {
    net.buses[net.index_of(id)].q_max = q_max;
    return net;
}

void check_mags(const stability::FeasibilityVerdict& v, const std::vector<double>& expected, double tol) {
    REQUIRE(v.solution.has_value());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CAPTURE(k + 1);
        CHECK(std::fabs(v.voltage(static_cast<int>(k) + 1).mag() - expected[k]) < tol);
    }
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("base case is feasible with the tabulated profile") {
    const auto v = stability::solve_stable(builtin_network("paper-7bus"));
    CHECK(v.status == Feasibility::Feasible);
    check_mags(v, {0.5657, 0.7546, 0.8394, 0.8319, 1.1000, 1.1000}, 5e-5);
    CHECK(v.evidence.all_converged);
    CHECK(v.evidence.orders == std::vector<int>{20, 30, 40, 50, 60});
    if (v.margin) CHECK(*v.margin > 1.0);
}

TEST_CASE("overloaded seven-bus network is infeasible") {
    const auto v = stability::solve_stable(seven(1.12));
    CHECK(v.status == Feasibility::Infeasible);
    REQUIRE(v.margin.has_value());
    CHECK(*v.margin < 1.0);
}

TEST_CASE("six-bus true solution and infeasible load") {
    const ParameterRef p5 = ParameterRef::parse("bus5.p");
    const auto net = builtin_network("paper-6bus");
    const auto v = stability::solve_stable(with_parameter(net, p5, 1.00));
    REQUIRE(v.status == Feasibility::Feasible);
    const std::vector<std::pair<double, double>> table{{0.42, 37}, {0.71, 95}, {0.58, 90}, {1.10, 119}, {1.10, 102}};
    for (std::size_t k = 0; k < table.size(); ++k) {
        const auto& bv = v.voltage(static_cast<int>(k) + 1);
        CAPTURE(k + 1);
        CHECK(std::round(bv.mag() * 100.0) / 100.0 == doctest::Approx(table[k].first));
        CHECK(std::fabs(bv.deg() - table[k].second) <= 1.0);
    }
    CHECK(stability::solve_stable(with_parameter(net, p5, 1.10)).status == Feasibility::Infeasible);
}

TEST_CASE("feasible voltages satisfy the original equations") {
    for (double p6 : {0.0, 0.5, 1.0, 1.05}) {
        const auto net = seven(p6);
        const auto v = stability::solve_stable(net);
        REQUIRE(v.status == Feasibility::Feasible);
        CAPTURE(p6);
        CHECK(oracle::mismatch(net, stability::to_state(v)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("convergence and branch point agree") {
    for (double p6 : {0.2, 0.5, 0.75, 1.0}) {
        for (const auto& net : {seven(p6), no12(p6)}) {
            const auto v = stability::solve_stable(net);
            CAPTURE(net.name);
            CAPTURE(p6);
            CHECK(v.evidence.escalations == 0);
            const bool beyond = !v.margin || *v.margin > 1.0;
            CHECK(v.evidence.all_converged == beyond);
        }
    }
}

TEST_CASE("verdict invariants") {
    for (double p6 : {0.3, 0.62, 0.8}) {
        const auto v = stability::solve_stable(no12(p6));
        if (v.status == Feasibility::Feasible) {
            CHECK(v.solution.has_value());
            CHECK(v.evidence.all_converged);
            CHECK((!v.margin || *v.margin > 1.0));
        } else if (v.status == Feasibility::Infeasible) {
            CHECK((!v.evidence.all_converged || (v.margin && *v.margin <= 1.0)));
        }
    }
}

TEST_CASE("limits: none set equals the plain verdict") {
    const auto net = builtin_network("paper-7bus");
    const auto plain = stability::solve_stable(net);
    const auto out = stability::enforce_q_limits(net);
    CHECK(out.status == LimitStatus::NoViolation);
    CHECK(out.off_limit.status == plain.status);
    REQUIRE(out.off_limit.solution.has_value());
    for (std::size_t i = 0; i < plain.solution->size(); ++i)
        CHECK((*out.off_limit.solution)[i].v == (*plain.solution)[i].v);
    CHECK(out.off_limit.margin == plain.margin);
}

TEST_CASE("limits: reactive output of the base case") {
    const auto net = with_qmax(builtin_network("paper-7bus"), 5, 10.0);
    const auto out = stability::enforce_q_limits(net);
    CHECK(out.status == LimitStatus::NoViolation);
    CHECK(out.q_off[net.index_of(5)] == doctest::Approx(0.7466).epsilon(5e-4 / 0.7466));
}

TEST_CASE("limits: boundary is not a violation") {
    const auto out = stability::enforce_q_limits(with_qmax(builtin_network("paper-7bus"), 5, 0.7466));
    CHECK(out.status == LimitStatus::NoViolation);
}

TEST_CASE("limits: limit-induced bifurcation") {
    const auto base = with_parameter(builtin_network("paper-7bus"), ParameterRef::parse("bus2.qload"), 0.0518);
    const auto out = stability::enforce_q_limits(with_qmax(base, 5, 0.75));
    CHECK(out.status == LimitStatus::LimitInducedBifurcation);
    CHECK(out.reason == LimitStatus::LimitInducedBifurcation);
    check_mags(out.off_limit, {0.5641, 0.7530, 0.8390, 0.8316, 1.1000, 1.1000}, 5e-4);
    REQUIRE(out.on_limit.has_value());
    check_mags(*out.on_limit, {0.7988, 0.9625, 0.9537, 0.8925, 1.2284, 1.1000}, 5e-4);
    REQUIRE(out.switched.size() == 1);
    CHECK(out.switched[0].id == 5);
    CHECK(out.switched[0].side == stability::LimitSide::QMax);
    REQUIRE(out.switched[0].sensitivity.has_value());
    CHECK(*out.switched[0].sensitivity > 0.0);

    // heavier generation leaves no on-limit solution at all
    const auto heavy = stability::enforce_q_limits(with_qmax(with_parameter(base, kP6, 1.04), 5, 0.75));
    CHECK(heavy.status == LimitStatus::LimitInducedBifurcation);
    CHECK(heavy.reason == LimitStatus::InfeasibleOnLimit);
}

TEST_CASE("limit classification rule") {
    CHECK(stability::classify_limit_rule(false, 0.0, 1.1, 0.0) == LimitStatus::LimitInducedBifurcation);
    CHECK(stability::classify_limit_rule(true, 1.2, 1.1, 0.5) == LimitStatus::LimitInducedBifurcation);
    CHECK(stability::classify_limit_rule(true, 1.0, 1.1, 0.5) == LimitStatus::SwitchedStable);
    CHECK(stability::classify_limit_rule(true, 1.2, 1.1, -0.5) == LimitStatus::SwitchedStable);
}

TEST_CASE("sweep agrees with Newton at light load") {
    const auto records = stability::sweep(builtin_network("paper-7bus"), kP6, 0.0, 0.2, 0.05);
    REQUIRE(records.size() == 5);
    for (const auto& r : records) {
        CAPTURE(r.value);
        CHECK(r.helm.status == Feasibility::Feasible);
        CHECK(r.match_flat);
        CHECK(r.match_alt);
    }
    CHECK(records.front().value == doctest::Approx(0.0));
    CHECK(records.back().value == doctest::Approx(0.2));
}

TEST_CASE("sweep matches at the tabulated medium load") {
    const auto records = stability::sweep(builtin_network("paper-7bus"), kP6, 0.75, 0.80, 0.05);
    REQUIRE(records.size() == 2);
    check_mags(records[0].helm, {0.7613, 0.8658, 0.9210, 0.8888}, 5e-5);
    CHECK(records[0].match_flat);
}

TEST_CASE("sweep beyond collapse never matches") {
    const auto records = stability::sweep(builtin_network("paper-7bus"), kP6, 1.10, 1.15, 0.05);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK(r.helm.status == Feasibility::Infeasible);
        CHECK_FALSE(r.match_flat);
    }
}

TEST_CASE("Newton and the embedding agree up to the erratic region") {
    const auto records = stability::sweep(builtin_network("paper-7bus"), kP6, 0.0, 0.97, 0.0485);
    REQUIRE(records.size() == 21);
    for (const auto& r : records) {
        CAPTURE(r.value);
        CHECK(r.match_flat);
        if (r.match_flat) {
            const auto phasors = r.nr_flat->state.phasors();
            double d = 0.0;
            for (std::size_t i = 0; i < phasors.size(); ++i)
                d = std::max(d, std::abs(phasors[i] - (*r.helm.solution)[i].v));
            CHECK(d < stability::kMatchTolerance);
        }
    }
}

TEST_CASE("sweep CSV layout") {
    const auto net = builtin_network("paper-7bus");
    const auto records = stability::sweep(net, kP6, 0.1, 0.2, 0.1);
    std::ostringstream out;
    stability::write_sweep_csv(out, net, records);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("param,helm_status,helm_V0,helm_V1,", 0) == 0);
    CHECK(header.find(",helm_V6,zc,nr_flat_status,nr_flat_V0,") != std::string::npos);
    CHECK(header.find(",nr_flat_V6,nr_alt_status,nr_alt_V0,") != std::string::npos);
    CHECK(header.size() >= 20);
    CHECK(header.substr(header.size() - 20) == "match_flat,match_alt");
}

TEST_CASE("sweep arguments are checked") {
    CHECK_THROWS_AS(stability::sweep(builtin_network("paper-7bus"), kP6, 0.5, 0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(stability::sweep(builtin_network("paper-7bus"), kP6, 0.1, 0.5, 0.0), ValidationError);
}

TEST_CASE("bisection brackets") {
    const auto net = builtin_network("paper-7bus");
    CHECK_THROWS_AS(stability::find_snb(net, kP6, 1.1, 1.2, 1e-3), BadBracket);
    CHECK_THROWS_AS(stability::find_snb(net, kP6, 0.5, 0.6, 1e-3), BadBracket);
    CHECK_THROWS_AS(stability::find_snb(net, kP6, 1.0, 0.9, 1e-3), BadBracket);
}

TEST_CASE("six-bus collapse point") {
    const auto r = stability::find_snb(builtin_network("paper-6bus"), ParameterRef::parse("bus5.p"), 1.00, 1.10, 1e-2);
    CHECK(r.value > 1.00);
    CHECK(r.value < 1.10);
    CHECK(r.hi - r.lo <= 1e-2);
    CHECK(!r.history.empty());
    for (const auto& step : r.history) CHECK(step.mid == doctest::Approx((step.lo + step.hi) / 2.0));
}

TEST_CASE("Jacobian is well conditioned at light load") {
    const double s = stability::snb_singularity_check(builtin_network("paper-7bus"), kP6, 0.20);
    CHECK(s > 0.1);
    CHECK(s < 10.0);
}

}  // TEST_SUITE
