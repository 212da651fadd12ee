#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helm/error.hpp"
#include "helm/newton.hpp"
#include "helm/stability.hpp"
#include "oracles.hpp"

using namespace helm;
using newton::JacobianVariant;
using newton::NRStatus;

namespace {

const ParameterRef kP6 = ParameterRef::parse("bus6.p");

Network seven(double p6) { return with_parameter(builtin_network("paper-7bus"), kP6, p6); }

// |V| of a bus. Newton iterates may carry a negative vm; the phasor is what counts.
double vm(const Network& net, const newton::BusState& s, int id) {
    return std::abs(s.phasors()[net.index_of(id)]);
}

void check_profile(const Network& net, const newton::BusState& s, const std::vector<double>& expected, double tol) {
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CAPTURE(k + 1);
        CHECK(std::fabs(vm(net, s, static_cast<int>(k) + 1) - expected[k]) < tol);
    }
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("newton") {

TEST_CASE("no-load flat state has zero mismatch") {
    auto net = builtin_network("paper-7bus");
    for (auto& b : net.buses) {
        b.p = 0.0;
        if (b.kind == BusKind::PQ) b.q = 0.0;
        if (b.kind != BusKind::Slack) b.v = 1.0;
    }
    const auto r = newton::mismatch(net, ybus(net), newton::flat_start(net));
    CHECK(r.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mismatch agrees with complex power computation") {
    for (const auto& name : builtin_names()) {
        const auto net = builtin_network(name);
        const auto y = ybus(net);
        for (unsigned seed = 1; seed <= 10; ++seed) {
            const auto s = oracle::random_state(net, seed);
            CHECK((newton::mismatch(net, y, s) - oracle::mismatch(net, s)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("tabulated light-load solution satisfies the equations") {
    const auto net = seven(0.20);
    const std::vector<double> table{0.9408, 0.9774, 0.9953, 0.9447};
    const auto r = newton::solve_nr(net);
    REQUIRE(r.status == NRStatus::Converged);
    // the four-decimal table reproduces the converged state within rounding
    check_profile(net, r.state, table, 5e-5);
    CHECK(oracle::mismatch(net, r.state).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("Jacobian agrees with finite differences") {
    for (const char* name : {"paper-7bus", "paper-6bus"}) {
        const auto net = builtin_network(name);
        const auto y = ybus(net);
        double worst = 0.0;
        for (unsigned seed = 1; seed <= 100; ++seed) {
            const auto s = oracle::random_state(net, seed);
            const auto j = newton::jacobian(net, y, s);
            worst = std::max(worst, max_abs(j - oracle::fd_jacobian(net, s, 1e-7)));
        }
        CAPTURE(name);
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("Jacobian variants agree on solutions") {
    for (double p6 : {0.2, 0.75, 1.0}) {
        // flat start fails at 1.0, so start from the embedding solution
        const auto net = seven(p6);
        const auto r = newton::solve_nr(net, stability::to_state(stability::solve_stable(net)));
        REQUIRE(r.status == NRStatus::Converged);
        const auto y = ybus(net);
        const auto a = newton::jacobian(net, y, r.state, JacobianVariant::Standard);
        const auto b = newton::jacobian(net, y, r.state, JacobianVariant::AltDiagonal);
        CHECK(max_abs(a - b) < 1e-8 * max_abs(a));
    }
}

TEST_CASE("Jacobian variants differ only on the replaced diagonals") {
    const auto net = builtin_network("paper-7bus");
    const auto y = ybus(net);
    const auto s = oracle::random_state(net, 3);
    const auto a = newton::jacobian(net, y, s, JacobianVariant::Standard);
    const auto b = newton::jacobian(net, y, s, JacobianVariant::AltDiagonal);
    // magnitude columns start after the non-slack angles
    const Eigen::Index angles = static_cast<Eigen::Index>(net.size()) - 1;
    const Eigen::Index pq = a.rows() - angles;
    int differing = 0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (a(r, c) == b(r, c)) continue;
            ++differing;
            const bool dp_dv = r < angles && c >= angles && r == c - angles;
            const bool dq_dv = r >= angles && c >= angles && r == c;
            CHECK((dp_dv || dq_dv));
        }
    }
    CHECK(differing > 0);
    CHECK(differing <= 2 * pq);
}

TEST_CASE("flat start converges at light load") {
    const auto r = newton::solve_nr(seven(0.20));
    CHECK(r.status == NRStatus::Converged);
    CHECK(r.final_mismatch < 1e-8);
    CHECK(oracle::mismatch(seven(0.20), r.state).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("flat start fails at the base case") {
    const auto r = newton::solve_nr(seven(1.00));
    CHECK(r.status != NRStatus::Converged);
}

TEST_CASE("flat start finds a false low-voltage solution at 1.02") {
    const auto net = seven(1.02);
    const auto r = newton::solve_nr(net);
    REQUIRE(r.status == NRStatus::Converged);
    check_profile(net, r.state, {0.1520, 0.0673, 0.7376, 0.7757}, 5e-4);
}

TEST_CASE("erratic convergence near the collapse point") {
    std::vector<newton::BusState> profiles;
    int failures = 0;
    for (int k = 0; k <= 8; ++k) {
        const double p6 = 1.0416 + 1e-4 * k;
        const auto r = newton::solve_nr(seven(p6));
        if (r.status != NRStatus::Converged) {
            ++failures;
            continue;
        }
        const bool known = std::any_of(profiles.begin(), profiles.end(), [&](const newton::BusState& s) {
            const auto a = s.phasors(), b = r.state.phasors();
            double d = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(std::abs(a[i]) - std::abs(b[i])));
            return d < 1e-2;
        });
        if (!known) profiles.push_back(r.state);
    }
    CHECK(profiles.size() >= 2);
    CHECK(failures >= 1);
}

TEST_CASE("every converged result solves the equations") {
    for (double p6 : {0.0, 0.3, 0.6, 0.9, 1.02, 1.1}) {
        for (auto variant : {JacobianVariant::Standard, JacobianVariant::AltDiagonal}) {
            const auto net = seven(p6);
            newton::NROptions opt;
            opt.variant = variant;
            const auto r = newton::solve_nr(net, opt);
            if (r.status != NRStatus::Converged) continue;
            CHECK(oracle::mismatch(net, r.state).cwiseAbs().maxCoeff() < opt.tol);
        }
    }
}

TEST_CASE("quadratic convergence near a solution") {
    const auto net = seven(0.75);
    const auto exact = newton::solve_nr(net);
    REQUIRE(exact.status == NRStatus::Converged);
    auto start = exact.state;
    for (std::size_t i = 0; i < start.vm.size(); ++i) {
        if (net.buses[i].kind == BusKind::PQ) start.vm[i] += 1e-3;
        if (net.buses[i].kind != BusKind::Slack) start.va[i] -= 1e-3;
    }
    newton::NROptions opt;
    opt.tol = 1e-14;
    const auto r = newton::solve_nr(net, start, opt);
    const auto& t = r.trajectory;
    REQUIRE(t.size() >= 3);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (t[k + 1].mismatch_norm < 1e-13) break;
        CHECK(t[k + 1].mismatch_norm / (t[k].mismatch_norm * t[k].mismatch_norm) < 100.0);
    }
}

TEST_CASE("trace output") {
    const auto r = newton::solve_nr(seven(0.2));
    std::ostringstream out;
    newton::write_trace_csv(out, r);
    const auto text = out.str();
    CHECK(text.rfind("iteration,mismatch_norm,min_vm\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == 1 + r.trajectory.size());
}

TEST_CASE("tangent predictor") {
    const auto base_net = seven(0.0);
    const auto base = newton::solve_nr(base_net);
    REQUIRE(base.status == NRStatus::Converged);

    SUBCASE("zero step returns the base state") {
        const auto s = newton::tangent_predict(base_net, base.state, kP6, 0.0);
        for (std::size_t i = 0; i < s.vm.size(); ++i) {
            CHECK(s.vm[i] == doctest::Approx(base.state.vm[i]).epsilon(1e-14));
            CHECK(s.va[i] == doctest::Approx(base.state.va[i]).epsilon(1e-14));
        }
    }
    SUBCASE("small step lands on the stable branch") {
        const auto target = seven(0.05);
        const auto r = newton::solve_nr(target, newton::tangent_predict(base_net, base.state, kP6, 0.05));
        REQUIRE(r.status == NRStatus::Converged);
        const auto v = stability::solve_stable(target);
        REQUIRE(v.status == stability::Feasibility::Feasible);
        const auto phasors = r.state.phasors();
        for (std::size_t i = 0; i < target.size(); ++i)
            CHECK(std::abs(phasors[i] - v.voltage(target.buses[i].id).v) < 1e-6);
    }
    SUBCASE("a long step finds a false solution") {
        const auto target = seven(1.00);
        const auto r = newton::solve_nr(target, newton::tangent_predict(base_net, base.state, kP6, 1.00));
        REQUIRE(r.status == NRStatus::Converged);
        const std::vector<double> stable{0.5657, 0.7546, 0.8394, 0.8319};
        double d = 0.0;
        for (int id = 1; id <= 4; ++id) d = std::max(d, std::fabs(vm(target, r.state, id) - stable[id - 1]));
        CHECK(d > 1e-2);
    }
}

TEST_CASE("smallest singular value") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0;
    CHECK(newton::min_singular_value(d) == doctest::Approx(3.0).epsilon(1e-14));

    auto at = [](double p6) {
        const auto net = seven(p6);
        const auto v = stability::solve_stable(net);
        REQUIRE(v.status == stability::Feasibility::Feasible);
        return newton::min_singular_value(newton::jacobian(net, ybus(net), stability::polished_state(net, v)));
    };
    CHECK(at(1.05) < at(0.20));
}

TEST_CASE("voltage-reactive sensitivity") {
    const auto two = parse_network(R"({"buses": [{"id": 0, "kind": "slack", "v": 1.0},
        {"id": 1, "kind": "pq", "p": -0.2, "q": -0.1}], "branches": [{"from": 0, "to": 1, "r": 0.02, "x": 0.1}]})");
    const auto r = newton::solve_nr(two);
    REQUIRE(r.status == NRStatus::Converged);
    const double s = newton::vq_sensitivity(two, r.state, 1);
    CHECK(s > 0.0);

    // re-solve with a small reactive injection
    const double dq = 1e-6;
    auto bumped = two;
    bumped.buses[bumped.index_of(1)].q += dq;
    const auto rb = newton::solve_nr(bumped, r.state);
    REQUIRE(rb.status == NRStatus::Converged);
    const double fd = (vm(bumped, rb.state, 1) - vm(two, r.state, 1)) / dq;
    CHECK(std::fabs(s - fd) < 1e-5);

    const auto net = seven(0.75);
    const auto r7 = newton::solve_nr(net);
    REQUIRE(r7.status == NRStatus::Converged);
    for (int id : {1, 2, 3, 4}) {
        const double analytic = newton::vq_sensitivity(net, r7.state, id);
        auto b7 = net;
        b7.buses[b7.index_of(id)].q += dq;
        const auto rb7 = newton::solve_nr(b7, r7.state);
        REQUIRE(rb7.status == NRStatus::Converged);
        CAPTURE(id);
        CHECK(std::fabs(analytic - (vm(b7, rb7.state, id) - vm(net, r7.state, id)) / dq) < 1e-5);
    }
}

TEST_CASE("error reporting") {
    const auto two = parse_network(R"({"buses": [{"id": 0, "kind": "slack", "v": 1.0},
        {"id": 1, "kind": "pq", "p": -0.2, "q": -0.1}], "branches": [{"from": 0, "to": 1, "r": 0.02, "x": 0.1}]})");
    auto s = newton::flat_start(two);
    s.vm[two.index_of(1)] = 0.0;
    CHECK_THROWS_AS(newton::jacobian(two, ybus(two), s, JacobianVariant::AltDiagonal), DivisionByZeroVm);
    CHECK_THROWS_AS(newton::solve_nr(two, s), SingularJacobian);
}

}  // TEST_SUITE
