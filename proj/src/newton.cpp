#include "helm/newton.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "helm/error.hpp"

namespace helm::newton {
namespace {

std::size_t count_pq(const Network& net) { return net.count(BusKind::PQ); }

bool all_finite(const Eigen::VectorXd& x) { return x.allFinite(); }

void factor_or_throw(const Eigen::MatrixXd& j, const char* what, Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    lu.compute(j);
    const double rc = lu.rcond();
    if (!(rc > 1e-19)) throw SingularJacobian(std::string(what) + ": Jacobian is singular (rcond " + std::to_string(rc) + ")");
}

}  // namespace

std::vector<std::complex<double>> BusState::phasors() const {
    std::vector<std::complex<double>> v(vm.size());
    // vm may be negative on a Newton iterate, which std::polar does not allow
    for (std::size_t i = 0; i < vm.size(); ++i) v[i] = {vm[i] * std::cos(va[i]), vm[i] * std::sin(va[i])};
    return v;
}

std::string_view to_string(NRStatus status) {
    switch (status) {
        case NRStatus::Converged: return "Converged";
        case NRStatus::Diverged: return "Diverged";
        case NRStatus::MaxIterations: return "MaxIterations";
    }
    return "?";
}

std::string_view to_string(JacobianVariant variant) {
    return variant == JacobianVariant::Standard ? "Standard" : "AltDiagonal";
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bus_powers(const AdmittanceMatrix& y, const BusState& s) {
    const auto n = static_cast<Eigen::Index>(s.vm.size());
    const Eigen::MatrixXd g = y.g(), b = y.b();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n), q = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (g(i, k) == 0.0 && b(i, k) == 0.0) continue;
            const double t = s.va[i] - s.va[k];
            const double c = std::cos(t), sn = std::sin(t);
            p(i) += s.vm[k] * (g(i, k) * c + b(i, k) * sn);
            q(i) += s.vm[k] * (g(i, k) * sn - b(i, k) * c);
        }
        p(i) *= s.vm[i];
        q(i) *= s.vm[i];
    }
    return {p, q};
}

Eigen::VectorXd mismatch(const Network& net, const AdmittanceMatrix& y, const BusState& s) {
    const std::size_t n = net.size(), npq = count_pq(net);
    const auto [p, q] = bus_powers(y, s);
    Eigen::VectorXd f(static_cast<Eigen::Index>(n - 1 + npq));
    for (std::size_t i = 0; i + 1 < n; ++i) f(i) = p(i) - net.buses[i].p;
    for (std::size_t i = 0; i < npq; ++i) f(n - 1 + i) = q(i) - net.buses[i].q;
    return f;
}

Eigen::MatrixXd jacobian(const Network& net, const AdmittanceMatrix& y, const BusState& s, JacobianVariant variant) {
    const std::size_t n = net.size(), npq = count_pq(net);
    const auto dim = static_cast<Eigen::Index>(n - 1 + npq);
    const Eigen::MatrixXd g = y.g(), b = y.b();
    const auto [p, q] = bus_powers(y, s);
    const auto& vm = s.vm;
    const auto& va = s.va;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    const auto vcol = [&](std::size_t k) { return static_cast<Eigen::Index>(n - 1 + k); };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool i_pq = i < npq;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const bool k_pq = k < npq;
            if (i == k) {
                j(i, i) = -q(i) - b(i, i) * vm[i] * vm[i];
                if (i_pq) {
                    j(vcol(i), i) = p(i) - g(i, i) * vm[i] * vm[i];
                    j(i, vcol(i)) = p(i) / vm[i] + g(i, i) * vm[i];
                    j(vcol(i), vcol(i)) = q(i) / vm[i] - b(i, i) * vm[i];
                }
                continue;
            }
            if (g(i, k) == 0.0 && b(i, k) == 0.0) continue;
            const double t = va[i] - va[k];
            const double c = std::cos(t), sn = std::sin(t);
            const double gs_bc = g(i, k) * sn - b(i, k) * c;
            const double gc_bs = g(i, k) * c + b(i, k) * sn;
            j(i, k) = vm[i] * vm[k] * gs_bc;
            if (k_pq) j(i, vcol(k)) = vm[i] * gc_bs;
            if (i_pq) {
                j(vcol(i), k) = -vm[i] * vm[k] * gc_bs;
                if (k_pq) j(vcol(i), vcol(k)) = vm[i] * gs_bc;
            }
        }
    }
    if (variant == JacobianVariant::AltDiagonal) {
        for (std::size_t i = 0; i < npq; ++i) {
            if (vm[i] == 0.0)
                throw DivisionByZeroVm("bus " + std::to_string(net.buses[i].id) + " has zero voltage magnitude");
            j(i, vcol(i)) = net.buses[i].p / vm[i] + g(i, i) * vm[i];
            j(vcol(i), vcol(i)) = net.buses[i].q / vm[i] - b(i, i) * vm[i];
        }
    }
    return j;
}

BusState flat_start(const Network& net) {
    BusState s;
    const double vr = net.slack().v;
    for (const auto& bus : net.buses) {
        s.vm.push_back(bus.kind == BusKind::PQ ? vr : bus.v);
        s.va.push_back(0.0);
    }
    return s;
}

NRResult solve_nr(const Network& net, const BusState& start, const NROptions& opt) {
    const AdmittanceMatrix y = ybus(net);
    const std::size_t n = net.size(), npq = count_pq(net);
    NRResult r;
    r.state = start;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    auto record = [&](int it, double norm) {
        const double mv = *std::min_element(r.state.vm.begin(), r.state.vm.end());
        r.trajectory.push_back({it, norm, mv});
    };

    for (int it = 0;; ++it) {
        const Eigen::VectorXd f = mismatch(net, y, r.state);
        const double norm = all_finite(f) ? f.lpNorm<Eigen::Infinity>() : INFINITY;
        r.iterations = it;
        r.final_mismatch = norm;
        record(it, norm);
        if (!std::isfinite(norm) || norm > opt.divergence_limit) {
            r.status = NRStatus::Diverged;
            break;
        }
        if (norm < opt.tol) {
            r.status = NRStatus::Converged;
            break;
        }
        if (it >= opt.max_iter) {
            r.status = NRStatus::MaxIterations;
            break;
        }
        const Eigen::MatrixXd j = jacobian(net, y, r.state, opt.variant);
        factor_or_throw(j, ("Newton iteration " + std::to_string(it)).c_str(), lu);
        const Eigen::VectorXd dx = lu.solve(f);
        if (!all_finite(dx)) {
            r.status = NRStatus::Diverged;
            break;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) r.state.va[i] -= dx(i);
        for (std::size_t i = 0; i < npq; ++i) r.state.vm[i] -= dx(n - 1 + i);
    }
    r.q_out.resize(n);
    if (r.status != NRStatus::Diverged) {
        const auto pq = bus_powers(y, r.state);
        for (std::size_t i = 0; i < n; ++i) r.q_out[i] = pq.second(i);
    }
    return r;
}

NRResult solve_nr(const Network& net, const NROptions& opt) { return solve_nr(net, flat_start(net), opt); }

BusState tangent_predict(const Network& net, const BusState& base, const ParameterRef& param, double target) {
    const double from = get_parameter(net, param);
    if (target == from) return base;
    const AdmittanceMatrix y = ybus(net);
    const std::size_t n = net.size(), npq = count_pq(net);
    const auto dim = static_cast<Eigen::Index>(n - 1 + npq);

    // d(mismatch)/d(parameter): the scheduled injection enters with a minus
    // sign; a reactive load is a negative reactive injection.
    Eigen::VectorXd col = Eigen::VectorXd::Zero(dim);
    const std::size_t k = net.index_of(param.bus_id);
    if (param.field == ParameterRef::Field::ActiveInjection) {
        if (k + 1 >= n) throw ValidationError("the slack bus injection is not a free parameter");
        col(static_cast<Eigen::Index>(k)) = -1.0;
    } else {
        if (k >= npq) throw ValidationError("reactive load parameter needs a PQ bus");
        col(static_cast<Eigen::Index>(n - 1 + k)) = 1.0;
    }
    Eigen::MatrixXd aug(dim, dim + 1);
    aug << jacobian(net, y, base), col;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(aug, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(dim - 1) < 1e-12 * std::max(1.0, sv(0)))
        throw SingularAugmented("augmented Jacobian has rank below " + std::to_string(dim));
    Eigen::VectorXd t = svd.matrixV().col(dim);
    if (std::fabs(t(dim)) < 1e-12)
        throw SingularAugmented("tangent is orthogonal to the parameter direction");
    t *= (target - from) / t(dim);

    BusState s = base;
    for (std::size_t i = 0; i + 1 < n; ++i) s.va[i] += t(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < npq; ++i) s.vm[i] += t(static_cast<Eigen::Index>(n - 1 + i));
    return s;
}

double min_singular_value(const Eigen::MatrixXd& j) {
    if (j.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    return svd.singularValues().minCoeff();
}

double vq_sensitivity(const Network& net, const BusState& solution, int bus_id) {
    const std::size_t k = net.index_of(bus_id);
    if (net.buses[k].kind != BusKind::PQ)
        throw ValidationError("bus " + std::to_string(bus_id) + " must be PQ for a V-Q sensitivity");
    const AdmittanceMatrix y = ybus(net);
    const std::size_t n = net.size();
    const Eigen::MatrixXd j = jacobian(net, y, solution);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    factor_or_throw(j, "V-Q sensitivity", lu);
    // Raising Q^spec by dq shifts the mismatch by -dq; the solution moves by
    // J^-1 e_Q dq.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(j.rows());
    e(static_cast<Eigen::Index>(n - 1 + k)) = 1.0;
    const Eigen::VectorXd dx = lu.solve(e);
    return dx(static_cast<Eigen::Index>(n - 1 + k));
}

void write_trace_csv(std::ostream& out, const NRResult& r) {
    out << "iteration,mismatch_norm,min_vm\n";
    for (const auto& t : r.trajectory) out << t.iteration << ',' << t.mismatch_norm << ',' << t.min_vm << '\n';
}

}  // namespace helm::newton
