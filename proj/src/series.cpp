#include "helm/series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>

#include "helm/error.hpp"

namespace helm::series {
namespace {

std::atomic<std::size_t> g_factorizations{0};

// log10 of a sum of magnitudes given their log10 values.
double log10_sum(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log10(1.0 + std::pow(10.0, lo - hi));
}

double log10_abs(const mp::Complex& z) { return std::max(z.re.log10_abs(), z.im.log10_abs()); }

}  // namespace

std::size_t factorization_count() { return g_factorizations.load(); }

std::vector<double> EmbeddedSystem::matrix_as_double() const {
    std::vector<double> out(matrix_.size());
    std::transform(matrix_.begin(), matrix_.end(), out.begin(), [](const mp::Real& r) { return r.to_double(); });
    return out;
}

EmbeddedSystem embed(const Network& net, unsigned digits) {
    mp::PrecisionScope scope(digits);
    EmbeddedSystem sys;
    sys.net_ = net;
    sys.y_ = ybus(net);
    sys.digits_ = digits;

    const std::size_t n = net.size();
    sys.offset_.assign(n, -1);
    std::size_t dim = 0;
    for (std::size_t i = 0; i < n; ++i) {
        switch (net.buses[i].kind) {
            case BusKind::PQ:
                sys.offset_[i] = static_cast<int>(dim);
                dim += 2;
                break;
            case BusKind::PV:
                sys.offset_[i] = static_cast<int>(dim);
                dim += 3;
                break;
            case BusKind::Slack: break;
        }
    }
    sys.dim_ = dim;

    // Admittances recomputed in working precision from the branch impedances.
    sys.g_.assign(n * n, mp::Real());
    sys.b_.assign(n * n, mp::Real());
    for (const auto& br : net.branches) {
        const std::size_t i = net.index_of(br.from), k = net.index_of(br.to);
        const mp::Complex z(br.z);
        const mp::Complex y = mp::Complex(1.0) / z;
        sys.g_[i * n + i] += y.re;
        sys.b_[i * n + i] += y.im;
        sys.g_[k * n + k] += y.re;
        sys.b_[k * n + k] += y.im;
        sys.g_[i * n + k] -= y.re;
        sys.b_[i * n + k] -= y.im;
        sys.g_[k * n + i] -= y.re;
        sys.b_[k * n + i] -= y.im;
    }

    sys.matrix_.assign(dim * dim, mp::Real());
    auto at = [&](std::size_t r, std::size_t c) -> mp::Real& { return sys.matrix_[r * dim + c]; };
    for (std::size_t i = 0; i < n; ++i) {
        if (sys.offset_[i] < 0) continue;
        const auto r = static_cast<std::size_t>(sys.offset_[i]);
        for (std::size_t k = 0; k < n; ++k) {
            if (sys.offset_[k] < 0) continue;
            const auto c = static_cast<std::size_t>(sys.offset_[k]);
            const mp::Real& g = sys.g_[i * n + k];
            const mp::Real& b = sys.b_[i * n + k];
            at(r, c) = g;
            at(r, c + 1) = -b;
            at(r + 1, c) = b;
            at(r + 1, c + 1) = g;
        }
        if (net.buses[i].kind == BusKind::PV) {
            at(r + 1, r + 2) = mp::Real(1);  // + j Q_i[n] W_i[0]
            at(r + 2, r) = mp::Real(2);      // 2 Re V_i[n]
        }
    }

    // LU with partial pivoting.
    sys.lu_ = sys.matrix_;
    sys.perm_.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) sys.perm_[i] = i;
    mp::Real scale;
    for (const auto& x : sys.matrix_)
        if (mp::abs(x) > scale) scale = mp::abs(x);
    const mp::Real tiny = scale * mp::pow10(-static_cast<long>(digits) + 10);
    auto lu = [&](std::size_t r, std::size_t c) -> mp::Real& { return sys.lu_[r * dim + c]; };
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        mp::Real best = mp::abs(lu(col, col));
        for (std::size_t r = col + 1; r < dim; ++r) {
            mp::Real a = mp::abs(lu(r, col));
            if (a > best) {
                best = std::move(a);
                piv = r;
            }
        }
        if (best <= tiny)
            throw SingularEmbedding("embedded system matrix is singular at " + std::to_string(digits) +
                                    " digits (column " + std::to_string(col) + ")");
        if (piv != col) {
            for (std::size_t c = 0; c < dim; ++c) std::swap(lu(col, c), lu(piv, c));
            std::swap(sys.perm_[col], sys.perm_[piv]);
        }
        for (std::size_t r = col + 1; r < dim; ++r) {
            if (lu(r, col).is_zero()) continue;
            lu(r, col) /= lu(col, col);
            for (std::size_t c = col + 1; c < dim; ++c) lu(r, c).sub_product(lu(r, col), lu(col, c));
        }
    }
    ++g_factorizations;

    // ||M||_inf * ||M^-1||_inf
    double norm_m = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += std::fabs(at(r, c).to_double());
        norm_m = std::max(norm_m, s);
    }
    std::vector<double> row_sums(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
        std::vector<mp::Real> e(dim);
        e[c] = mp::Real(1);
        sys.solve(e);
        for (std::size_t r = 0; r < dim; ++r) row_sums[r] += std::fabs(e[r].to_double());
    }
    const double norm_inv = dim ? *std::max_element(row_sums.begin(), row_sums.end()) : 1.0;
    sys.log10_cond_ = dim ? std::log10(norm_m * norm_inv) : 0.0;
    return sys;
}

void EmbeddedSystem::solve(std::vector<mp::Real>& rhs) const {
    const std::size_t dim = dim_;
    std::vector<mp::Real> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < r; ++c) x[r].sub_product(lu_[r * dim + c], x[c]);
    for (std::size_t r = dim; r-- > 0;) {
        for (std::size_t c = r + 1; c < dim; ++c) x[r].sub_product(lu_[r * dim + c], x[c]);
        x[r] /= lu_[r * dim + r];
    }
    rhs = std::move(x);
}

std::size_t VoltageSeries::index_of(int id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return i;
    throw ValidationError("series has no bus with id " + std::to_string(id));
}

VoltageSeries germ(const EmbeddedSystem& sys) {
    mp::PrecisionScope scope(sys.digits());
    const Network& net = sys.network();
    VoltageSeries s;
    s.order = 0;
    s.digits = sys.digits();
    s.v.resize(net.size());
    s.w.resize(net.size());
    s.q.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        s.ids.push_back(net.buses[i].id);
        s.v[i].emplace_back(mp::Real(1), mp::Real(0));
        s.w[i].emplace_back(mp::Real(1), mp::Real(0));
        if (net.buses[i].kind == BusKind::PV) s.q[i].emplace_back(0);
    }
    return s;
}

void extend(const EmbeddedSystem& sys, VoltageSeries& s, int target_order) {
    if (s.order < 0) s = germ(sys);
    if (target_order <= s.order) return;
    mp::PrecisionScope scope(sys.digits_);
    const Network& net = sys.network();
    const std::size_t nb = net.size();
    const std::size_t dim = sys.dim_;
    const std::size_t slack = nb - 1;
    const double budget = -static_cast<double>(sys.digits_) / 2.0;

    for (auto& vi : s.v) vi.reserve(static_cast<std::size_t>(target_order) + 1);
    for (auto& wi : s.w) wi.reserve(static_cast<std::size_t>(target_order) + 1);

    // log10 magnitudes of the coefficients, for the error estimate without
    // touching multiprecision values in the inner loops
    std::vector<std::vector<double>> lv(nb), lw(nb), lq(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        for (const auto& x : s.v[i]) lv[i].push_back(log10_abs(x));
        for (const auto& x : s.w[i]) lw[i].push_back(log10_abs(x));
        for (const auto& x : s.q[i]) lq[i].push_back(x.log10_abs());
    }

    for (int n = s.order + 1; n <= target_order; ++n) {
        const auto un = static_cast<std::size_t>(n);
        // Slack coefficient for this order.
        mp::Complex vs_n;
        if (n == 1) vs_n = mp::Complex(mp::Real(net.slack().v) - mp::Real(1));

        std::vector<mp::Real> rhs(dim);
        double log_rhs_terms = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nb; ++i) {
            if (sys.offset_[i] < 0) continue;
            const Bus& bus = net.buses[i];
            const auto r = static_cast<std::size_t>(sys.offset_[i]);
            mp::Complex c;
            if (bus.kind == BusKind::PQ) {
                // conj(S) W[n-1]
                c = mp::Complex(bus.p, -bus.q) * s.w[i][un - 1];
                log_rhs_terms = std::max(log_rhs_terms, log10_abs(c));
            } else {
                // P W[n-1] - j sum_{m=1}^{n-1} Q[m] W[n-m]
                c = s.w[i][un - 1] * mp::Real(bus.p);
                mp::Complex acc;
                for (std::size_t m = 1; m < un; ++m) {
                    acc.re.add_product(s.q[i][m], s.w[i][un - m].re);
                    acc.im.add_product(s.q[i][m], s.w[i][un - m].im);
                    log_rhs_terms = std::max(log_rhs_terms, lq[i][m] + lw[i][un - m]);
                }
                c.re += acc.im;
                c.im -= acc.re;
            }
            if (!vs_n.is_zero()) c -= mp::Complex(sys.g_[i * nb + slack], sys.b_[i * nb + slack]) * vs_n;
            rhs[r] = c.re;
            rhs[r + 1] = c.im;

            if (bus.kind == BusKind::PV) {
                mp::Real m_rhs;
                if (n == 1) m_rhs = mp::Real(bus.v) * mp::Real(bus.v) - mp::Real(1);
                for (std::size_t m = 1; m < un; ++m) {
                    // Re(V[m] conj(V[n-m]))
                    m_rhs.sub_product(s.v[i][m].re, s.v[i][un - m].re);
                    m_rhs.sub_product(s.v[i][m].im, s.v[i][un - m].im);
                    log_rhs_terms = std::max(log_rhs_terms, lv[i][m] + lv[i][un - m]);
                }
                rhs[r + 2] = std::move(m_rhs);
            }
        }

        sys.solve(rhs);

        double log_solution = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nb; ++i) {
            if (i == slack) {
                s.v[i].push_back(vs_n);
            } else {
                const auto off = static_cast<std::size_t>(sys.offset_[i]);
                s.v[i].emplace_back(rhs[off], rhs[off + 1]);
                if (net.buses[i].kind == BusKind::PV) {
                    s.q[i].push_back(rhs[off + 2]);
                    lq[i].push_back(s.q[i].back().log10_abs());
                }
                log_solution = log10_sum(log_solution, log10_abs(s.v[i].back()));
            }
            lv[i].push_back(log10_abs(s.v[i].back()));
            // W[n] = -sum_{m=1}^{n} conj(V[m]) W[n-m]
            mp::Complex wn;
            for (std::size_t m = 1; m <= un; ++m) wn.add_conj_product(s.v[i][m], s.w[i][un - m]);
            s.w[i].push_back(-wn);
            lw[i].push_back(log10_abs(s.w[i].back()));
        }

        // Rounding error of the order-n solve relative to the solution size.
        if (std::isfinite(log_rhs_terms) && std::isfinite(log_solution)) {
            const double log_err = -static_cast<double>(sys.digits_) + sys.log10_cond_ + log_rhs_terms +
                                   std::log10(static_cast<double>(n));
            if (log_err - log_solution > budget)
                throw PrecisionExhausted("series order " + std::to_string(n) + ": estimated relative error 1e" +
                                         std::to_string(static_cast<int>(log_err - log_solution)) + " at " +
                                         std::to_string(sys.digits_) + " digits; raise the precision");
        }
        s.order = n;
    }
}

VoltageSeries compute(const EmbeddedSystem& sys, int order) {
    VoltageSeries s = germ(sys);
    extend(sys, s, order);
    return s;
}

void write_csv(std::ostream& out, const VoltageSeries& s) {
    out << "bus,order,re,im\n";
    for (std::size_t i = 0; i < s.ids.size(); ++i)
        for (std::size_t n = 0; n < s.v[i].size(); ++n)
            out << s.ids[i] << ',' << n << ',' << s.v[i][n].re.str() << ',' << s.v[i][n].im.str() << '\n';
}

}  // namespace helm::series
