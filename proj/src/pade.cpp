#include "helm/pade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "helm/error.hpp"
#include "helm/polyroots.hpp"

namespace helm::pade {
namespace {

double log10_abs(const mp::Complex& z) {
    const double a = z.re.log10_abs(), b = z.im.log10_abs();
    if (!std::isfinite(a) && !std::isfinite(b)) return -std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + 0.5 * std::log10(1.0 + std::pow(10.0, 2.0 * (lo - hi)));
}

// Solves A x = rhs for a dense complex matrix by Gaussian elimination with
// partial pivoting. Returns false when a pivot falls below `tiny`.
bool dense_solve(std::vector<mp::Complex> a, std::vector<mp::Complex>& rhs, std::size_t n, double log_tiny) {
    auto at = [&](std::size_t r, std::size_t c) -> mp::Complex& { return a[r * n + c]; };
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = log10_abs(at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = log10_abs(at(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > log_tiny)) return false;
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(at(col, c), at(piv, c));
            std::swap(rhs[col], rhs[piv]);
        }
        const mp::Complex inv = mp::Complex(1.0) / at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (at(r, col).is_zero()) continue;
            const mp::Complex f = -(at(r, col) * inv);
            for (std::size_t c = col + 1; c < n; ++c) at(r, c).add_product(f, at(col, c));
            rhs[r].add_product(f, rhs[col]);
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        mp::Complex acc = rhs[r];
        for (std::size_t c = r + 1; c < n; ++c) acc.add_product(-at(r, c), rhs[c]);
        rhs[r] = acc / at(r, r);
    }
    return true;
}

// Levinson-type O(n^2) solve of sum_j r[n-1+i-j] x[j] = y[i], i = 0..n-1.
// Fails on a vanishing leading principal minor; the caller verifies the
// residual, since the recursion is not backward stable in general.
bool levinson_solve(const std::vector<mp::Complex>& r, const std::vector<mp::Complex>& y,
                    std::vector<mp::Complex>& x, double log_tiny) {
    const std::size_t n = y.size();
    x.assign(n, mp::Complex());
    if (n == 0) return true;
    const std::size_t n1 = n - 1;
    auto tiny = [&](const mp::Complex& v) { return !(log10_abs(v) > log_tiny); };
    if (tiny(r[n1])) return false;
    x[0] = y[0] / r[n1];
    if (n1 == 0) return true;
    std::vector<mp::Complex> g(n1), h(n1);
    g[0] = r[n1 - 1] / r[n1];
    h[0] = r[n1 + 1] / r[n1];
    mp::Complex sxn, sd, sgn, shn, sgd, pt1, pt2, qt1, qt2;
    for (std::size_t m = 0; m < n; ++m) {
        const std::size_t m1 = m + 1;
        sxn = -y[m1];
        sd = -r[n1];
        for (std::size_t j = 0; j <= m; ++j) {
            sxn.add_product(r[n1 + m1 - j], x[j]);
            sd.add_product(r[n1 + m1 - j], g[m - j]);
        }
        if (tiny(sd)) return false;
        x[m1] = sxn / sd;
        const mp::Complex neg = -x[m1];
        for (std::size_t j = 0; j <= m; ++j) x[j].add_product(neg, g[m - j]);
        if (m1 == n1) return true;
        sgn = -r[n1 - m1 - 1];
        shn = -r[n1 + m1 + 1];
        sgd = -r[n1];
        for (std::size_t j = 0; j <= m; ++j) {
            sgn.add_product(r[n1 + j - m1], g[j]);
            shn.add_product(r[n1 + m1 - j], h[j]);
            sgd.add_product(r[n1 + j - m1], h[m - j]);
        }
        if (tiny(sgd)) return false;
        g[m1] = sgn / sgd;
        h[m1] = shn / sd;
        const mp::Complex pp = -g[m1], qq = -h[m1];
        std::size_t k = m;
        for (std::size_t j = 0; j < (m + 2) / 2; ++j, --k) {
            pt1 = g[j];
            pt2 = g[k];
            qt1 = h[j];
            qt2 = h[k];
            g[j].add_product(pp, qt2);
            g[k] = pt2;
            g[k].add_product(pp, qt1);
            h[j].add_product(qq, pt2);
            h[k] = qt2;
            h[k].add_product(qq, pt1);
        }
    }
    return false;
}

// Drops highest-degree coefficients that are negligible on the natural
// scale of the series.
std::vector<mp::Complex> trimmed(const std::vector<mp::Complex>& c, double scale, unsigned digits) {
    double hi = -std::numeric_limits<double>::infinity();
    const double log_scale = std::log10(scale);
    for (std::size_t k = 0; k < c.size(); ++k) hi = std::max(hi, log10_abs(c[k]) + k * log_scale);
    std::size_t keep = c.size();
    const double cut = hi - 0.75 * digits;
    while (keep > 0 && !(log10_abs(c[keep - 1]) + (keep - 1) * log_scale > cut)) --keep;
    return {c.begin(), c.begin() + static_cast<std::ptrdiff_t>(keep)};
}

}  // namespace

PadeApproximant pade(std::span<const mp::Complex> coeffs, int m) {
    if (m < 0) throw DegenerateTable("negative Padé order");
    const auto um = static_cast<std::size_t>(m);
    if (coeffs.size() < 2 * um + 1)
        throw DegenerateTable("PA[" + std::to_string(m) + "/" + std::to_string(m) + "] needs " +
                              std::to_string(2 * m + 1) + " coefficients, got " + std::to_string(coeffs.size()));
    const unsigned digits = std::max(coeffs[0].re.digits(), mp::working_digits());
    mp::PrecisionScope scope(digits);

    // Normalize z -> rho z so the coefficients are of comparable size.
    double rho = 1.0;
    {
        const double l0 = log10_abs(coeffs[0]);
        const double ln = log10_abs(coeffs[2 * um]);
        if (m > 0 && std::isfinite(l0) && std::isfinite(ln)) rho = std::pow(10.0, (l0 - ln) / (2.0 * m));
        if (!std::isfinite(rho) || rho <= 0.0) rho = 1.0;
    }
    const mp::Real mp_rho(rho);
    std::vector<mp::Complex> c(2 * um + 1);
    {
        mp::Real pw(1);
        for (std::size_t k = 0; k <= 2 * um; ++k) {
            c[k] = coeffs[k] * pw;
            pw *= mp_rho;
        }
    }
    double log_scale = -std::numeric_limits<double>::infinity();
    for (const auto& x : c) log_scale = std::max(log_scale, log10_abs(x));
    if (!std::isfinite(log_scale)) log_scale = 0.0;
    const double log_tiny = log_scale - static_cast<double>(digits) + 15.0;
    const double log_resid_tol = log_scale - 0.6 * static_cast<double>(digits);
    auto coef = [&](long k) { return k < 0 ? mp::Complex() : c[static_cast<std::size_t>(k)]; };

    std::vector<mp::Complex> b;
    int degree = -1;
    {
        // Fast path: O(m^2) recursion, accepted only with a small residual.
        std::vector<mp::Complex> r(um > 0 ? 2 * um - 1 : 0), y(um), x;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = c[i + 1];
        for (std::size_t i = 0; i < um; ++i) y[i] = -c[um + i + 1];
        if (um > 0 && levinson_solve(r, y, x, log_tiny)) {
            double worst = -std::numeric_limits<double>::infinity(), log_x = worst;
            for (const auto& v : x) log_x = std::max(log_x, log10_abs(v));
            for (std::size_t i = 0; i < um; ++i) {
                mp::Complex res = -y[i];
                for (std::size_t j = 0; j < um; ++j) res.add_product(r[um - 1 + i - j], x[j]);
                worst = std::max(worst, log10_abs(res));
            }
            if (worst <= std::max(log_x, 0.0) + log_scale - static_cast<double>(digits) + 20.0) {
                b.assign(um + 1, mp::Complex());
                b[0] = mp::Complex(1.0);
                for (std::size_t j = 0; j < um; ++j) b[j + 1] = std::move(x[j]);
                degree = m;
            }
        }
    }
    for (int L = m; L >= 0 && degree < 0; --L) {
        const auto uL = static_cast<std::size_t>(L);
        std::vector<mp::Complex> a(uL * uL), rhs(uL);
        for (std::size_t k = 1; k <= uL; ++k) {
            for (std::size_t j = 1; j <= uL; ++j) a[(k - 1) * uL + (j - 1)] = coef(static_cast<long>(um + k - j));
            rhs[k - 1] = -coef(static_cast<long>(um + k));
        }
        if (!dense_solve(std::move(a), rhs, uL, log_tiny)) continue;
        std::vector<mp::Complex> cand(uL + 1);
        cand[0] = mp::Complex(1.0);
        for (std::size_t j = 1; j <= uL; ++j) cand[j] = rhs[j - 1];
        // A smaller block is only valid when it also satisfies the
        // equations it did not use.
        bool ok = true;
        for (std::size_t k = uL + 1; k <= um && ok; ++k) {
            mp::Complex r;
            for (std::size_t j = 0; j <= uL; ++j) r.add_product(cand[j], coef(static_cast<long>(um + k - j)));
            ok = log10_abs(r) <= log_resid_tol;
        }
        if (!ok) break;
        b = std::move(cand);
        degree = L;
        break;
    }
    if (degree < 0)
        throw DegenerateTable("Toeplitz system of PA[" + std::to_string(m) + "/" + std::to_string(m) +
                              "] is singular at " + std::to_string(digits) +
                              " digits; reduce the order or raise the precision");

    PadeApproximant pa;
    pa.m = m;
    pa.digits = digits;
    pa.scale = rho;
    pa.den_degree = degree;
    pa.den.assign(um + 1, mp::Complex());
    pa.num.assign(um + 1, mp::Complex());
    for (std::size_t j = 0; j < b.size(); ++j) pa.den[j] = b[j];
    for (std::size_t i = 0; i <= um; ++i) {
        mp::Complex acc;
        for (std::size_t j = 0; j <= std::min<std::size_t>(i, b.size() - 1); ++j) acc.add_product(b[j], c[i - j]);
        pa.num[i] = acc;
    }
    // Undo the normalization: coefficient k scales by rho^-k.
    mp::Real inv(1);
    const mp::Real inv_rho = mp::Real(1) / mp_rho;
    for (std::size_t k = 0; k <= um; ++k) {
        pa.num[k] *= inv;
        pa.den[k] *= inv;
        inv *= inv_rho;
    }
    return pa;
}

mp::Complex eval(const PadeApproximant& pa, const mp::Complex& z) {
    mp::PrecisionScope scope(std::max(pa.digits, mp::working_digits()));
    auto horner = [&](const std::vector<mp::Complex>& c, mp::Real& mag) {
        mp::Complex acc;
        mag = mp::Real(0);
        const mp::Real az = mp::abs(z);
        for (std::size_t k = c.size(); k-- > 0;) {
            acc = acc * z + c[k];
            mag = mag * az + mp::abs(c[k]);
        }
        return acc;
    };
    mp::Real num_mag, den_mag;
    const mp::Complex n = horner(pa.num, num_mag);
    const mp::Complex d = horner(pa.den, den_mag);
    const double log_d = log10_abs(d);
    if (!(log_d > den_mag.log10_abs() - 0.5 * static_cast<double>(pa.digits)))
        throw PoleAtPoint("denominator of PA[" + std::to_string(pa.m) + "/" + std::to_string(pa.m) +
                          "] vanishes at the evaluation point");
    return n / d;
}

bool on_positive_axis(std::complex<double> z) {
    return std::fabs(z.imag()) < 1e-6 * (1.0 + std::abs(z)) && z.real() > 0.0;
}

ZeroPoleSet roots(const PadeApproximant& pa) {
    mp::PrecisionScope scope(std::max(pa.digits, mp::working_digits()));
    ZeroPoleSet zp;
    const auto num = trimmed(pa.num, pa.scale, pa.digits);
    const auto den = trimmed(pa.den, pa.scale, pa.digits);
    if (num.size() > 1) zp.zeros = aberth_roots(num);
    if (den.size() > 1) zp.poles = aberth_roots(den);
    zp.zero_spurious.assign(zp.zeros.size(), false);
    zp.pole_spurious.assign(zp.poles.size(), false);

    const double log_pair = -static_cast<double>(pa.digits) / 4.0;
    for (std::size_t i = 0; i < zp.zeros.size(); ++i) {
        for (std::size_t j = 0; j < zp.poles.size(); ++j) {
            const mp::Complex diff = zp.zeros[i] - zp.poles[j];
            // distance relative to the root size, so the test is scale-free
            const double rel = log10_abs(diff) - std::max(0.0, log10_abs(zp.poles[j]));
            if (rel < log_pair) {
                zp.zero_spurious[i] = true;
                zp.pole_spurious[j] = true;
            }
        }
    }
    zp.branch_point = branch_point(zp);
    return zp;
}

std::optional<double> branch_point_of(const PadeApproximant& pa) {
    mp::PrecisionScope scope(std::max(pa.digits, mp::working_digits()));
    const auto den = trimmed(pa.den, pa.scale, pa.digits);
    if (den.size() <= 1) return std::nullopt;
    ZeroPoleSet zp;
    zp.poles = aberth_roots(den);
    zp.pole_spurious.assign(zp.poles.size(), false);
    // Only poles near the axis can enter the estimate, so the doublet test
    // is done locally: a numerator root within the doublet distance shows
    // up as a tiny Newton correction of the numerator at the pole.
    const double log_pair = -static_cast<double>(pa.digits) / 4.0;
    mp::Complex n, dn;
    for (std::size_t j = 0; j < zp.poles.size(); ++j) {
        const auto p = zp.poles[j].to_std();
        if (!(p.real() > 0.0 && std::fabs(p.imag()) < kClusterAngle * std::abs(p))) continue;
        n = mp::Complex();
        dn = mp::Complex();
        for (std::size_t k = pa.num.size(); k-- > 0;) {
            dn = dn * zp.poles[j] + n;
            n = n * zp.poles[j] + pa.num[k];
        }
        if (dn.is_zero()) continue;
        const double rel = log10_abs(n / dn) - std::max(0.0, log10_abs(zp.poles[j]));
        if (rel < log_pair) zp.pole_spurious[j] = true;
    }
    return branch_point(zp);
}

std::optional<double> branch_point(const ZeroPoleSet& zp) {
    // Series with complex coefficients have no reflection symmetry, so the
    // pole cluster leaves the branch point slightly off the axis; accept
    // poles within a small angle of it.
    std::vector<double> axis;
    for (std::size_t j = 0; j < zp.poles.size(); ++j) {
        if (zp.pole_spurious[j]) continue;
        const auto p = zp.poles[j].to_std();
        if (p.real() > 0.0 && std::fabs(p.imag()) < kClusterAngle * std::abs(p)) axis.push_back(p.real());
    }
    if (axis.size() < 2) return std::nullopt;
    std::sort(axis.begin(), axis.end());
    const double p1 = axis[0], p2 = axis[1];
    if (axis.size() >= 3) {
        // Edge law p_k ~ c + A (k + d)^2 with d = b/2 - 1/4 for a singularity
        // (c - z)^b: d = 0 for a square-root zero, d = -1/2 for an inverse
        // square root. The spacing of three poles picks the type; the fitted
        // offset itself carries an O(1/m) bias, so it is only used to choose.
        const double d1 = p2 - p1, d2 = axis[2] - p2;
        if (d1 > 0.0 && d2 > d1) {
            const double r = d2 / d1;
            const double fitted = (5.0 - 3.0 * r) / (2.0 * r - 2.0);
            if (fitted > -1.0 && fitted < 1.0) {
                const double d = fitted > -0.4 ? 0.0 : -0.5;
                const double a = d1 / (3.0 + 2.0 * d);
                const double c = p1 - a * (1.0 + d) * (1.0 + d);
                if (c > 0.0) return c;
            }
        }
    }
    return p1;
}

ConvergenceVerdict assess(std::span<const mp::Complex> coeffs, std::span<const int> orders, double tol) {
    ConvergenceVerdict v;
    const mp::Complex one(1.0);
    for (int m : orders) {
        const auto pa = pade(coeffs, m);
        v.orders_used.push_back(m);
        try {
            v.values.push_back(eval(pa, one).to_std());
        } catch (const PoleAtPoint&) {
            // a pole sitting on z = 1 is no evidence of convergence
            const double nan = std::numeric_limits<double>::quiet_NaN();
            v.values.emplace_back(nan, nan);
        }
        if (v.values.size() >= 2) v.deltas.push_back(std::abs(v.values.back() - v.values[v.values.size() - 2]));
    }
    if (!v.deltas.empty() && v.deltas.back() < tol) {  // false for NaN
        v.status = ConvergenceVerdict::Status::Converged;
        v.value = v.values.back();
        std::size_t k = v.deltas.size();
        while (k > 0 && v.deltas[k - 1] < tol) --k;
        v.converged_from = v.orders_used[k];
    }
    return v;
}

std::vector<ConvergenceVerdict> assess(const series::VoltageSeries& s, std::span<const int> orders, double tol) {
    std::vector<ConvergenceVerdict> out;
    out.reserve(s.v.size());
    for (const auto& coeffs : s.v) out.push_back(assess(coeffs, orders, tol));
    return out;
}

void write_zero_pole_csv(std::ostream& out, const ZeroPoleSet& zp) {
    out << "kind,re,im,spurious\n";
    auto emit = [&](const char* kind, const std::vector<mp::Complex>& pts, const std::vector<bool>& flags) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            out << kind << ',' << pts[i].re.str(20) << ',' << pts[i].im.str(20) << ','
                << (flags[i] ? "true" : "false") << '\n';
    };
    emit("zero", zp.zeros, zp.zero_spurious);
    emit("pole", zp.poles, zp.pole_spurious);
}

void write_zero_pole_svg(std::ostream& out, const ZeroPoleSet& zp, const std::string& title) {
    // Window: the unit point and the branch point, padded; far roots are
    // left out of the picture as in a zoomed figure.
    double extent = 2.0;
    if (zp.branch_point) extent = std::max(extent, 2.0 * *zp.branch_point);
    const double size = 600.0, pad = 40.0;
    auto sx = [&](double x) { return pad + (x + extent) / (2.0 * extent) * (size - 2 * pad); };
    auto sy = [&](double y) { return size - pad - (y + extent) / (2.0 * extent) * (size - 2 * pad); };
    auto inside = [&](std::complex<double> z) { return std::fabs(z.real()) <= extent && std::fabs(z.imag()) <= extent; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    out << "<title>" << title << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << sx(-extent) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(extent) << "\" y2=\"" << sy(0)
        << "\" stroke=\"#999\"/>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(-extent) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(extent)
        << "\" stroke=\"#999\"/>\n";
    for (std::size_t i = 0; i < zp.zeros.size(); ++i) {
        const auto z = zp.zeros[i].to_std();
        if (!inside(z)) continue;
        out << "<circle cx=\"" << sx(z.real()) << "\" cy=\"" << sy(z.imag()) << "\" r=\"3\" fill=\"none\" stroke=\""
            << (zp.zero_spurious[i] ? "#aaa" : "blue") << "\"/>\n";
    }
    for (std::size_t i = 0; i < zp.poles.size(); ++i) {
        const auto p = zp.poles[i].to_std();
        if (!inside(p)) continue;
        const double x = sx(p.real()), y = sy(p.imag());
        const char* colour = zp.pole_spurious[i] ? "#aaa" : "red";
        out << "<path d=\"M" << x - 3 << ' ' << y - 3 << " L" << x + 3 << ' ' << y + 3 << " M" << x - 3 << ' '
            << y + 3 << " L" << x + 3 << ' ' << y - 3 << "\" stroke=\"" << colour << "\"/>\n";
    }
    out << "<rect x=\"" << sx(1.0) - 4 << "\" y=\"" << sy(0.0) - 4
        << "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"green\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << sx(1.0) + 6 << "\" y=\"" << sy(0.0) - 6 << "\" font-size=\"12\">z=1</text>\n";
    out << "</svg>\n";
}

}  // namespace helm::pade
