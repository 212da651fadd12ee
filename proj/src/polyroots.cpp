#include "helm/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "helm/error.hpp"

namespace helm::pade {
namespace {

struct HullPoint {
    int k;
    double logc;
};

// Upper convex hull of (k, log|c_k|); each edge gives a circle radius and
// the number of roots expected on it.
std::vector<std::pair<double, int>> newton_polygon_circles(std::span<const mp::Complex> c) {
    std::vector<HullPoint> pts;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        const double l = std::max(c[k].re.log10_abs(), c[k].im.log10_abs());
        if (std::isfinite(l)) pts.push_back({k, l});
    }
    std::vector<HullPoint> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.k - a.k) * (p.logc - a.logc) - (b.logc - a.logc) * (p.k - a.k);
            if (cross >= 0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    std::vector<std::pair<double, int>> circles;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const int count = hull[i + 1].k - hull[i].k;
        const double log_r = (hull[i].logc - hull[i + 1].logc) / count;
        circles.emplace_back(log_r, count);
    }
    return circles;
}

// p(z) and p'(z) by Horner, reusing `t` as scratch to avoid allocation.
void horner(std::span<const mp::Complex> c, const mp::Complex& z, mp::Complex& p, mp::Complex& dp, mp::Complex& t) {
    const std::size_t d = c.size() - 1;
    p = c[d];
    dp = mp::Complex();
    for (std::size_t k = d; k-- > 0;) {
        t.re = p.re;
        t.re.add_product(dp.re, z.re);
        t.re.sub_product(dp.im, z.im);
        t.im = p.im;
        t.im.add_product(dp.re, z.im);
        t.im.add_product(dp.im, z.re);
        swap(dp, t);
        t.re = c[k].re;
        t.re.add_product(p.re, z.re);
        t.re.sub_product(p.im, z.im);
        t.im = c[k].im;
        t.im.add_product(p.re, z.im);
        t.im.add_product(p.im, z.re);
        swap(p, t);
    }
}

double log10_abs_poly(std::span<const double> logc, double log_x) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < logc.size(); ++k) hi = std::max(hi, logc[k] + static_cast<double>(k) * log_x);
    double s = 0.0;
    for (std::size_t k = 0; k < logc.size(); ++k) s += std::pow(10.0, logc[k] + static_cast<double>(k) * log_x - hi);
    return hi + std::log10(s);
}

double log10_abs(const mp::Complex& z) {
    const double a = z.re.log10_abs(), b = z.im.log10_abs();
    if (!std::isfinite(a) && !std::isfinite(b)) return -std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + 0.5 * std::log10(1.0 + std::pow(10.0, 2.0 * (lo - hi)));
}

// Cheap first pass in double precision. Its roots are only used as
// starting points for the multiprecision iteration, so non-convergence is
// harmless; it returns false when double range does not suffice.
bool aberth_double(std::span<const mp::Complex> coeffs, std::vector<std::complex<double>>& z) {
    const std::size_t d = coeffs.size() - 1;
    std::vector<std::complex<double>> c(d + 1);
    for (std::size_t k = 0; k <= d; ++k) {
        c[k] = coeffs[k].to_std();
        if (!std::isfinite(c[k].real()) || !std::isfinite(c[k].imag())) return false;
        const double l = std::abs(c[k]);
        if (l != 0.0 && (l < 1e-280 || l > 1e280)) return false;
    }
    std::vector<bool> done(d, false);
    std::size_t remaining = d;
    int iter = 0;
    for (; iter < 500 && remaining > 0; ++iter) {
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            std::complex<double> p = c[d], dp = 0.0;
            double bound = std::abs(c[d]);
            const double az = std::abs(z[i]);
            for (std::size_t k = d; k-- > 0;) {
                dp = dp * z[i] + p;
                p = p * z[i] + c[k];
                bound = bound * az + std::abs(c[k]);
            }
            // at the rounding floor of Horner's rule nothing more is gained
            if (std::abs(p) <= 4e-16 * static_cast<double>(d) * bound) {
                done[i] = true;
                --remaining;
                continue;
            }
            const std::complex<double> ratio = p / dp;
            std::complex<double> sum = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                if (j != i && z[i] != z[j]) sum += 1.0 / (z[i] - z[j]);
            const std::complex<double> step = ratio / (1.0 - ratio * sum);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
            z[i] -= step;
            if (std::abs(step) <= 1e-14 * std::abs(z[i])) {
                done[i] = true;
                --remaining;
            }
        }
    }
    return true;
}

}  // namespace

namespace {

// Aberth-Ehrlich sweeps over `z` at the current working precision until
// every root sits at the rounding floor of its residual or has stopped
// moving. Returns the number of roots left unconverged.
std::size_t aberth_pass(std::span<const mp::Complex> coeffs, std::vector<mp::Complex>& z, int max_iter, RootStats& st) {
    const std::size_t d = z.size();
    const double log_eps = -static_cast<double>(mp::working_digits());
    std::vector<double> logc(d + 1);
    for (std::size_t k = 0; k <= d; ++k) logc[k] = log10_abs(coeffs[k]);
    std::vector<std::complex<double>> zd(d);
    for (std::size_t i = 0; i < d; ++i) zd[i] = z[i].to_std();

    std::vector<bool> done(d, false);
    std::size_t remaining = d;
    mp::Complex p, dp, t;
    const mp::Complex one(1.0);
    for (int iter = 0; iter < max_iter && remaining > 0; ++iter) {
        ++st.iterations;
        st.max_relative_step = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            horner(coeffs, z[i], p, dp, t);
            const double log_zi = log10_abs(z[i]);
            const double log_p = log10_abs(p);
            const double log_bound = log_eps + std::log10(4.0 * static_cast<double>(d)) +
                                     log10_abs_poly(logc, std::isfinite(log_zi) ? log_zi : -300.0);
            if (!std::isfinite(log_p) || log_p <= log_bound) {
                done[i] = true;
                --remaining;
                continue;
            }
            const mp::Complex ratio = p / dp;
            // The Aberth sum only perturbs the Newton step by ratio * sum, so
            // double precision is enough unless two roots nearly coincide.
            std::complex<double> sum = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                if (j == i) continue;
                const std::complex<double> diff = zd[i] - zd[j];
                if (std::abs(diff) > 1e-6 * std::abs(zd[i])) {
                    sum += 1.0 / diff;
                } else {
                    const mp::Complex exact = z[i] - z[j];
                    if (!exact.is_zero()) sum += (one / exact).to_std();
                }
            }
            const mp::Complex step = ratio / (one - ratio * mp::Complex(sum));
            z[i] -= step;
            zd[i] = z[i].to_std();
            const double rel = log10_abs(step) - (std::isfinite(log_zi) ? log_zi : 0.0);
            st.max_relative_step = std::max(st.max_relative_step, std::pow(10.0, std::min(rel, 300.0)));
            if (rel < log_eps + 3) {
                done[i] = true;
                --remaining;
            }
        }
    }
    return remaining;
}

}  // namespace

std::vector<mp::Complex> aberth_roots(std::span<const mp::Complex> coeffs, RootStats* stats) {
    if (coeffs.empty()) return {};
    const std::size_t d = coeffs.size() - 1;
    if (d == 0) return {};
    if (coeffs[d].is_zero()) throw RootFindingStalled("leading coefficient is zero");
    if (d == 1) return {-coeffs[0] / coeffs[1]};

    const unsigned digits = std::max(coeffs[d].re.digits(), mp::working_digits());
    mp::PrecisionScope scope(digits);

    // Starting points on the Newton-polygon circles.
    std::vector<mp::Complex> z;
    z.reserve(d);
    const auto circles = newton_polygon_circles(coeffs);
    const double two_pi = 6.283185307179586;
    const mp::Real ln10 = mp::log(mp::Real(10));
    for (std::size_t c = 0; c < circles.size(); ++c) {
        const auto [log_r, count] = circles[c];
        const mp::Real r = mp::exp(mp::Real(log_r) * ln10);
        for (int j = 0; j < count; ++j) {
            const double t = two_pi * j / count + 0.7 + 1.3 * static_cast<double>(c);
            z.emplace_back(mp::Real(std::cos(t)) * r, mp::Real(std::sin(t)) * r);
        }
    }
    {
        std::vector<std::complex<double>> zd(d);
        for (std::size_t i = 0; i < d; ++i) zd[i] = z[i].to_std();
        if (aberth_double(coeffs, zd)) {
            // the Aberth correction needs distinct starting points
            std::vector<std::complex<double>> sorted = zd;
            std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
                return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
            });
            if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end())
                for (std::size_t i = 0; i < d; ++i) z[i] = mp::Complex(zd[i]);
        }
    }

    const int max_iter = std::max(400, static_cast<int>(8 * d));
    RootStats st;
    // Most of the global convergence happens in a cheaper pass at a third
    // of the precision; the full-precision pass then only polishes.
    const unsigned coarse = std::max(40u, digits / 3);
    if (coarse < digits) {
        mp::PrecisionScope low(coarse);
        std::vector<mp::Complex> c(d + 1);
        for (std::size_t k = 0; k <= d; ++k) c[k] = mp::rounded(coeffs[k], coarse);
        for (auto& x : z) x = mp::rounded(x, coarse);
        aberth_pass(c, z, max_iter, st);
        for (auto& x : z) x = mp::rounded(x, digits);
    }
    const std::size_t remaining = aberth_pass(coeffs, z, max_iter, st);
    if (stats) *stats = st;
    if (remaining > 0)
        throw RootFindingStalled("Aberth iteration stalled: " + std::to_string(remaining) + " of " +
                                 std::to_string(d) + " roots unconverged after " + std::to_string(st.iterations) +
                                 " iterations, last relative step " + std::to_string(st.max_relative_step));
    return z;
}

}  // namespace helm::pade
