#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "helm/error.hpp"
#include "helm/pade.hpp"
#include "helm/series.hpp"
#include "oracles.hpp"

using namespace helm;
using mp::Complex;
using mp::Real;

namespace {

double log10_abs(const Complex& z) {
    const double a = z.re.log10_abs(), b = z.im.log10_abs();
    return std::max(a, b);
}

std::vector<Complex> ones(int n) { return std::vector<Complex>(static_cast<std::size_t>(n) + 1, Complex(1.0)); }

// Number of poles within distance d of x.
int poles_near(const pade::ZeroPoleSet& zp, double x, double d) {
    int count = 0;
    for (std::size_t j = 0; j < zp.poles.size(); ++j)
        if (!zp.pole_spurious[j] && std::abs(zp.poles[j].to_std() - x) < d) ++count;
    return count;
}

}  // namespace

TEST_SUITE("pade") {

TEST_CASE("PA[1/1] of 1/(1-z) is exact") {
    mp::PrecisionScope scope(60);
    const auto pa = pade::pade(ones(2), 1);
    CHECK(pa.den_degree == 1);
    CHECK(std::abs(pa.num[0].to_std() - 1.0) < 1e-50);
    CHECK(std::abs(pa.num[1].to_std()) < 1e-50);
    CHECK(std::abs(pa.den[0].to_std() - 1.0) < 1e-50);
    CHECK(std::abs(pa.den[1].to_std() + 1.0) < 1e-50);
    CHECK(std::abs(pade::eval(pa, Complex(0.5)).to_std() - 2.0) < 1e-50);
    CHECK_THROWS_AS(pade::eval(pa, Complex(1.0)), PoleAtPoint);

    const auto zp = pade::roots(pa);
    REQUIRE(zp.poles.size() == 1);
    CHECK(std::abs(zp.poles[0].to_std() - 1.0) < 1e-40);
    CHECK(zp.zeros.empty());
}

TEST_CASE("value at the origin is the leading coefficient") {
    mp::PrecisionScope scope(80);
    const auto c = oracle::binomial_series(Real(1) / Real(3), 0.7, 20);
    const auto pa = pade::pade(c, 10);
    CHECK(std::abs(pade::eval(pa, Complex()).to_std() - c[0].to_std()) < 1e-60);
}

TEST_CASE("1/sqrt(1-z) is reproduced through order 2m") {
    const int m = 30;
    mp::PrecisionScope scope(mp::digits_for_half_order(m));
    const auto c = oracle::binomial_series(Real(-1) / Real(2), 1.0, 2 * m);
    const auto pa = pade::pade(c, m);
    const auto back = oracle::rational_taylor(pa.num, pa.den, 2 * m);
    for (int k = 0; k <= 2 * m; ++k) CHECK(log10_abs(back[k] - c[k]) < -40.0);
}

TEST_CASE("Taylor match through order 2m on random series") {
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int m : {4, 12, 25}) {
        const unsigned digits = mp::digits_for_half_order(m);
        mp::PrecisionScope scope(digits);
        std::vector<Complex> c;
        for (int k = 0; k <= 2 * m; ++k) c.emplace_back(g(rng), g(rng));
        const auto pa = pade::pade(c, m);
        CHECK(std::abs(pa.den[0].to_std() - 1.0) < 1e-30);
        const auto back = oracle::rational_taylor(pa.num, pa.den, 2 * m);
        double worst = -1e9;
        for (int k = 0; k <= 2 * m; ++k) worst = std::max(worst, log10_abs(back[k] - c[k]));
        CAPTURE(m);
        // the precision policy budgets 2.5 digits of Toeplitz conditioning per half-order
        CHECK(worst < -static_cast<double>(digits) + 2.5 * m);
    }
}

TEST_CASE("rational functions are recovered exactly") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> radius(0.5, 2.0), angle(0.0, 6.283185307179586), coef(-1.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const int m = 3 + trial;
        const unsigned digits = mp::digits_for_half_order(m);
        mp::PrecisionScope scope(digits);
        std::vector<Complex> poles;
        for (int j = 0; j < m; ++j) poles.emplace_back(std::polar(radius(rng), angle(rng)));
        // den(z) = prod (1 - z/p_j), num random of degree m
        auto den = oracle::poly_from_roots(poles);
        const Complex lead = den[0];
        for (auto& d : den) d = d / lead;
        std::vector<Complex> num;
        for (int j = 0; j <= m; ++j) num.emplace_back(coef(rng), coef(rng));
        const auto c = oracle::rational_taylor(num, den, 2 * m);
        const auto pa = pade::pade(c, m);
        const auto zp = pade::roots(pa);
        REQUIRE(zp.poles.size() == poles.size());
        for (const auto& p : poles) {
            double best = 1e9;
            for (const auto& q : zp.poles) best = std::min(best, log10_abs(q - p));
            CAPTURE(trial);
            CHECK(best < -static_cast<double>(digits) / 2.0);
        }
    }
}

TEST_CASE("cut of 1/sqrt(1-z): real poles beyond 1 interlacing with zeros") {
    const int m = 30;
    mp::PrecisionScope scope(mp::digits_for_half_order(m));
    const auto zp = pade::roots(pade::pade(oracle::binomial_series(Real(-1) / Real(2), 1.0, 2 * m), m));
    std::vector<double> p, z;
    for (std::size_t j = 0; j < zp.poles.size(); ++j) {
        if (zp.pole_spurious[j]) continue;
        const auto v = zp.poles[j].to_std();
        CHECK(std::fabs(v.imag()) < 1e-20 * std::abs(v));
        CHECK(v.real() > 1.0);
        p.push_back(v.real());
    }
    for (std::size_t j = 0; j < zp.zeros.size(); ++j)
        if (!zp.zero_spurious[j]) z.push_back(zp.zeros[j].to_std().real());
    std::sort(p.begin(), p.end());
    std::sort(z.begin(), z.end());
    REQUIRE(p.size() >= 2);
    // between consecutive poles lies exactly one zero
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        const auto n = std::count_if(z.begin(), z.end(), [&](double x) { return x > p[k] && x < p[k + 1]; });
        CHECK(n == 1);
    }
}

TEST_CASE("branch point of 1/sqrt(1-z)") {
    mp::PrecisionScope scope(mp::digits_for_half_order(30));
    const auto zp = pade::roots(pade::pade(oracle::binomial_series(Real(-1) / Real(2), 1.0, 60), 30));
    REQUIRE(zp.branch_point.has_value());
    CHECK(std::fabs(*zp.branch_point - 1.0) < 1e-3);
}

TEST_CASE("branch point of (1 - z/c)^(-1/2)") {
    for (double c : {0.8, 1.0, 1.25}) {
        mp::PrecisionScope scope(mp::digits_for_half_order(30));
        const auto bp = pade::roots(pade::pade(oracle::binomial_series(Real(-1) / Real(2), c, 60), 30)).branch_point;
        CAPTURE(c);
        REQUIRE(bp.has_value());
        CHECK(std::fabs(*bp - c) < 1e-3);
    }
}

TEST_CASE("branch point of (1 - z/c)^(1/2)") {
    for (double c : {0.8, 1.0, 1.25}) {
        for (int m : {30, 40}) {
            mp::PrecisionScope scope(mp::digits_for_half_order(m));
            const auto pa = pade::pade(oracle::binomial_series(Real(1) / Real(2), c, 2 * m), m);
            const auto bp = pade::roots(pa).branch_point;
            CAPTURE(c);
            CAPTURE(m);
            REQUIRE(bp.has_value());
            CHECK(std::fabs(*bp - c) < 1e-3);
            const auto quick = pade::branch_point_of(pa);
            REQUIRE(quick.has_value());
            CHECK(std::fabs(*quick - *bp) < 1e-12);
        }
    }
}

TEST_CASE("pole density at the branch point grows with the order") {
    for (double c : {0.8, 1.0, 1.25}) {
        int previous = -1;
        for (int m : {10, 20, 30, 40}) {
            mp::PrecisionScope scope(mp::digits_for_half_order(m));
            const auto zp = pade::roots(pade::pade(oracle::binomial_series(Real(1) / Real(2), c, 2 * m), m));
            const int count = poles_near(zp, c, c);
            CAPTURE(c);
            CAPTURE(m);
            CHECK(count >= previous);
            previous = count;
        }
    }
}

TEST_CASE("entire function has no branch point") {
    mp::PrecisionScope scope(mp::digits_for_half_order(20));
    const auto zp = pade::roots(pade::pade(oracle::exp_series(40), 20));
    CHECK_FALSE(zp.branch_point.has_value());
}

TEST_CASE("roots of real series come in conjugate pairs") {
    mp::PrecisionScope scope(mp::digits_for_half_order(20));
    const auto zp = pade::roots(pade::pade(oracle::exp_series(40), 20));
    for (const auto* set : {&zp.zeros, &zp.poles}) {
        for (const auto& r : *set) {
            double best = 1e9;
            for (const auto& s : *set) best = std::min(best, std::abs(std::conj(r.to_std()) - s.to_std()));
            CHECK(best < 1e-30);
        }
    }
}

TEST_CASE("degenerate Toeplitz systems") {
    mp::PrecisionScope scope(60);
    // 1 + z^4: PA[2/2] has no consistent solution
    std::vector<Complex> c{Complex(1.0), Complex(), Complex(), Complex(), Complex(1.0)};
    CHECK_THROWS_AS(pade::pade(c, 2), DegenerateTable);
    CHECK_THROWS_AS(pade::pade(c, 3), DegenerateTable);  // too few coefficients
    // a polynomial reduces to a lower-degree denominator
    std::vector<Complex> poly{Complex(1.0), Complex(2.0), Complex(), Complex(), Complex()};
    const auto pa = pade::pade(poly, 2);
    CHECK(pa.den_degree == 0);
    CHECK(std::abs(pade::eval(pa, Complex(1.0)).to_std() - 3.0) < 1e-40);
}

TEST_CASE("positive axis test") {
    CHECK(pade::on_positive_axis({1.5, 0.0}));
    CHECK(pade::on_positive_axis({1.5, 1e-7}));
    CHECK_FALSE(pade::on_positive_axis({1.5, 1e-3}));
    CHECK_FALSE(pade::on_positive_axis({-1.5, 0.0}));
}

TEST_CASE("convergence assessment") {
    mp::PrecisionScope scope(60);
    const std::vector<int> orders{1, 2, 3};
    const auto v = pade::assess(ones(7), orders, 5e-5);
    // 1/(1 - z) is singular at 1, so every order hits the pole
    CHECK(v.status == pade::ConvergenceVerdict::Status::Diverged);

    // 1/(2 - z) is a degree-1 rational function
    std::vector<Complex> half;
    Real a = Real(1) / Real(2);
    for (int k = 0; k <= 6; ++k) {
        half.emplace_back(a);
        a = a / Real(2);
    }
    const auto w = pade::assess(half, orders, 5e-5);
    CHECK(w.status == pade::ConvergenceVerdict::Status::Converged);
    REQUIRE(w.converged_from.has_value());
    CHECK(*w.converged_from == 1);
    for (double d : w.deltas) CHECK(d < 1e-40);
    CHECK(std::abs(*w.value - 1.0) < 1e-40);
}

TEST_CASE("assessment of the seven-bus voltages") {
    const std::vector<int> orders{20, 30, 40, 50, 60};
    auto run = [&](double p6) {
        const auto net = with_parameter(builtin_network("paper-7bus"), ParameterRef::parse("bus6.p"), p6);
        const unsigned digits = mp::digits_for_half_order(60);
        mp::PrecisionScope scope(digits);
        const auto s = series::compute(series::embed(net, digits), 120);
        return std::make_pair(s.ids, pade::assess(s, orders, 5e-5));
    };
    const auto [ids, base] = run(1.0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        CHECK(base[i].status == pade::ConvergenceVerdict::Status::Converged);
        CHECK(base[i].orders_used == orders);
    }
    const auto bus1 = std::find(ids.begin(), ids.end(), 1) - ids.begin();
    CHECK(std::abs(*base[bus1].value) == doctest::Approx(0.5657).epsilon(1e-4));

    const auto [ids2, over] = run(1.12);
    int diverged = 0;
    for (std::size_t i = 0; i < ids2.size(); ++i)
        if (over[i].status == pade::ConvergenceVerdict::Status::Diverged) ++diverged;
    CHECK(diverged >= 4);
}

TEST_CASE("zero-pole outputs") {
    mp::PrecisionScope scope(60);
    const auto zp = pade::roots(pade::pade(oracle::binomial_series(Real(1) / Real(2), 1.0, 20), 10));
    std::ostringstream csv, svg;
    pade::write_zero_pole_csv(csv, zp);
    const auto text = csv.str();
    CHECK(text.rfind("kind,re,im,spurious\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) ==
          1 + zp.zeros.size() + zp.poles.size());
    pade::write_zero_pole_svg(svg, zp, "test");
    CHECK(svg.str().find("<svg") != std::string::npos);
    CHECK(svg.str().find("</svg>") != std::string::npos);
}

}  // TEST_SUITE
