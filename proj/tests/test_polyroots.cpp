#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helm/error.hpp"
#include "helm/polyroots.hpp"
#include "oracles.hpp"

using namespace helm;
using mp::Complex;

namespace {

double log10_abs(const Complex& z) { return std::max(z.re.log10_abs(), z.im.log10_abs()); }

// Largest distance (log10, relative to max(1, |r|)) from an expected root to
// its nearest computed root.
double worst_match(const std::vector<Complex>& expected, const std::vector<Complex>& got) {
    double worst = -1e9;
    for (const auto& r : expected) {
        double best = 1e9;
        for (const auto& g : got) best = std::min(best, log10_abs(g - r) - std::max(0.0, log10_abs(r)));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_SUITE("polyroots") {

TEST_CASE("integer roots 1..10") {
    mp::PrecisionScope scope(60);
    std::vector<Complex> roots;
    for (int k = 1; k <= 10; ++k) roots.emplace_back(static_cast<double>(k));
    const auto got = pade::aberth_roots(oracle::poly_from_roots(roots));
    REQUIRE(got.size() == 10);
    CHECK(worst_match(roots, got) < -40.0);
}

TEST_CASE("roots of unity") {
    mp::PrecisionScope scope(80);
    const int n = 64;
    std::vector<Complex> c(n + 1);
    c[0] = Complex(-1.0);
    c[n] = Complex(1.0);
    std::vector<Complex> roots;
    for (int k = 0; k < n; ++k) roots.emplace_back(std::polar(1.0, 2.0 * std::numbers::pi * k / n));
    const auto got = pade::aberth_roots(c);
    REQUIRE(got.size() == static_cast<std::size_t>(n));
    // expected roots are only double accurate
    CHECK(worst_match(roots, got) < -14.0);
    for (const auto& z : got) CHECK(std::fabs(std::abs(z.to_std()) - 1.0) < 1e-15);
}

TEST_CASE("roots spread over twenty decades") {
    mp::PrecisionScope scope(80);
    const std::vector<Complex> roots{Complex(1e-10), Complex(1.0, 1.0), Complex(-3.0), Complex(0.0, 1e10)};
    CHECK(worst_match(roots, pade::aberth_roots(oracle::poly_from_roots(roots))) < -40.0);
}

TEST_CASE("clustered roots") {
    mp::PrecisionScope scope(100);
    std::vector<Complex> roots;
    for (int k = 0; k < 8; ++k) roots.emplace_back(1.0 + 1e-6 * k, 1e-6 * (k % 3));
    CHECK(worst_match(roots, pade::aberth_roots(oracle::poly_from_roots(roots))) < -40.0);
}

TEST_CASE("small degrees and errors") {
    mp::PrecisionScope scope(60);
    CHECK(pade::aberth_roots(std::vector<Complex>{}).empty());
    CHECK(pade::aberth_roots(std::vector<Complex>{Complex(2.0)}).empty());
    const auto lin = pade::aberth_roots(std::vector<Complex>{Complex(-2.0), Complex(4.0)});
    REQUIRE(lin.size() == 1);
    CHECK(std::abs(lin[0].to_std() - 0.5) < 1e-50);
    CHECK_THROWS_AS(pade::aberth_roots(std::vector<Complex>{Complex(1.0), Complex(1.0), Complex()}),
                    RootFindingStalled);
}

}  // TEST_SUITE
