#include "helm/mp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace helm::mp {
namespace {

thread_local unsigned g_digits = 60;

mpfr_prec_t bits_for(unsigned digits) {
    // log2(10) ~ 3.3219; a few guard bits on top.
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 8;
}

}  // namespace

unsigned working_digits() noexcept { return g_digits; }

void set_working_digits(unsigned digits) {
    if (digits < 16) throw std::invalid_argument("working precision below 16 digits");
    g_digits = digits;
}

unsigned digits_for_half_order(int max_half_order) {
    const auto scaled = static_cast<unsigned>(std::ceil(2.5 * std::max(max_half_order, 0))) + 30;
    return std::max(60u, scaled);
}

PrecisionScope::PrecisionScope(unsigned digits) : saved_(g_digits) { set_working_digits(digits); }
PrecisionScope::~PrecisionScope() { g_digits = saved_; }

// --- Real -------------------------------------------------------------------

Real::Real() {
    mpfr_init2(v_, bits_for(g_digits));
    mpfr_set_zero(v_, 1);
}

Real::Real(WithBits, mpfr_prec_t bits) { mpfr_init2(v_, bits); }

Real::Real(double x) {
    mpfr_init2(v_, bits_for(g_digits));
    mpfr_set_d(v_, x, MPFR_RNDN);
}

Real::Real(int x) {
    mpfr_init2(v_, bits_for(g_digits));
    mpfr_set_si(v_, x, MPFR_RNDN);
}

Real::Real(long x) {
    mpfr_init2(v_, bits_for(g_digits));
    mpfr_set_si(v_, x, MPFR_RNDN);
}

Real::Real(std::string_view decimal) {
    mpfr_init2(v_, bits_for(g_digits));
    std::string s(decimal);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
        mpfr_clear(v_);
        throw std::invalid_argument("not a decimal number: " + s);
    }
}

Real::Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
    // Leave `o` valid: give it a fresh zero of the same precision.
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
    mpfr_set_zero(o.v_, 1);
}

Real& Real::operator=(const Real& o) {
    if (this != &o) {
        if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
}

Real& Real::operator=(double x) {
    mpfr_set_d(v_, x, MPFR_RNDN);
    return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real rounded(const Real& x, unsigned digits) {
    Real r(Real::WithBits{}, bits_for(digits));
    mpfr_set(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Complex rounded(const Complex& z, unsigned digits) { return {rounded(z.re, digits), rounded(z.im, digits)}; }

unsigned Real::digits() const {
    return static_cast<unsigned>(std::floor((mpfr_get_prec(v_) - 8) / 3.321928094887362));
}

std::string Real::str(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    const int n = digits > 0 ? digits : static_cast<int>(this->digits());
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", n - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

double Real::log10_abs() const {
    if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return std::log10(std::fabs(m)) + static_cast<double>(e) * 0.30102999566398120;
}

Real& Real::operator+=(const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator-=(const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator*=(const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator/=(const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator*=(double o) {
    mpfr_mul_d(v_, v_, o, MPFR_RNDN);
    return *this;
}

namespace {

// Scratch for products; a separate multiply and add is noticeably faster
// than mpfr_fma and the extra rounding is immaterial here.
mpfr_ptr product_scratch(mpfr_prec_t bits) {
    struct Scratch {
        mpfr_t v;
        Scratch() { mpfr_init2(v, 64); }
        ~Scratch() { mpfr_clear(v); }
    };
    thread_local Scratch s;
    if (mpfr_get_prec(s.v) != bits) mpfr_set_prec(s.v, bits);
    return s.v;
}

}  // namespace

void Real::add_product(const Real& a, const Real& b) {
    mpfr_ptr t = product_scratch(mpfr_get_prec(v_));
    mpfr_mul(t, a.v_, b.v_, MPFR_RNDN);
    mpfr_add(v_, v_, t, MPFR_RNDN);
}

void Real::sub_product(const Real& a, const Real& b) {
    mpfr_ptr t = product_scratch(mpfr_get_prec(v_));
    mpfr_mul(t, a.v_, b.v_, MPFR_RNDN);
    mpfr_sub(v_, v_, t, MPFR_RNDN);
}

Real make_result(const Real& a, const Real& b) {
    return Real(Real::WithBits{}, std::max(mpfr_get_prec(a.v_), mpfr_get_prec(b.v_)));
}

Real make_result(const Real& a) { return Real(Real::WithBits{}, mpfr_get_prec(a.v_)); }

Real operator-(const Real& a) {
    Real r = make_result(a);
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
}

Real operator+(const Real& a, const Real& b) {
    Real r = make_result(a, b);
    mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator-(const Real& a, const Real& b) {
    Real r = make_result(a, b);
    mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator*(const Real& a, const Real& b) {
    Real r = make_result(a, b);
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator/(const Real& a, const Real& b) {
    Real r = make_result(a, b);
    mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator*(const Real& a, double b) {
    Real r = make_result(a);
    mpfr_mul_d(r.get(), a.get(), b, MPFR_RNDN);
    return r;
}

Real operator*(double a, const Real& b) { return b * a; }

int compare(const Real& a, const Real& b) { return mpfr_cmp(a.get(), b.get()); }

Real abs(const Real& x) {
    Real r = make_result(x);
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real sqrt(const Real& x) {
    Real r = make_result(x);
    mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real hypot(const Real& a, const Real& b) {
    Real r = make_result(a, b);
    mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real atan2(const Real& y, const Real& x) {
    Real r = make_result(y, x);
    mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
    return r;
}

Real cos(const Real& x) {
    Real r = make_result(x);
    mpfr_cos(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real sin(const Real& x) {
    Real r = make_result(x);
    mpfr_sin(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real exp(const Real& x) {
    Real r = make_result(x);
    mpfr_exp(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real log(const Real& x) {
    Real r = make_result(x);
    mpfr_log(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real pow10(long e) {
    Real r;
    mpfr_ui_pow_ui(r.get(), 10, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
    if (e < 0) mpfr_ui_div(r.get(), 1, r.get(), MPFR_RNDN);
    return r;
}

Real pi() {
    Real r;
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

// --- Complex ----------------------------------------------------------------

Complex& Complex::operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
}

Complex& Complex::operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

Complex& Complex::operator*=(const Complex& o) {
    *this = *this * o;
    return *this;
}

Complex& Complex::operator*=(const Real& o) {
    re *= o;
    im *= o;
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    *this = *this / o;
    return *this;
}

void Complex::add_product(const Complex& a, const Complex& b) {
    re.add_product(a.re, b.re);
    re.sub_product(a.im, b.im);
    im.add_product(a.re, b.im);
    im.add_product(a.im, b.re);
}

void Complex::add_conj_product(const Complex& a, const Complex& b) {
    // (ar - i ai)(br + i bi) = ar br + ai bi + i (ar bi - ai br)
    re.add_product(a.re, b.re);
    re.add_product(a.im, b.im);
    im.add_product(a.re, b.im);
    im.sub_product(a.im, b.re);
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator-(const Complex& a) { return {-a.re, -a.im}; }

Complex operator*(const Complex& a, const Complex& b) {
    Real re = a.re * b.re;
    re.sub_product(a.im, b.im);
    Real im = a.re * b.im;
    im.add_product(a.im, b.re);
    return {std::move(re), std::move(im)};
}

Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }

Complex operator/(const Complex& a, const Complex& b) {
    const Real d = norm(b);
    Real re = a.re * b.re;
    re.add_product(a.im, b.im);
    Real im = a.im * b.re;
    im.sub_product(a.re, b.im);
    return {re / d, im / d};
}

Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real abs(const Complex& z) { return hypot(z.re, z.im); }

Real norm(const Complex& z) {
    Real r = z.re * z.re;
    r.add_product(z.im, z.im);
    return r;
}

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex sqrt(const Complex& z) {
    // principal branch
    if (z.is_zero()) return z;
    const Real r = abs(z);
    Real a = sqrt((r + abs(z.re)) * 0.5);
    Real b = abs(z.im) / (a * 2.0);
    if (z.re.sign() >= 0) return {a, z.im.sign() < 0 ? -b : b};
    return {b, z.im.sign() < 0 ? -a : a};
}

}  // namespace helm::mp
