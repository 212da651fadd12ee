#pragma once

// Multiprecision real and complex scalars on top of MPFR.
//
// Precision is a per-thread setting (see PrecisionScope). Freshly created
// values take the thread's working precision; arithmetic results take the
// larger precision of their operands, so a value computed inside a scope
// keeps its accuracy when it later meets lower-precision operands.

#include <complex>
#include <string>
#include <string_view>

#include <mpfr.h>

namespace helm::mp {

/// Working precision, in decimal digits, of the calling thread.
unsigned working_digits() noexcept;
void set_working_digits(unsigned digits);

/// Decimal digits needed to run diagonal Padé approximants up to
/// `max_half_order`: max(60, ceil(2.5 M) + 30).
unsigned digits_for_half_order(int max_half_order);

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

class Real {
public:
    Real();
    Real(double x);  // NOLINT(google-explicit-constructor)
    Real(int x);     // NOLINT(google-explicit-constructor)
    Real(long x);    // NOLINT(google-explicit-constructor)
    /// Parses a decimal string exactly to working precision.
    explicit Real(std::string_view decimal);
    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    Real& operator=(double x);
    ~Real();

    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }
    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    unsigned digits() const;

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Scientific notation with `digits` significant digits (0 = all).
    std::string str(int digits = 0) const;
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    /// log10|x| as a double; -inf for zero. Valid far outside double range.
    double log10_abs() const;

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);
    Real& operator*=(double o);

    /// this += a * b, rounded to the precision of this.
    void add_product(const Real& a, const Real& b);
    /// this -= a * b, rounded to the precision of this.
    void sub_product(const Real& a, const Real& b);

    friend Real operator-(const Real& a);
    friend void swap(Real& a, Real& b) noexcept { mpfr_swap(a.v_, b.v_); }
    friend Real rounded(const Real& x, unsigned digits);

private:
    struct WithBits {};
    Real(WithBits, mpfr_prec_t bits);
    friend Real make_result(const Real& a, const Real& b);
    friend Real make_result(const Real& a);

    mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator*(const Real& a, double b);
Real operator*(double a, const Real& b);

int compare(const Real& a, const Real& b);
inline bool operator<(const Real& a, const Real& b) { return compare(a, b) < 0; }
inline bool operator>(const Real& a, const Real& b) { return compare(a, b) > 0; }
inline bool operator<=(const Real& a, const Real& b) { return compare(a, b) <= 0; }
inline bool operator>=(const Real& a, const Real& b) { return compare(a, b) >= 0; }
inline bool operator==(const Real& a, const Real& b) { return compare(a, b) == 0; }
inline bool operator!=(const Real& a, const Real& b) { return compare(a, b) != 0; }

/// Copy of `x` rounded to `digits` decimal digits.
Real rounded(const Real& x, unsigned digits);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real hypot(const Real& a, const Real& b);
Real atan2(const Real& y, const Real& x);
Real cos(const Real& x);
Real sin(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
/// 10^e at working precision.
Real pow10(long e);
Real pi();

struct Complex {
    Real re;
    Real im;

    Complex() = default;
    Complex(Real r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r) : re(r) {}  // NOLINT(google-explicit-constructor)
    Complex(double r, double i) : re(r), im(i) {}
    Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}  // NOLINT

    std::complex<double> to_std() const { return {re.to_double(), im.to_double()}; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);
    Complex& operator*=(const Real& o);
    Complex& operator/=(const Complex& o);

    /// this += a * b.
    void add_product(const Complex& a, const Complex& b);
    /// this += conj(a) * b.
    void add_conj_product(const Complex& a, const Complex& b);

    friend void swap(Complex& a, Complex& b) noexcept {
        swap(a.re, b.re);
        swap(a.im, b.im);
    }
};

Complex rounded(const Complex& z, unsigned digits);

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator-(const Complex& a);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);
Real arg(const Complex& z);
Complex sqrt(const Complex& z);

}  // namespace helm::mp
