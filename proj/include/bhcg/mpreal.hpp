#pragma once

// Multiprecision reals (MPFR through Boost.Multiprecision) and a minimal
// complex type on top of them.
//
// The default precision of mpfr_float is process-wide in the Boost version
// we build against, so every MPFR computation in this library runs on the
// calling thread under a ScopedPrecision guard.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

namespace bhcg
{

using Real = boost::multiprecision::mpfr_float;

/// Sets the default decimal precision for the lifetime of the object.
class ScopedPrecision
{
public:
    explicit ScopedPrecision(unsigned digits) : saved_(Real::default_precision())
    {
        Real::default_precision(digits);
    }
    ~ScopedPrecision() { Real::default_precision(saved_); }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

private:
    unsigned saved_;
};

/// Pi at the current default precision.
inline Real pi()
{
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

inline Real to_real(const mpz_class& z)
{
    Real r;
    mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

inline Real to_real(const mpq_class& q)
{
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

inline Real to_real(std::int64_t v) { return to_real(mpz_class(static_cast<long>(v))); }

/// Decimal string with `digits` significant digits.
inline std::string to_string(const Real& x, int digits = 17)
{
    return x.str(digits, std::ios_base::fmtflags(0));
}

struct Complex {
    Real re{0}, im{0};

    Complex() = default;
    Complex(Real r) : re(std::move(r)), im(0) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& x, const Complex& y) { return {x.re + y.re, x.im + y.im}; }
    friend Complex operator-(const Complex& x, const Complex& y) { return {x.re - y.re, x.im - y.im}; }
    friend Complex operator-(const Complex& x) { return {-x.re, -x.im}; }
    friend Complex operator*(const Complex& x, const Complex& y)
    {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend Complex operator*(const Complex& x, const Real& s) { return {x.re * s, x.im * s}; }
    friend Complex operator*(const Real& s, const Complex& x) { return {x.re * s, x.im * s}; }
    friend Complex operator/(const Complex& x, const Real& s) { return {x.re / s, x.im / s}; }
    friend Complex operator/(const Complex& x, const Complex& y)
    {
        Real n = y.re * y.re + y.im * y.im;
        return {(x.re * y.re + x.im * y.im) / n, (x.im * y.re - x.re * y.im) / n};
    }
    Complex& operator+=(const Complex& y)
    {
        re += y.re;
        im += y.im;
        return *this;
    }
    Complex& operator*=(const Complex& y) { return *this = *this * y; }
};

inline Real abs(const Complex& z) { return boost::multiprecision::sqrt(z.re * z.re + z.im * z.im); }

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }

inline Complex exp(const Complex& z)
{
    Real m = boost::multiprecision::exp(z.re);
    return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

/// e^{2 pi i tau}.
inline Complex nome(const Complex& tau)
{
    Real two_pi = 2 * pi();
    return exp(Complex{-two_pi * tau.im, two_pi * tau.re});
}

} // namespace bhcg
