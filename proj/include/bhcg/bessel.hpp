#pragma once

// Bessel I_nu and J_nu of integer order by their ascending series.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mpreal.hpp"

namespace bhcg
{

/// Largest argument accepted by the series evaluators. The series for J
/// cancels about x / ln 10 digits, so beyond this the working precision
/// would run into the thousands of digits.
inline constexpr double kBesselMaxArgument = 1.0e4;

namespace detail
{

inline Real bessel_series(unsigned nu, const Real& x, unsigned digits, bool alternating)
{
    if (!(x > 0))
        throw std::domain_error("Bessel argument must be positive");
    const double xd = x.convert_to<double>();
    if (xd > kBesselMaxArgument)
        throw std::overflow_error("Bessel argument " + std::to_string(xd) + " beyond the supported range");
    // Terms peak near k = x/2 with size about e^x / sqrt(x); J keeps the
    // difference, so carry enough guard digits to absorb the cancellation.
    const auto guard = static_cast<unsigned>(alternating ? std::ceil(xd / std::log(10.0)) + 10 : 10);
    ScopedPrecision prec(digits + guard);
    Real half = Real(x) / 2;
    Real half2 = half * half;
    Real term = 1;
    for (unsigned i = 1; i <= nu; ++i)
        term *= half / i;
    Real sum = term;
    const Real eps = boost::multiprecision::pow(Real(10), -static_cast<int>(digits + guard));
    for (unsigned long k = 1;; ++k) {
        term *= half2;
        term /= Real(k) * Real(k + nu);
        if (alternating)
            term = -term;
        sum += term;
        if (double(k) > xd / 2 && boost::multiprecision::abs(term) <= eps * boost::multiprecision::abs(sum))
            break;
    }
    return sum;
}

} // namespace detail

/// I_nu(x) to `digits` significant digits.
inline Real bessel_I(unsigned nu, const Real& x, unsigned digits)
{
    return detail::bessel_series(nu, x, digits, false);
}

/// J_nu(x) to about `digits` absolute digits relative to the largest term.
inline Real bessel_J(unsigned nu, const Real& x, unsigned digits)
{
    return detail::bessel_series(nu, x, digits, true);
}

} // namespace bhcg
