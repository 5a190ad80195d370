#pragma once

// Integer primitives shared by the form and class-group code. Everything here
// is written against two representations: std::int64_t for the scans, and
// mpz_class when coefficients outgrow machine words.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace bhcg
{

template <class Int>
concept FormInteger = std::is_same_v<Int, std::int64_t> || std::is_same_v<Int, mpz_class>;

namespace detail
{

inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

inline mpz_class floor_div(const mpz_class& a, const mpz_class& b)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// Result carries the sign of b (or is zero).
inline std::int64_t floor_mod(std::int64_t a, std::int64_t b)
{
    std::int64_t r = a % b;
    if (r != 0 && ((r < 0) != (b < 0)))
        r += b;
    return r;
}

inline mpz_class floor_mod(const mpz_class& a, const mpz_class& b)
{
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline std::int64_t abs_value(std::int64_t a) { return a < 0 ? -a : a; }
inline mpz_class abs_value(const mpz_class& a) { return abs(a); }

inline std::int64_t gcd(std::int64_t a, std::int64_t b)
{
    a = abs_value(a);
    b = abs_value(b);
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline mpz_class gcd(const mpz_class& a, const mpz_class& b)
{
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

// floor(sqrt(n)) for n >= 0.
inline std::int64_t isqrt(std::int64_t n)
{
    if (n < 0)
        throw std::domain_error("isqrt of a negative number");
    auto r = static_cast<std::int64_t>(__builtin_sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

inline mpz_class isqrt(const mpz_class& n)
{
    if (n < 0)
        throw std::domain_error("isqrt of a negative number");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_square(std::int64_t n)
{
    if (n < 0)
        return false;
    std::int64_t r = isqrt(n);
    return r * r == n;
}

inline std::string to_string(std::int64_t v) { return std::to_string(v); }
inline std::string to_string(const mpz_class& v) { return v.get_str(); }

inline std::int64_t to_int64(std::int64_t v) { return v; }
inline std::int64_t to_int64(const mpz_class& v)
{
    if (!v.fits_slong_p())
        throw std::overflow_error("integer does not fit in 64 bits: " + v.get_str());
    return v.get_si();
}

// x with a*x = 1 mod m, m >= 1, gcd(a, m) = 1.
inline std::int64_t inverse_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t old_r = floor_mod(a, m), r = m;
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1)
        throw std::domain_error("inverse_mod: arguments are not coprime");
    return floor_mod(old_s, m);
}

template <FormInteger Int>
struct BezoutResult {
    Int g, x, y; // a*x + b*y = g
};

template <FormInteger Int>
BezoutResult<Int> extended_gcd(const Int& a, const Int& b)
{
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    return {old_r, old_s, old_t};
}

} // namespace detail

/// Distinct prime divisors of |n| in increasing order. Trial division.
inline std::vector<std::int64_t> distinct_prime_factors(std::int64_t n)
{
    std::vector<std::int64_t> out;
    n = detail::abs_value(n);
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0)
                n /= p;
        }
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

inline bool is_square_free(std::int64_t n)
{
    n = detail::abs_value(n);
    if (n == 0)
        return false;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0)
                return false;
        }
    }
    return true;
}

inline bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0)
            return false;
    return true;
}

inline std::int64_t euler_phi(std::int64_t n)
{
    std::int64_t result = n;
    for (std::int64_t p : distinct_prime_factors(n))
        result = result / p * (p - 1);
    return result;
}

/// Positive divisors of n >= 1 in increasing order.
inline std::vector<std::int64_t> divisors(std::int64_t n)
{
    std::vector<std::int64_t> small, large;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            small.push_back(d);
            if (d * d != n)
                large.push_back(n / d);
        }
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

} // namespace bhcg
