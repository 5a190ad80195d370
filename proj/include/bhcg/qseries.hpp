#pragma once

// Truncated Laurent series in q with exact rational coefficients, the
// classical expansions built from them, and the Eichler-Selberg trace formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "integer.hpp"
#include "mpreal.hpp"
#include "quadform.hpp"

namespace bhcg
{

/// f = sum_{valuation <= e < order} c_e q^e + O(q^order).
class QSeries
{
public:
    QSeries() = default;

    /// coefficients[i] is the coefficient of q^(valuation + i); missing
    /// entries up to the truncation order are zero.
    QSeries(std::int64_t valuation, std::vector<mpq_class> coefficients, std::int64_t order)
        : valuation_(valuation), order_(order), c_(std::move(coefficients))
    {
        if (order < valuation)
            throw std::invalid_argument("truncation order below valuation");
        if (static_cast<std::int64_t>(c_.size()) > order - valuation)
            c_.resize(static_cast<std::size_t>(order - valuation));
        c_.resize(static_cast<std::size_t>(order - valuation), mpq_class(0));
        for (auto& x : c_)
            x.canonicalize();
    }

    static QSeries monomial(std::int64_t e, const mpq_class& c, std::int64_t order)
    {
        if (e >= order)
            return QSeries(order, {}, order);
        return QSeries(e, {c}, order);
    }

    static QSeries constant(const mpq_class& c, std::int64_t order) { return monomial(0, c, order); }

    std::int64_t valuation() const { return valuation_; }
    std::int64_t order() const { return order_; }
    const std::vector<mpq_class>& coefficients() const { return c_; }

    /// Coefficient of q^e; e >= order is unknown and rejected.
    mpq_class coefficient(std::int64_t e) const
    {
        if (e >= order_)
            throw std::out_of_range("coefficient q^" + std::to_string(e) + " beyond truncation order " +
                                    std::to_string(order_));
        if (e < valuation_)
            return 0;
        return c_[static_cast<std::size_t>(e - valuation_)];
    }

    mpz_class integer_coefficient(std::int64_t e) const
    {
        mpq_class v = coefficient(e);
        if (v.get_den() != 1)
            throw std::domain_error("coefficient q^" + std::to_string(e) + " is not an integer: " + v.get_str());
        return v.get_num();
    }

    /// Lowest exponent with a nonzero coefficient, or order() if none is known.
    std::int64_t leading_exponent() const
    {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0)
                return valuation_ + static_cast<std::int64_t>(i);
        return order_;
    }

    QSeries truncate(std::int64_t order) const
    {
        order = std::min(order, order_);
        std::int64_t v = std::min(valuation_, order);
        std::vector<mpq_class> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(order - v));
        return QSeries(v, std::move(c), order);
    }

    friend QSeries operator+(const QSeries& f, const QSeries& g) { return combine(f, g, 1); }
    friend QSeries operator-(const QSeries& f, const QSeries& g) { return combine(f, g, -1); }

    friend QSeries operator*(const mpq_class& s, const QSeries& f)
    {
        QSeries r = f;
        for (auto& x : r.c_)
            x *= s;
        return r;
    }

    friend QSeries operator*(const QSeries& f, const QSeries& g)
    {
        const std::int64_t v = f.valuation_ + g.valuation_;
        const std::int64_t order = std::min(f.valuation_ + g.order_, g.valuation_ + f.order_);
        std::vector<mpq_class> c(static_cast<std::size_t>(std::max<std::int64_t>(0, order - v)), mpq_class(0));
        const auto n = static_cast<std::int64_t>(c.size());
        mpq_class t;
        for (std::int64_t i = 0; i < n && i < static_cast<std::int64_t>(f.c_.size()); ++i) {
            const mpq_class& x = f.c_[static_cast<std::size_t>(i)];
            if (x == 0)
                continue;
            for (std::int64_t j = 0; i + j < n && j < static_cast<std::int64_t>(g.c_.size()); ++j) {
                const mpq_class& y = g.c_[static_cast<std::size_t>(j)];
                if (y == 0)
                    continue;
                t = x * y;
                c[static_cast<std::size_t>(i + j)] += t;
            }
        }
        return QSeries(v, std::move(c), order);
    }

    /// 1/f. The leading coefficient must be known and nonzero; the result
    /// keeps the relative precision of f.
    QSeries inverse() const
    {
        const std::int64_t lead = leading_exponent();
        if (lead >= order_)
            throw std::domain_error("cannot invert a series with no known nonzero coefficient");
        const std::int64_t rel = order_ - lead;
        const mpq_class& a0 = c_[static_cast<std::size_t>(lead - valuation_)];
        auto a = [&](std::int64_t k) -> const mpq_class& { return c_[static_cast<std::size_t>(lead - valuation_ + k)]; };
        std::vector<mpq_class> b(static_cast<std::size_t>(rel), mpq_class(0));
        b[0] = 1 / a0;
        mpq_class s;
        for (std::int64_t n = 1; n < rel; ++n) {
            s = 0;
            for (std::int64_t k = 1; k <= n; ++k)
                if (a(k) != 0)
                    s += a(k) * b[static_cast<std::size_t>(n - k)];
            b[static_cast<std::size_t>(n)] = -s / a0;
        }
        return QSeries(-lead, std::move(b), -lead + rel);
    }

    /// f^k for k >= 0 by repeated squaring; k < 0 inverts first.
    QSeries pow(std::int64_t k) const
    {
        if (k < 0)
            return inverse().pow(-k);
        if (k == 0)
            return constant(1, order_ - leading_exponent());
        QSeries base = *this, r;
        bool have = false;
        for (;;) {
            if (k & 1) {
                r = have ? r * base : base;
                have = true;
            }
            k >>= 1;
            if (k == 0)
                return r;
            base = base * base;
        }
    }

    /// f(q^k) for k >= 1.
    QSeries substitute(std::int64_t k) const
    {
        if (k < 1)
            throw std::invalid_argument("substitution q -> q^k needs k >= 1");
        std::vector<mpq_class> c(static_cast<std::size_t>(k * (order_ - valuation_)), mpq_class(0));
        for (std::size_t i = 0; i < c_.size(); ++i)
            c[i * static_cast<std::size_t>(k)] = c_[i];
        return QSeries(k * valuation_, std::move(c), k * order_);
    }

    /// q d/dq.
    QSeries theta() const
    {
        QSeries r = *this;
        for (std::size_t i = 0; i < r.c_.size(); ++i)
            r.c_[i] *= valuation_ + static_cast<std::int64_t>(i);
        return r;
    }

    /// q^e f.
    QSeries shift(std::int64_t e) const { return QSeries(valuation_ + e, c_, order_ + e); }

    /// Sum of the known terms at a complex nome q, under the current precision.
    Complex evaluate(const Complex& q) const
    {
        // Horner from the top, then multiply by q^valuation.
        Complex acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * q + Complex(to_real(*it));
        if (valuation_ >= 0) {
            for (std::int64_t i = 0; i < valuation_; ++i)
                acc *= q;
        } else {
            Complex inv = Complex(Real(1)) / q;
            for (std::int64_t i = 0; i < -valuation_; ++i)
                acc *= inv;
        }
        return acc;
    }

    friend bool operator==(const QSeries& f, const QSeries& g)
    {
        if (f.order_ != g.order_)
            return false;
        const std::int64_t lo = std::min(f.valuation_, g.valuation_);
        for (std::int64_t e = lo; e < f.order_; ++e)
            if (f.coefficient(e) != g.coefficient(e))
                return false;
        return true;
    }

private:
    static QSeries combine(const QSeries& f, const QSeries& g, int sign)
    {
        const std::int64_t order = std::min(f.order_, g.order_);
        const std::int64_t v = std::min({f.valuation_, g.valuation_, order});
        std::vector<mpq_class> c(static_cast<std::size_t>(order - v), mpq_class(0));
        for (std::int64_t e = v; e < order; ++e) {
            auto& x = c[static_cast<std::size_t>(e - v)];
            x = f.coefficient(e);
            if (sign > 0)
                x += g.coefficient(e);
            else
                x -= g.coefficient(e);
        }
        return QSeries(v, std::move(c), order);
    }

    std::int64_t valuation_{0};
    std::int64_t order_{0};
    std::vector<mpq_class> c_;
};

namespace detail
{

/// sigma_k(n) for 0 <= n < limit (sigma_k(0) = 0).
inline std::vector<mpz_class> divisor_sums(unsigned k, std::int64_t limit)
{
    std::vector<mpz_class> s(static_cast<std::size_t>(std::max<std::int64_t>(limit, 1)), mpz_class(0));
    for (std::int64_t d = 1; d < limit; ++d) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), k);
        for (std::int64_t m = d; m < limit; m += d)
            s[static_cast<std::size_t>(m)] += p;
    }
    return s;
}

} // namespace detail

/// prod_{(k, e)} prod_{n >= 1} (1 - q^{kn})^e to order `order`, exact.
///
/// Uses the logarithmic derivative: if P is the product then
/// n p_n = sum_{m=1}^{n} L_m p_{n-m} with L_m = -sum_{k | m} e k sigma_1(m/k).
inline QSeries eta_product(const std::vector<std::pair<std::int64_t, std::int64_t>>& factors, std::int64_t order)
{
    if (order < 1)
        return QSeries(0, {}, std::max<std::int64_t>(order, 0));
    const auto sigma = detail::divisor_sums(1, order);
    std::vector<mpz_class> L(static_cast<std::size_t>(order), mpz_class(0));
    for (const auto& [k, e] : factors) {
        if (k < 1)
            throw std::invalid_argument("eta_product needs k >= 1");
        for (std::int64_t m = k; m < order; m += k)
            L[static_cast<std::size_t>(m)] -= mpz_class(static_cast<long>(e * k)) * sigma[static_cast<std::size_t>(m / k)];
    }
    std::vector<mpz_class> p(static_cast<std::size_t>(order), mpz_class(0));
    p[0] = 1;
    mpz_class s;
    for (std::int64_t n = 1; n < order; ++n) {
        s = 0;
        for (std::int64_t m = 1; m <= n; ++m)
            if (L[static_cast<std::size_t>(m)] != 0)
                s += L[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(n - m)];
        // Exact: the product has integer coefficients.
        mpz_divexact_ui(p[static_cast<std::size_t>(n)].get_mpz_t(), s.get_mpz_t(), static_cast<unsigned long>(n));
    }
    std::vector<mpq_class> c(p.begin(), p.end());
    return QSeries(0, std::move(c), order);
}

/// Delta = q prod (1 - q^n)^24, to order `order` (>= 2).
inline QSeries delta_series(std::int64_t order)
{
    if (order < 2)
        throw std::invalid_argument("delta_series needs order >= 2");
    return eta_product({{1, 24}}, order - 1).shift(1);
}

/// 1/Delta = q^{-1} prod (1 - q^n)^{-24}, to order `order` (>= 0).
inline QSeries inverse_delta_series(std::int64_t order)
{
    if (order < 0)
        throw std::invalid_argument("inverse_delta_series needs order >= 0");
    return eta_product({{1, -24}}, order + 1).shift(-1);
}

/// E2 = 1 - 24 sum sigma_1(n) q^n.
inline QSeries eisenstein_E2(std::int64_t order)
{
    if (order < 1)
        throw std::invalid_argument("eisenstein_E2 needs order >= 1");
    const auto s = detail::divisor_sums(1, order);
    std::vector<mpq_class> c(static_cast<std::size_t>(order));
    c[0] = 1;
    for (std::int64_t n = 1; n < order; ++n)
        c[static_cast<std::size_t>(n)] = mpq_class(-24 * s[static_cast<std::size_t>(n)]);
    return QSeries(0, std::move(c), order);
}

/// E4 = 1 + 240 sum sigma_3(n) q^n.
inline QSeries eisenstein_E4(std::int64_t order)
{
    if (order < 1)
        throw std::invalid_argument("eisenstein_E4 needs order >= 1");
    const auto s = detail::divisor_sums(3, order);
    std::vector<mpq_class> c(static_cast<std::size_t>(order));
    c[0] = 1;
    for (std::int64_t n = 1; n < order; ++n)
        c[static_cast<std::size_t>(n)] = mpq_class(240 * s[static_cast<std::size_t>(n)]);
    return QSeries(0, std::move(c), order);
}

/// j = E4^3 / Delta, to order `order` (>= 0).
inline QSeries j_series(std::int64_t order)
{
    if (order < 0)
        throw std::invalid_argument("j_series needs order >= 0");
    QSeries e4 = eisenstein_E4(order + 1);
    return (e4 * e4 * e4) * inverse_delta_series(order);
}

/// p(0), ..., p(nmax) by Euler's pentagonal recurrence.
inline std::vector<mpz_class> partition_numbers(std::int64_t nmax)
{
    if (nmax < 0)
        throw std::invalid_argument("partition_numbers needs nmax >= 0");
    std::vector<mpz_class> p(static_cast<std::size_t>(nmax) + 1, mpz_class(0));
    p[0] = 1;
    for (std::int64_t n = 1; n <= nmax; ++n) {
        mpz_class s = 0;
        for (std::int64_t k = 1;; ++k) {
            const std::int64_t g1 = k * (3 * k - 1) / 2;
            if (g1 > n)
                break;
            const bool plus = (k % 2) == 1;
            const std::int64_t g2 = k * (3 * k + 1) / 2;
            const mpz_class& a = p[static_cast<std::size_t>(n - g1)];
            if (plus)
                s += a;
            else
                s -= a;
            if (g2 <= n) {
                const mpz_class& b = p[static_cast<std::size_t>(n - g2)];
                if (plus)
                    s += b;
                else
                    s -= b;
            }
        }
        p[static_cast<std::size_t>(n)] = s;
    }
    return p;
}

inline void require_trace_weight(std::int64_t k)
{
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("weight must be even and >= 4, got " + std::to_string(k));
}

/// Coefficient of x^{k-2} in 1/(1 - t x + N x^2).
inline mpz_class pk_coefficient(std::int64_t k, std::int64_t t, std::int64_t N)
{
    require_trace_weight(k);
    mpz_class prev = 1, cur = static_cast<long>(t);
    const mpz_class T = static_cast<long>(t), NN = static_cast<long>(N);
    for (std::int64_t i = 2; i <= k - 2; ++i) {
        mpz_class next = T * cur - NN * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Trace of T_n on weight-k cusp forms for SL2(Z) by the Eichler-Selberg
/// formula. The result is asserted integral.
inline mpz_class hecke_trace(std::int64_t k, std::int64_t n)
{
    require_trace_weight(k);
    if (n < 1)
        throw std::invalid_argument("hecke_trace needs n >= 1");
    mpq_class class_sum = 0;
    const std::int64_t tmax = detail::isqrt(4 * n);
    for (std::int64_t t = -tmax; t <= tmax; ++t) {
        HurwitzValue H = hurwitz(t * t - 4 * n);
        if (H.value() == 0)
            continue;
        class_sum += mpq_class(pk_coefficient(k, t, n)) * H.value();
    }
    mpz_class divisor_sum = 0;
    for (std::int64_t d : divisors(n)) {
        std::int64_t m = std::min(d, n / d);
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(k - 1));
        divisor_sum += p;
    }
    mpq_class r = -class_sum / 2 - mpq_class(divisor_sum) / 2;
    r.canonicalize();
    if (r.get_den() != 1)
        throw std::logic_error("Eichler-Selberg trace not integral at k=" + std::to_string(k) +
                               ", n=" + std::to_string(n) + ": " + r.get_str());
    return r.get_num();
}

/// The weight-12, prime-p trace written out with t running over 0..floor(sqrt p)
/// only, evaluated literally. Kept for comparison with hecke_trace(12, p).
inline mpq_class tau_prime_display(std::int64_t p)
{
    if (!is_prime(p))
        throw std::invalid_argument("tau_prime_display needs a prime, got " + std::to_string(p));
    const mpz_class P = static_cast<long>(p);
    mpq_class class_sum = 0;
    for (std::int64_t t = 0; t <= detail::isqrt(p); ++t) {
        const mpz_class T = static_cast<long>(t);
        mpz_class t2 = T * T;
        mpz_class poly = t2 * t2 * t2 * t2 * t2 - 9 * P * t2 * t2 * t2 * t2 + 28 * P * P * t2 * t2 * t2 -
                         35 * P * P * P * t2 * t2 + 15 * P * P * P * P * t2 - P * P * P * P * P;
        class_sum += mpq_class(poly) * hurwitz(t * t - 4 * p).value();
    }
    // Divisors of a prime: d = 1 and d = p, min(d, d') = 1 both times.
    mpq_class r = -class_sum / 2 - mpq_class(2) / 2;
    r.canonicalize();
    return r;
}

namespace detail
{

// log10 of the largest |e c_e q^e| among the top `count` known terms.
inline double log10_tail(const QSeries& f, double log10_abs_q, std::int64_t count = 5)
{
    const auto& c = f.coefficients();
    double worst = -1e300;
    for (std::int64_t i = std::max<std::int64_t>(0, static_cast<std::int64_t>(c.size()) - count);
         i < static_cast<std::int64_t>(c.size()); ++i) {
        const mpq_class& x = c[static_cast<std::size_t>(i)];
        if (x == 0)
            continue;
        auto log10_abs = [](const mpz_class& z) {
            long ex = 0;
            double m = mpz_get_d_2exp(&ex, z.get_mpz_t());
            return std::log10(std::abs(m)) + static_cast<double>(ex) * std::log10(2.0);
        };
        const double l = log10_abs(x.get_num()) - log10_abs(x.get_den());
        const std::int64_t e = f.valuation() + i;
        worst = std::max(worst, l + std::log10(static_cast<double>(std::max<std::int64_t>(1, std::abs(e)))) +
                                    static_cast<double>(e) * log10_abs_q);
    }
    return worst;
}

} // namespace detail

} // namespace bhcg
