#pragma once

// Kloosterman sums and the Rademacher expansions for 1/Delta, Delta and the
// weight-zero sums R_d, plus traces of the level-6 function P over CM points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bessel.hpp"
#include "integer.hpp"
#include "mpreal.hpp"
#include "qseries.hpp"
#include "quadform.hpp"

namespace bhcg
{

struct RademacherParams {
    std::int64_t cmax{30};
    unsigned precision_digits{30};

    void validate() const
    {
        if (cmax < 1)
            throw std::invalid_argument("cmax must be >= 1");
        if (precision_digits < 15)
            throw std::invalid_argument("precision_digits must be >= 15");
    }
};

/// K(m, n; c) = sum over d in (Z/c)^x of e^{2 pi i (m dbar + n d) / c}.
/// K(., .; 1) = 1. The imaginary part cancels in conjugate pairs d, c - d
/// and is checked to vanish.
inline Real kloosterman(std::int64_t m, std::int64_t n, std::int64_t c)
{
    if (c < 1)
        throw std::invalid_argument("kloosterman needs c >= 1");
    if (c == 1)
        return Real(1);
    const Real step = 2 * pi() / Real(c);
    Real re = 0, im = 0;
    std::int64_t units = 0;
    for (std::int64_t d = 1; d < c; ++d) {
        if (detail::gcd(d, c) != 1)
            continue;
        ++units;
        const std::int64_t dbar = detail::inverse_mod(d, c);
        // Reduce in 128 bits so large m, n cannot overflow.
        const auto r = static_cast<std::int64_t>(
            ((static_cast<__int128>(m) * dbar + static_cast<__int128>(n) * d) % c + c) % c);
        if (r == 0) {
            re += 1;
            continue;
        }
        const Real angle = step * r;
        re += boost::multiprecision::cos(angle);
        im += boost::multiprecision::sin(angle);
    }
    if (boost::multiprecision::abs(im) > Real(1e-10) * units)
        throw std::logic_error("Kloosterman sum with nonzero imaginary part at c=" + std::to_string(c));
    return re;
}

/// Rademacher series for the coefficient a(n) of q^n in 1/Delta:
/// (2 pi / n^{13/2}) sum_{c <= cmax} K(-1, n; c)/c I_13(4 pi sqrt(n)/c).
inline Real rademacher_inv_delta(std::int64_t n, const RademacherParams& params = {})
{
    params.validate();
    if (n < 1)
        throw std::invalid_argument("rademacher_inv_delta needs n >= 1");
    ScopedPrecision prec(params.precision_digits + 10);
    const Real x0 = 4 * pi() * boost::multiprecision::sqrt(Real(n));
    Real sum = 0;
    for (std::int64_t c = 1; c <= params.cmax; ++c) {
        Real K = kloosterman(-1, n, c);
        if (K == 0)
            continue;
        sum += K / c * bessel_I(13, x0 / c, params.precision_digits);
    }
    return 2 * pi() * sum / boost::multiprecision::pow(Real(n), Real(13) / 2);
}

namespace detail
{

// sum_{c} K(1, n; c)/c J_11(4 pi sqrt(n)/c), averaged over the last ten
// partial sums (fewer when cmax < 10).
inline Real tau_kernel_sum(std::int64_t n, const RademacherParams& params)
{
    const Real x0 = 4 * pi() * boost::multiprecision::sqrt(Real(n));
    const std::int64_t window = std::min<std::int64_t>(10, params.cmax);
    Real partial = 0, averaged = 0;
    for (std::int64_t c = 1; c <= params.cmax; ++c) {
        Real K = kloosterman(1, n, c);
        if (K != 0)
            partial += K / c * bessel_J(11, x0 / c, params.precision_digits);
        if (c > params.cmax - window)
            averaged += partial;
    }
    return averaged / window;
}

} // namespace detail

/// beta such that (2 pi n^{11/2} / beta) times the kernel sum equals tau_n.
inline Real fit_beta_delta(std::int64_t n, const mpz_class& tau_n, const RademacherParams& params = {})
{
    params.validate();
    ScopedPrecision prec(params.precision_digits + 10);
    const Real s = detail::tau_kernel_sum(n, params);
    return 2 * pi() * boost::multiprecision::pow(Real(n), Real(11) / 2) * s / to_real(tau_n);
}

/// beta_Delta calibrated on tau(2) = -24 at the given truncation.
inline Real calibrate_beta_delta(const RademacherParams& params = {}) { return fit_beta_delta(2, mpz_class(-24), params); }

/// Rademacher series for tau(n) with a given normalization beta.
inline Real rademacher_tau(std::int64_t n, const Real& beta, const RademacherParams& params = {})
{
    params.validate();
    if (n < 2)
        throw std::invalid_argument("rademacher_tau needs n >= 2");
    ScopedPrecision prec(params.precision_digits + 10);
    const Real s = detail::tau_kernel_sum(n, params);
    return 2 * pi() * boost::multiprecision::pow(Real(n), Real(11) / 2) * s / beta;
}

/// Same, with beta calibrated once from n = 2.
inline Real rademacher_tau(std::int64_t n, const RademacherParams& params = {})
{
    return rademacher_tau(n, calibrate_beta_delta(params), params);
}

/// r_{d,n} = 2 pi sqrt(d/n) sum_{c <= cmax} K(-d, n; c)/c I_1(4 pi sqrt(dn)/c).
inline Real rd_coefficient(std::int64_t d, std::int64_t n, const RademacherParams& params = {})
{
    params.validate();
    if (d < 1 || n < 1)
        throw std::invalid_argument("rd_coefficient needs d, n >= 1");
    ScopedPrecision prec(params.precision_digits + 10);
    const Real x0 = 4 * pi() * boost::multiprecision::sqrt(Real(d) * Real(n));
    Real sum = 0;
    for (std::int64_t c = 1; c <= params.cmax; ++c) {
        Real K = kloosterman(-d, n, c);
        if (K == 0)
            continue;
        sum += K / c * bessel_I(1, x0 / c, params.precision_digits);
    }
    return 2 * pi() * boost::multiprecision::sqrt(Real(d) / Real(n)) * sum;
}

/// The weight -2 level 6 function
/// G = (1/2)(E2(q) - 2E2(q^2) - 3E2(q^3) + 6E2(q^6)) / (eta(q)eta(q^2)eta(q^3)eta(q^6))^2
/// as an exact q-series to order `order`. It starts q^{-1} - 10 - 29q.
inline QSeries g_series(std::int64_t order)
{
    if (order < 1)
        throw std::invalid_argument("g_series needs order >= 1");
    const std::int64_t n = order + 1;
    QSeries e1 = eisenstein_E2(n);
    QSeries e2 = eisenstein_E2((n + 1) / 2).substitute(2).truncate(n);
    QSeries e3 = eisenstein_E2((n + 2) / 3).substitute(3).truncate(n);
    QSeries e6 = eisenstein_E2((n + 5) / 6).substitute(6).truncate(n);
    QSeries num = mpq_class(1, 2) * (e1 - mpq_class(2) * e2 - mpq_class(3) * e3 + mpq_class(6) * e6);
    QSeries den_inv = eta_product({{1, -2}, {2, -2}, {3, -2}, {6, -2}}, n).shift(-1);
    return num * den_inv;
}

namespace detail
{

inline void require_upper_half_plane(const Complex& tau)
{
    if (!(tau.im > 0))
        throw std::domain_error("tau must lie in the upper half plane");
}

} // namespace detail

/// G(tau) from its q-expansion. Throws when the truncated tail is not below
/// 10^{-tail_digits} in absolute size.
inline Complex eval_G(const Complex& tau, const QSeries& G, int tail_digits = 10)
{
    detail::require_upper_half_plane(tau);
    const double log10_q = -2 * M_PI * tau.im.convert_to<double>() / std::log(10.0);
    if (detail::log10_tail(G, log10_q) > -tail_digits)
        throw std::domain_error("truncation order " + std::to_string(G.order()) + " too small at Im tau = " +
                                to_string(tau.im, 6));
    return G.evaluate(nome(tau));
}

/// P(tau) = (i / 2 pi) dG/dtau - G / (2 pi Im tau) = -q dG/dq - G / (2 pi Im tau).
inline Complex eval_P(const Complex& tau, const QSeries& G, int tail_digits = 10)
{
    Complex g = eval_G(tau, G, tail_digits);
    Complex dg = G.theta().evaluate(nome(tau));
    return -dg - g / (2 * pi() * tau.im);
}

/// A form [a,b,c] with its root tau = (-b + i sqrt|b^2 - 4ac|) / (2a).
struct CMPoint {
    Form form;
    Complex tau;
};

inline Complex cm_root(const Form& f)
{
    require_positive_definite(f);
    const Real two_a = Real(2 * f.a);
    return {Real(-f.b) / two_a, boost::multiprecision::sqrt(Real(-f.discriminant())) / two_a};
}

namespace detail
{

/// Whether some (alpha beta; gamma delta) in Gamma0(level) carries Q to R.
///
/// The image's first coefficient is Q(alpha, gamma), so (alpha, gamma) runs
/// over the finitely many coprime representations of R.a with level | gamma.
/// The second column is fixed up to adding multiples of the first, which
/// shifts the middle coefficient by 2 R.a, so one residue test per pair
/// settles it.
inline bool gamma0_equivalent(const Form& Q, const Form& R, std::int64_t level)
{
    if (Q.discriminant() != R.discriminant())
        return false;
    const std::int64_t D = Q.discriminant();
    const std::int64_t m = R.a;
    // Q(alpha, gamma) >= |D| gamma^2 / (4 a).
    const std::int64_t gmax = isqrt(4 * Q.a * m / -D) + 1;
    for (std::int64_t gamma = -gmax - (-gmax) % level; gamma <= gmax; gamma += level) {
        // a alpha^2 + b gamma alpha + c gamma^2 - m = 0.
        const std::int64_t disc = D * gamma * gamma + 4 * Q.a * m;
        if (disc < 0)
            continue;
        const std::int64_t r = isqrt(disc);
        if (r * r != disc)
            continue;
        for (std::int64_t s : {r, -r}) {
            const std::int64_t num = -Q.b * gamma + s;
            if (floor_mod(num, 2 * Q.a) != 0)
                continue;
            const std::int64_t alpha = num / (2 * Q.a);
            if (gcd(alpha, gamma) != 1)
                continue;
            const auto bez = extended_gcd(alpha, gamma); // alpha x + gamma y = 1
            const std::int64_t delta = bez.x, beta = -bez.y;
            const std::int64_t B = 2 * Q.a * alpha * beta + Q.b * (alpha * delta + beta * gamma) +
                                   2 * Q.c * gamma * delta;
            if (floor_mod(B - R.b, 2 * m) == 0)
                return true;
        }
    }
    return false;
}

} // namespace detail

struct QDEnumeration {
    std::int64_t n{0};
    std::int64_t discriminant{0};
    std::vector<Form> forms;
    /// Number of SL2(Z)-classes of discriminant 1 - 24n, primitive or not.
    std::int64_t expected_count{0};
    /// Largest leading coefficient examined.
    std::int64_t a_searched{0};
    bool complete() const { return static_cast<std::int64_t>(forms.size()) == expected_count; }
};

/// Gamma0(6)-class representatives of forms of discriminant 1 - 24n with
/// 6 | a and b = 1 mod 12. The leading coefficient grows in steps of 6 until
/// as many classes as SL2(Z)-classes have appeared, or a reaches 6|D|. Each
/// representative has the smallest a in its class.
inline QDEnumeration enumerate_QD_forms(std::int64_t n)
{
    if (n < 1)
        throw std::invalid_argument("enumerate_QD needs n >= 1");
    QDEnumeration out;
    out.n = n;
    out.discriminant = 1 - 24 * n;
    const std::int64_t D = out.discriminant;
    out.expected_count = kronecker_class_number(D);
    const std::int64_t cap = 6 * -D;
    for (std::int64_t a = 6; a <= cap && !out.complete(); a += 6) {
        out.a_searched = a;
        // b in (-a, a], b = 1 mod 12; translation by Gamma0(6) moves b by 2a.
        std::int64_t b = -a + 1 + detail::floor_mod(1 - (-a + 1), std::int64_t{12});
        for (; b <= a; b += 12) {
            const std::int64_t num = b * b - D;
            if (num % (4 * a) != 0)
                continue;
            const Form f{a, b, num / (4 * a)};
            bool seen = false;
            for (const auto& g : out.forms)
                if (detail::gamma0_equivalent(f, g, 6) || detail::gamma0_equivalent(g, f, 6)) {
                    seen = true;
                    break;
                }
            if (!seen)
                out.forms.push_back(f);
        }
    }
    return out;
}

/// The CM points of the enumeration above, at the current precision.
inline std::vector<CMPoint> enumerate_QD(std::int64_t n)
{
    std::vector<CMPoint> pts;
    for (const auto& f : enumerate_QD_forms(n).forms)
        pts.push_back({f, cm_root(f)});
    return pts;
}

struct SingularTraceParams {
    unsigned precision_digits{30};
    /// Truncation order of the G expansion; 0 picks one from the smallest Im tau.
    std::int64_t order{0};
};

struct SingularTrace {
    std::int64_t n{0};
    std::int64_t classes{0};
    std::int64_t expected_classes{0};
    Real value;
    mpz_class expected;
    Real residual;
    std::int64_t order{0};
    /// Imaginary part of the sum; the individual values are not real in
    /// general, only their sum over a full set of classes.
    Real imaginary_part;
    std::vector<Form> forms;
    std::vector<Complex> values;
};

/// Tr(P; n) = sum over the Gamma0(6)-classes above of P(tau_Q), compared with
/// (24n - 1) p(n).
inline SingularTrace trace_singular_moduli(std::int64_t n, const SingularTraceParams& params = {})
{
    if (params.precision_digits < 15)
        throw std::invalid_argument("precision_digits must be >= 15");
    const QDEnumeration qd = enumerate_QD_forms(n);
    SingularTrace out;
    out.n = n;
    out.classes = static_cast<std::int64_t>(qd.forms.size());
    out.expected_classes = qd.expected_count;
    out.forms = qd.forms;
    out.expected = mpz_class(static_cast<long>(24 * n - 1)) * partition_numbers(n)[static_cast<std::size_t>(n)];

    std::int64_t amax = 6;
    for (const auto& f : qd.forms)
        amax = std::max(amax, f.a);
    const double ymin = std::sqrt(static_cast<double>(24 * n - 1)) / (2.0 * static_cast<double>(amax));
    const double log10_q = -2 * M_PI * ymin / std::log(10.0);
    const int tail_digits = static_cast<int>(params.precision_digits) / 2 + 5;

    std::int64_t order = params.order;
    QSeries G;
    if (order > 0) {
        G = g_series(order);
    } else {
        order = 100;
        for (;;) {
            G = g_series(order);
            if (detail::log10_tail(G, log10_q) < -tail_digits - 2 || order >= 12800)
                break;
            order *= 2;
        }
    }
    out.order = order;

    // Guard digits for cancellation among the large middle terms.
    const double peak = std::max(0.0, detail::log10_tail(G, log10_q, order + 1));
    ScopedPrecision prec(params.precision_digits + static_cast<unsigned>(std::ceil(peak)) + 10);

    Complex total;
    for (const auto& f : qd.forms) {
        Complex v = eval_P(cm_root(f), G, tail_digits);
        out.values.push_back(v);
        total += v;
    }
    if (boost::multiprecision::abs(total.im) > Real(1e-8) * (1 + boost::multiprecision::abs(total.re)))
        throw std::logic_error("trace of P is not real for n = " + std::to_string(n));
    out.value = total.re;
    out.imaginary_part = total.im;
    out.residual = boost::multiprecision::abs(total.re - to_real(out.expected));
    return out;
}

} // namespace bhcg
