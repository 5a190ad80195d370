#pragma once

// Extremal partition functions Z_k as polynomials in j, the Rademacher-sum
// expression for their coefficients, and counts of polar terms of weak Jacobi
// forms against the dimension of the space.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "integer.hpp"
#include "mpreal.hpp"
#include "parallel.hpp"
#include "qseries.hpp"
#include "quadform.hpp"
#include "rademacher.hpp"

namespace bhcg
{

/// q^{-k} prod_{n >= 2} (1 - q^n)^{-1}, through q^{order - 1}.
inline QSeries extremal_target(std::int64_t k, std::int64_t order)
{
    const std::int64_t len = order + k;
    const auto p = partition_numbers(std::max<std::int64_t>(len, 1));
    std::vector<mpq_class> c(static_cast<std::size_t>(len));
    for (std::int64_t i = 0; i < len; ++i)
        c[static_cast<std::size_t>(i)] = i == 0 ? mpz_class(1) : mpz_class(p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i - 1)]);
    return QSeries(-k, std::move(c), order);
}

/// The polynomial of degree k in j whose expansion agrees with the target
/// through q^0, expanded through q^{order - 1}.
inline QSeries extremal_partition_function(std::int64_t k, std::int64_t order = 20)
{
    if (k < 1)
        throw std::invalid_argument("extremal_partition_function needs k >= 1");
    if (order < 1)
        throw std::invalid_argument("extremal_partition_function needs order >= 1");
    const QSeries j = j_series(order + k);
    std::vector<QSeries> powers{QSeries::constant(1, order + k)};
    for (std::int64_t i = 1; i <= k; ++i)
        powers.push_back(powers.back() * j);
    const QSeries target = extremal_target(k, 1);
    // Peel off q^{-k}, ..., q^0 from the top; j^i has leading term q^{-i}.
    QSeries residual = target;
    QSeries z = QSeries::constant(0, order);
    for (std::int64_t i = k; i >= 0; --i) {
        const mpq_class coeff = residual.coefficient(-i);
        const QSeries term = coeff * powers[static_cast<std::size_t>(i)].truncate(order);
        z = z + term;
        residual = residual - term.truncate(1);
    }
    return z.truncate(order);
}

struct ZkIdentityParams {
    std::int64_t cmax{200};
    unsigned precision_digits{30};
    std::int64_t nmax{5};
    /// Use numerically computed singular traces instead of (24n - 1) p(n).
    bool numeric_traces{false};
};

struct ZkCoefficientCheck {
    std::int64_t n{0};
    Real predicted;
    mpz_class exact;
    double relative_residual{0};
};

struct ZkIdentityReport {
    std::int64_t k{0};
    std::int64_t cmax{0};
    /// Tr(P; n) / (24n - 1) for n = 1..k.
    std::vector<Real> trace_ratios;
    Real constant_predicted;
    mpz_class constant_exact;
    std::vector<ZkCoefficientCheck> coefficients;
    double max_relative_residual{0};
};

inline ZkIdentityReport verify_zk_identity(std::int64_t k, const ZkIdentityParams& params = {})
{
    if (k < 1 || k > 4)
        throw std::invalid_argument("verify_zk_identity supports 1 <= k <= 4");
    if (params.nmax < 1)
        throw std::invalid_argument("nmax must be >= 1");
    RademacherParams rp{params.cmax, params.precision_digits};
    rp.validate();
    ScopedPrecision prec(params.precision_digits + 10);

    ZkIdentityReport rep;
    rep.k = k;
    rep.cmax = params.cmax;
    const auto p = partition_numbers(k);
    rep.trace_ratios.push_back(Real(1));  // index 0: the vacuum R_0 = 1
    for (std::int64_t n = 1; n <= k; ++n) {
        if (params.numeric_traces) {
            SingularTraceParams sp;
            sp.precision_digits = params.precision_digits;
            rep.trace_ratios.push_back(trace_singular_moduli(n, sp).value / Real(24 * n - 1));
        } else {
            rep.trace_ratios.push_back(to_real(mpz_class(p[static_cast<std::size_t>(n)])));
        }
    }
    const auto& w = rep.trace_ratios;

    // Z_k = w_k + (R_k - R_{k-1}) + sum_{n=1}^{k-1} w_n (R_{k-n} - R_{k-n-1})
    // where R_d = q^{-d} + sum_{n >= 1} r_{d,n} q^n for d >= 1 and R_0 = 1.
    // Coefficient of (R_d - R_{d-1}) is 1 for d = k and w_{k-d} otherwise.
    auto weight = [&](std::int64_t d) { return d == k ? Real(1) : w[static_cast<std::size_t>(k - d)]; };
    rep.constant_predicted = w[static_cast<std::size_t>(k)] - weight(1);

    const QSeries z = extremal_partition_function(k, params.nmax + 1);
    rep.constant_exact = z.integer_coefficient(0);
    std::vector<std::vector<Real>> r(static_cast<std::size_t>(k + 1));
    for (std::int64_t d = 1; d <= k; ++d)
        for (std::int64_t n = 1; n <= params.nmax; ++n)
            r[static_cast<std::size_t>(d)].push_back(rd_coefficient(d, n, rp));
    for (std::int64_t n = 1; n <= params.nmax; ++n) {
        Real pred = 0;
        for (std::int64_t d = 1; d <= k; ++d) {
            Real diff = r[static_cast<std::size_t>(d)][static_cast<std::size_t>(n - 1)];
            if (d > 1)
                diff -= r[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(n - 1)];
            pred += weight(d) * diff;
        }
        ZkCoefficientCheck c;
        c.n = n;
        c.predicted = pred;
        c.exact = z.integer_coefficient(n);
        const Real ex = to_real(c.exact);
        const Real denom = boost::multiprecision::abs(ex) > 1 ? Real(boost::multiprecision::abs(ex)) : Real(1);
        c.relative_residual = Real(boost::multiprecision::abs(pred - ex) / denom).convert_to<double>();
        rep.max_relative_residual = std::max(rep.max_relative_residual, c.relative_residual);
        rep.coefficients.push_back(std::move(c));
    }
    return rep;
}

/// floor(m^2/12 + m/2 + 1).
inline std::int64_t jacobi_dim(std::int64_t m)
{
    if (m < 1)
        throw std::invalid_argument("jacobi_dim needs m >= 1");
    return (m * m + 6 * m + 12) / 12;
}

/// ((x)) = x - (ceil x + floor x)/2.
inline mpq_class sawtooth(const mpq_class& x)
{
    mpz_class fl, ce;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpz_cdiv_q(ce.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class r = x - mpq_class(fl + ce, 2);
    r.canonicalize();
    return r;
}

struct PolarFormulaTerms {
    std::int64_t m{0};
    std::int64_t b{0};
    mpq_class quadratic, linear, class_term, b_term, sawtooth_term, constant, total;

    std::string describe() const
    {
        std::ostringstream s;
        s << "m=" << m << ": m^2/12=" << quadratic << " 5m/8=" << linear << " (1/4)sum h=" << class_term
          << " -(1/2)floor(b/2)=" << b_term << " (b=" << b << ") -(1/2)((m/4))=" << sawtooth_term
          << " 1/24=" << constant << " total=" << total;
        return s.str();
    }
};

/// Raised when the closed form for the polar count is not an integer.
class PolarConventionError : public std::domain_error
{
public:
    explicit PolarConventionError(const PolarFormulaTerms& t)
        : std::domain_error("non-integral polar count, " + t.describe()), terms(t)
    {
    }
    PolarFormulaTerms terms;
};

namespace detail
{

// h(d) for the discriminant -d, with weights 1/3 and 1/2 at d = 3, 4.
inline mpq_class weighted_h(std::int64_t d, const std::vector<std::int32_t>* table)
{
    if (d == 3)
        return mpq_class(1, 3);
    if (d == 4)
        return mpq_class(1, 2);
    if (!is_discriminant(-d))
        return 0;
    return table ? mpq_class((*table)[static_cast<std::size_t>(d)]) : mpq_class(class_number(-d));
}

inline PolarFormulaTerms polar_terms(std::int64_t m, const std::vector<std::int32_t>* table)
{
    if (m < 1)
        throw std::invalid_argument("polar count needs m >= 1");
    PolarFormulaTerms t;
    t.m = m;
    t.quadratic = mpq_class(m * m, 12);
    t.linear = mpq_class(5 * m, 8);
    mpq_class sum = 0;
    for (std::int64_t d : divisors(4 * m))
        sum += weighted_h(d, table);
    t.class_term = sum / 4;
    for (std::int64_t b = 1; b * b <= m; ++b)
        if (m % (b * b) == 0)
            t.b = b;
    t.b_term = mpq_class(-(t.b / 2), 2);
    t.sawtooth_term = -sawtooth(mpq_class(m, 4)) / 2;
    t.constant = mpq_class(1, 24);
    for (auto* v : {&t.quadratic, &t.linear, &t.class_term, &t.b_term, &t.sawtooth_term})
        v->canonicalize();
    t.total = t.quadratic + t.linear + t.class_term + t.b_term + t.sawtooth_term + t.constant;
    t.total.canonicalize();
    return t;
}

inline std::int64_t polar_count_formula(std::int64_t m, const std::vector<std::int32_t>* table)
{
    const auto t = polar_terms(m, table);
    if (t.total.get_den() != 1)
        throw PolarConventionError(t);
    return t.total.get_num().get_si();
}

} // namespace detail

inline PolarFormulaTerms polar_formula_terms(std::int64_t m) { return detail::polar_terms(m, nullptr); }

/// The closed form for the number of polar terms at index m.
inline std::int64_t polar_count_formula(std::int64_t m) { return detail::polar_count_formula(m, nullptr); }

/// sum_{l=1}^m ceil(l^2 / 4m), counting (n, l) with n >= 0, 1 <= l <= m and
/// 4mn - l^2 < 0. Linear in m with no divisions.
inline std::int64_t polar_count_bruteforce(std::int64_t m)
{
    if (m < 1)
        throw std::invalid_argument("polar count needs m >= 1");
    const std::int64_t M = 4 * m;
    std::int64_t quot = 0, rem = 0, total = 0;  // l^2 = quot*M + rem
    for (std::int64_t l = 1; l <= m; ++l) {
        rem += 2 * l - 1;
        if (rem >= M) {
            rem -= M;
            ++quot;
        }
        total += quot + (rem > 0 ? 1 : 0);
    }
    return total;
}

struct PolarCountReport {
    std::int64_t m{0};
    std::int64_t J{0};
    std::int64_t P_formula{0};
    std::int64_t P_bruteforce{0};
    std::int64_t excess{0};
    double normalized_excess{0};
};

struct HistogramBin {
    double left{0}, right{0};
    std::int64_t count{0};
};

struct CdfPoint {
    double value{0};
    double cumulative_fraction{0};
};

struct FigureData {
    std::int64_t mmax{0};
    std::vector<PolarCountReport> points;
    double bin_width{0};
    std::vector<HistogramBin> histogram;
    std::vector<CdfPoint> cdf;
    /// max |normalized_excess| and where it occurs.
    double c_scan{0};
    std::int64_t c_scan_m{0};
};

/// Rows for m = lo..hi-1 with the formula checked against brute force.
inline std::vector<PolarCountReport> polar_rows(std::int64_t lo, std::int64_t hi, unsigned jobs = 1)
{
    const auto table = class_number_table(4 * std::max<std::int64_t>(hi - 1, 1));
    return parallel_map<PolarCountReport>(lo, hi, jobs, [&](std::int64_t m) {
        PolarCountReport r;
        r.m = m;
        r.J = jacobi_dim(m);
        r.P_formula = detail::polar_count_formula(m, &table);
        r.P_bruteforce = polar_count_bruteforce(m);
        if (r.P_formula != r.P_bruteforce)
            throw std::logic_error("polar count mismatch at m=" + std::to_string(m) + ": formula " +
                                   std::to_string(r.P_formula) + ", brute force " + std::to_string(r.P_bruteforce));
        r.excess = r.P_formula - r.J;
        const double md = static_cast<double>(m);
        r.normalized_excess = static_cast<double>(24 * r.P_formula - 2 * m * m - 15 * m) / (24 * std::sqrt(md));
        return r;
    });
}

namespace detail
{

// Linear-interpolation quantile of sorted data.
inline double quantile(const std::vector<double>& sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size())
        return sorted.back();
    return sorted[i] + (pos - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

} // namespace detail

/// (P(m) - m^2/12 - 5m/8)/sqrt(m) for m = 1..mmax, with a Freedman-Diaconis
/// histogram and the empirical CDF.
inline FigureData figure_data(std::int64_t mmax, unsigned jobs = 1)
{
    if (mmax < 1)
        throw std::invalid_argument("figure_data needs mmax >= 1");
    FigureData f;
    f.mmax = mmax;
    f.points = polar_rows(1, mmax + 1, jobs);

    std::vector<double> v;
    v.reserve(f.points.size());
    for (const auto& p : f.points) {
        v.push_back(p.normalized_excess);
        if (std::abs(p.normalized_excess) > f.c_scan) {
            f.c_scan = std::abs(p.normalized_excess);
            f.c_scan_m = p.m;
        }
    }
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    const double lo = v.front(), hi = v.back();
    const double iqr = detail::quantile(v, 0.75) - detail::quantile(v, 0.25);
    f.bin_width = 2 * iqr / std::cbrt(n);
    std::size_t nbins = 1;
    if (f.bin_width > 0 && hi > lo)
        nbins = static_cast<std::size_t>(std::ceil((hi - lo) / f.bin_width));
    else
        f.bin_width = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < nbins; ++i)
        f.histogram.push_back({lo + static_cast<double>(i) * f.bin_width, lo + static_cast<double>(i + 1) * f.bin_width, 0});
    for (double x : v) {
        auto i = static_cast<std::size_t>((x - lo) / f.bin_width);
        ++f.histogram[std::min(i, nbins - 1)].count;
    }
    f.cdf.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i + 1 == v.size() || v[i + 1] != v[i])
            f.cdf.push_back({v[i], static_cast<double>(i + 1) / n});
    return f;
}

/// Indices for which an extremal N = 2 elliptic genus is known or expected
/// to exist from the full linear-algebra criterion. Reported only.
inline const std::vector<std::int64_t>& reported_extremal_indices()
{
    static const std::vector<std::int64_t> v{1, 2, 3, 4, 5, 7, 8, 11, 13};
    return v;
}

struct ExtremalRow {
    std::int64_t m{0};
    std::int64_t J{0};
    std::int64_t P{0};
    std::int64_t J_minus_P{0};
    bool flagged{false};  // J >= P
    bool reported{false}; // in reported_extremal_indices()
};

struct ExtremalReport {
    std::vector<ExtremalRow> rows;
    std::vector<std::int64_t> flagged;
    bool matches_reported{false};
    /// P - J > 0 for m >= 100 and its minimum over consecutive blocks of 100
    /// indices is nondecreasing.
    bool excess_grows{true};
};

inline ExtremalReport extremal_n2_report(std::int64_t mmax, unsigned jobs = 1)
{
    if (mmax < 13)
        throw std::invalid_argument("extremal_n2_report needs mmax >= 13");
    ExtremalReport rep;
    const auto& listed = reported_extremal_indices();
    for (const auto& p : polar_rows(1, mmax + 1, jobs)) {
        ExtremalRow r{p.m, p.J, p.P_formula, p.J - p.P_formula, p.J >= p.P_formula,
                      std::find(listed.begin(), listed.end(), p.m) != listed.end()};
        if (r.flagged)
            rep.flagged.push_back(r.m);
        rep.rows.push_back(r);
    }
    std::vector<std::int64_t> within;
    for (auto m : rep.flagged)
        if (m <= mmax)
            within.push_back(m);
    std::vector<std::int64_t> listed_within;
    for (auto m : listed)
        if (m <= mmax)
            listed_within.push_back(m);
    rep.matches_reported = within == listed_within;

    std::int64_t prev_block_min = 0;
    for (std::int64_t start = 100; start <= mmax; start += 100) {
        std::int64_t block_min = INT64_MAX;
        for (std::int64_t m = start; m < std::min(start + 100, mmax + 1); ++m)
            block_min = std::min(block_min, -rep.rows[static_cast<std::size_t>(m - 1)].J_minus_P);
        if (block_min <= 0 || (start + 100 <= mmax + 1 && block_min < prev_block_min))
            rep.excess_grows = false;
        if (start + 100 <= mmax + 1)
            prev_block_min = block_min;
    }
    return rep;
}

} // namespace bhcg
