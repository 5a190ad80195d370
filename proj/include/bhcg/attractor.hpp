#pragma once

// Charge bookkeeping for BPS attractor black holes on K3 x T^2: the T-duality
// invariants (p^2, p.q, q^2), their quadratic forms and U-duality classes,
// explicit 12-component charge vectors, SL(2,R) solution-generating
// matrices, CM points and Hilbert class polynomials.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mpreal.hpp"
#include "qseries.hpp"
#include "quadform.hpp"

namespace bhcg
{

struct ChargeInvariants {
    std::int64_t p2{0}, pq{0}, q2{0};

    friend bool operator==(const ChargeInvariants&, const ChargeInvariants&) = default;
};

/// D = 4((p.q)^2 - p^2 q^2).
inline std::int64_t discriminant_of_charges(const ChargeInvariants& ci)
{
    return 4 * (ci.pq * ci.pq - ci.p2 * ci.q2);
}

/// S = pi sqrt(-D).
inline double entropy(std::int64_t D)
{
    if (D >= 0)
        throw std::invalid_argument("entropy needs D < 0, got " + std::to_string(D));
    return M_PI * std::sqrt(static_cast<double>(-D));
}

/// [p^2, -2 p.q, q^2].
inline Form form_from_charges(const ChargeInvariants& ci)
{
    if (ci.p2 <= 0 || ci.p2 * ci.q2 - ci.pq * ci.pq <= 0)
        throw std::invalid_argument("charge invariants are not positive definite: (" + std::to_string(ci.p2) +
                                    "," + std::to_string(ci.pq) + "," + std::to_string(ci.q2) + ")");
    return {ci.p2, -2 * ci.pq, ci.q2};
}

struct BlackHoleClass {
    ChargeInvariants charges;
    Form form;
    double entropy{0};
};

/// One representative per U-duality class at discriminant D: each reduced
/// primitive form [a,b,c] gives charges (a, -b/2, c).
inline std::vector<BlackHoleClass> classify_black_holes(std::int64_t D)
{
    if (D >= 0)
        throw std::invalid_argument("classify_black_holes needs D < 0, got " + std::to_string(D));
    if (detail::floor_mod(D, std::int64_t{4}) != 0)
        throw std::invalid_argument("D = " + std::to_string(D) +
                                    " is 1 mod 4: forms [p^2, -2p.q, q^2] built from charges have even "
                                    "middle coefficient, so only D = 0 mod 4 is realized");
    std::vector<BlackHoleClass> out;
    const double S = entropy(D);
    for (const auto& f : enumerate_reduced(D))
        out.push_back({{f.a, -f.b / 2, f.c}, f, S});
    return out;
}

/// The 12x12 metric with off-diagonal 6x6 identity blocks.
struct MetricL {
    static constexpr int dimension = 12;
    static constexpr int entry(int i, int j) { return (i + 6 == j || j + 6 == i) ? 1 : 0; }

    static std::array<std::array<int, 12>, 12> matrix()
    {
        std::array<std::array<int, 12>, 12> m{};
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = entry(i, j);
        return m;
    }
};

/// Twelve rational components, optionally scaled by an overall 1/sqrt(2).
struct ChargeVector {
    std::vector<mpq_class> components;
    bool scaled{true};

    ChargeVector() : components(12, mpq_class(0)) {}
    ChargeVector(std::vector<mpq_class> c, bool s = true) : components(std::move(c)), scaled(s) {}
};

/// v^T L w. Two scaled vectors pick up the factor (1/sqrt 2)^2 = 1/2.
inline mpq_class inner(const ChargeVector& v, const ChargeVector& w)
{
    if (v.components.size() != 12 || w.components.size() != 12)
        throw std::invalid_argument("charge vectors must have 12 components");
    if (v.scaled != w.scaled)
        throw std::invalid_argument("inner product of a scaled and an unscaled vector is irrational");
    mpq_class s = 0;
    for (int i = 0; i < 6; ++i) {
        s += v.components[static_cast<std::size_t>(i)] * w.components[static_cast<std::size_t>(i + 6)];
        s += v.components[static_cast<std::size_t>(i + 6)] * w.components[static_cast<std::size_t>(i)];
    }
    if (v.scaled)
        s /= 2;
    return s;
}

inline ChargeInvariants invariants_of(const ChargeVector& p, const ChargeVector& q)
{
    auto as_int = [](const mpq_class& x) {
        if (x.get_den() != 1)
            throw std::domain_error("non-integral invariant " + x.get_str());
        return static_cast<std::int64_t>(x.get_num().get_si());
    };
    return {as_int(inner(p, p)), as_int(inner(p, q)), as_int(inner(q, q))};
}

struct ChargeExample {
    ChargeVector p, q;
    ChargeInvariants stated;
};

namespace detail
{

inline ChargeVector charge_vector(std::initializer_list<std::pair<int, long>> entries)
{
    ChargeVector v;
    for (const auto& [i, x] : entries)
        v.components[static_cast<std::size_t>(i)] = x;
    return v;
}

} // namespace detail

/// The explicit vectors for D = -20 (two classes) and D = -84 (four classes),
/// with the invariants they are meant to realize.
inline std::vector<ChargeExample> example_charge_vectors(std::int64_t D)
{
    using detail::charge_vector;
    if (D == -20)
        return {
            {charge_vector({{0, 1}, {6, 1}}), charge_vector({{1, 5}, {7, 1}}), {1, 0, 5}},
            {charge_vector({{0, 2}, {6, 1}}), charge_vector({{1, 3}, {6, 1}, {7, 1}}), {2, 1, 3}},
        };
    if (D == -84)
        return {
            {charge_vector({{0, 1}, {6, 1}}), charge_vector({{1, 21}, {7, 1}}), {1, 0, 21}},
            {charge_vector({{0, 3}, {6, 1}}), charge_vector({{1, 7}, {7, 1}}), {3, 0, 7}},
            {charge_vector({{0, 2}, {6, 1}}), charge_vector({{0, 2}, {1, 11}, {7, 1}}), {2, 1, 11}},
            {charge_vector({{0, 5}, {6, 1}}), charge_vector({{0, 4}, {1, 5}, {7, 1}}), {5, 2, 5}},
        };
    throw std::invalid_argument("explicit charge vectors are only tabulated for D = -20 and D = -84");
}

/// Vectors with p^2 = a, p.q = 0, q^2 = -D/(4a).
inline ChargeExample order_two_charge_vectors(std::int64_t a, std::int64_t D)
{
    if (a <= 0 || D >= 0 || (-D) % (4 * a) != 0)
        throw std::invalid_argument("need a > 0, D < 0 and 4a | -D");
    const std::int64_t c = -D / (4 * a);
    return {detail::charge_vector({{0, 1}, {6, static_cast<long>(a)}}),
            detail::charge_vector({{1, static_cast<long>(c)}, {7, 1}}),
            {a, 0, c}};
}

struct Matrix2x2 {
    double a{1}, b{0}, c{0}, d{1};

    double det() const { return a * d - b * c; }
    bool is_sl2(double tol = 1e-12) const { return std::abs(det() - 1) <= tol; }

    friend Matrix2x2 operator*(const Matrix2x2& x, const Matrix2x2& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    double distance(const Matrix2x2& y) const
    {
        return std::max({std::abs(a - y.a), std::abs(b - y.b), std::abs(c - y.c), std::abs(d - y.d)});
    }
};

/// Invariants after an SL(2,R) transformation, in general not integral.
struct RealChargeInvariants {
    double p2{0}, pq{0}, q2{0};

    double discriminant() const { return 4 * (pq * pq - p2 * q2); }
};

/// p' = a p + b q, q' = c p + d q, written on the invariants.
inline RealChargeInvariants sl2_transform_invariants(const RealChargeInvariants& ci, const Matrix2x2& M)
{
    if (!M.is_sl2(1e-12))
        throw std::invalid_argument("matrix is not in SL(2,R): det = " + std::to_string(M.det()));
    return {M.a * M.a * ci.p2 + 2 * M.a * M.b * ci.pq + M.b * M.b * ci.q2,
            M.a * M.c * ci.p2 + (M.a * M.d + M.b * M.c) * ci.pq + M.b * M.d * ci.q2,
            M.c * M.c * ci.p2 + 2 * M.c * M.d * ci.pq + M.d * M.d * ci.q2};
}

inline RealChargeInvariants sl2_transform_invariants(const ChargeInvariants& ci, const Matrix2x2& M)
{
    return sl2_transform_invariants(
        RealChargeInvariants{static_cast<double>(ci.p2), static_cast<double>(ci.pq), static_cast<double>(ci.q2)}, M);
}

/// ((0, 2 sqrt(a/-D)), (-(1/2) sqrt(-D/a), 0)): carries (1, 0, -D/4) to
/// (a, 0, -D/(4a)) and squares to -I.
inline Matrix2x2 canonical_sl2_element(std::int64_t a, std::int64_t D)
{
    if (a <= 0 || D >= 0)
        throw std::invalid_argument("canonical_sl2_element needs a > 0 and D < 0");
    if ((-D) % (4 * a) != 0)
        throw std::invalid_argument("canonical_sl2_element needs 4a | -D");
    const double r = static_cast<double>(a) / static_cast<double>(-D);
    return {0, 2 * std::sqrt(r), -0.5 / std::sqrt(r), 0};
}

/// The SL(2,R) element relating the two D = -20 classes.
inline Matrix2x2 example_sl2_element_d20()
{
    const double s = std::sqrt(23.0);
    return {-1 / s, 3 / s, -8 / s, 1 / s};
}

struct OmegaResiduals {
    double first{0};   // |Omega (a p1 + b q1) - p2|_inf
    double second{0};  // |Omega (c p1 + d q1) - q2|_inf
    double det{0};     // |ad - bc - 1|
    double metric{0};  // |Omega^T L Omega - L|_inf
    double max() const { return std::max({first, second, det, metric}); }
};

/// Residuals of the four constraints tying an O(6,6;R) x SL(2,R) pair to a
/// pair of charge vectors. Only a checker: nothing here searches for Omega.
inline OmegaResiduals omega_constraint_residuals(const std::array<std::array<double, 12>, 12>& omega,
                                                 const Matrix2x2& M, const ChargeVector& p1,
                                                 const ChargeVector& q1, const ChargeVector& p2,
                                                 const ChargeVector& q2)
{
    auto value = [](const ChargeVector& v, std::size_t i) {
        return v.components[i].get_d() * (v.scaled ? 1 / std::sqrt(2.0) : 1.0);
    };
    OmegaResiduals r;
    for (std::size_t i = 0; i < 12; ++i) {
        double x = 0, y = 0;
        for (std::size_t j = 0; j < 12; ++j) {
            x += omega[i][j] * (M.a * value(p1, j) + M.b * value(q1, j));
            y += omega[i][j] * (M.c * value(p1, j) + M.d * value(q1, j));
        }
        r.first = std::max(r.first, std::abs(x - value(p2, i)));
        r.second = std::max(r.second, std::abs(y - value(q2, i)));
    }
    r.det = std::abs(M.det() - 1);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            double s = 0;
            for (int k = 0; k < 12; ++k)
                for (int l = 0; l < 12; ++l)
                    s += omega[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * MetricL::entry(k, l) *
                         omega[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
            r.metric = std::max(r.metric, std::abs(s - MetricL::entry(i, j)));
        }
    return r;
}

/// Upper-half-plane root of a tau^2 + b tau + c = 0.
inline Complex attractor_tau(const Form& f)
{
    require_positive_definite(f);
    const Real two_a = Real(2 * f.a);
    return {Real(-f.b) / two_a, boost::multiprecision::sqrt(Real(-f.discriminant())) / two_a};
}

struct HilbertClassPolynomial {
    std::int64_t D{0};
    /// Ascending coefficients, monic of degree h(D).
    std::vector<mpz_class> coefficients;
    /// Largest distance of a computed coefficient from its rounded value.
    double residual{0};
    unsigned digits{0};
    std::vector<Form> forms;

    std::int64_t degree() const { return static_cast<std::int64_t>(coefficients.size()) - 1; }
};

/// Working precision that covers the largest coefficient: every conjugate
/// contributes about pi sqrt|D| / (a ln 10) digits.
inline unsigned hilbert_precision_estimate(std::int64_t D)
{
    double digits = 15;
    const auto forms = enumerate_reduced(D);
    for (const auto& f : forms)
        digits += std::ceil(M_PI * std::sqrt(static_cast<double>(-D)) / (static_cast<double>(f.a) * std::log(10.0)));
    return static_cast<unsigned>(digits) + static_cast<unsigned>(forms.size());
}

/// H_D(X) = prod over reduced forms Q of (X - j(tau_Q)), evaluated from the
/// q-expansion of j and rounded. digits = 0 picks hilbert_precision_estimate.
inline HilbertClassPolynomial hilbert_class_polynomial(std::int64_t D, unsigned digits = 0)
{
    if (D >= 0 || !is_fundamental(D))
        throw std::invalid_argument("hilbert_class_polynomial needs a fundamental D < 0, got " + std::to_string(D));
    const unsigned estimate = hilbert_precision_estimate(D);
    if (digits == 0)
        digits = estimate;
    HilbertClassPolynomial out;
    out.D = D;
    out.digits = digits;
    out.forms = enumerate_reduced(D);

    // Reduced forms have Im tau >= sqrt(3)/2; pick the order for that worst case.
    const double log10_q = -M_PI * std::sqrt(3.0) / std::log(10.0);
    std::int64_t order = 16;
    QSeries j = j_series(order);
    while (detail::log10_tail(j, log10_q) > -static_cast<double>(digits) - 5) {
        order *= 2;
        j = j_series(order);
    }

    ScopedPrecision prec(digits + 10);
    std::vector<Complex> poly{Complex(Real(1))};
    for (const auto& f : out.forms) {
        const Complex jt = j.evaluate(nome(attractor_tau(f)));
        // poly *= (X - jt)
        std::vector<Complex> next(poly.size() + 1);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] = next[i] - jt * poly[i];
        }
        poly = std::move(next);
    }
    out.coefficients.resize(poly.size());
    Real worst = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Real rounded = boost::multiprecision::round(poly[i].re);
        mpfr_get_z(out.coefficients[i].get_mpz_t(), rounded.backend().data(), MPFR_RNDN);
        worst = boost::multiprecision::max(worst, boost::multiprecision::abs(poly[i].re - rounded));
        worst = boost::multiprecision::max(worst, boost::multiprecision::abs(poly[i].im));
    }
    out.residual = worst.convert_to<double>();
    if (out.residual >= 1e-4)
        throw std::runtime_error("precision shortfall for D = " + std::to_string(D) + ": rounding residual " +
                                 std::to_string(out.residual) + " at " + std::to_string(digits) +
                                 " digits; about " + std::to_string(estimate) + " digits are needed");
    return out;
}

} // namespace bhcg
