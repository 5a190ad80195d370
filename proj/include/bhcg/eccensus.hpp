#pragma once

// Census of elliptic curves y^2 = x^3 + Ax + B over small prime fields:
// isomorphism classes, traces of Frobenius, and n-torsion structure, for
// checking the class-number formulas for the number of classes per trace.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "integer.hpp"
#include "quadform.hpp"

namespace bhcg
{

inline constexpr std::int64_t kCensusMaxPrime = 200;

struct CurveClass {
    std::int64_t q{0};
    std::int64_t A{0}, B{0};
    std::int64_t point_count{0};
    std::int64_t trace{0};
    /// Number of pairs (A', B') = (u^4 A, u^6 B) in the class.
    std::int64_t orbit_size{0};
};

namespace detail
{

inline void require_census_prime(std::int64_t q)
{
    if (q <= 3)
        throw std::invalid_argument("q = " + std::to_string(q) +
                                    ": the short Weierstrass model needs characteristic > 3");
    if (q > kCensusMaxPrime)
        throw std::invalid_argument("q = " + std::to_string(q) + " exceeds the census limit " +
                                    std::to_string(kCensusMaxPrime));
    if (!is_prime(q))
        throw std::invalid_argument("q = " + std::to_string(q) + " is not prime");
}

// chi[v] for v in [0, q).
inline std::vector<int> quadratic_character(std::int64_t q)
{
    std::vector<int> chi(static_cast<std::size_t>(q), -1);
    chi[0] = 0;
    for (std::int64_t x = 1; x < q; ++x)
        chi[static_cast<std::size_t>(x * x % q)] = 1;
    return chi;
}

inline std::int64_t count_points(std::int64_t q, std::int64_t A, std::int64_t B, const std::vector<int>& chi)
{
    std::int64_t n = q + 1;
    for (std::int64_t x = 0; x < q; ++x)
        n += chi[static_cast<std::size_t>(((x * x % q) * x + A * x + B) % q)];
    return n;
}

} // namespace detail

/// One representative per F_q-isomorphism class, in increasing (A, B) order.
inline std::vector<CurveClass> enumerate_curves(std::int64_t q)
{
    detail::require_census_prime(q);
    const auto chi = detail::quadratic_character(q);
    std::vector<char> seen(static_cast<std::size_t>(q * q), 0);
    std::vector<CurveClass> out;
    for (std::int64_t A = 0; A < q; ++A)
        for (std::int64_t B = 0; B < q; ++B) {
            if ((4 * A * A % q * A + 27 * B * B) % q == 0 || seen[static_cast<std::size_t>(A * q + B)])
                continue;
            std::int64_t orbit = 0;
            for (std::int64_t u = 1; u < q; ++u) {
                const std::int64_t u2 = u * u % q, u4 = u2 * u2 % q, u6 = u4 * u2 % q;
                auto& s = seen[static_cast<std::size_t>((u4 * A % q) * q + u6 * B % q)];
                if (!s) {
                    s = 1;
                    ++orbit;
                }
            }
            CurveClass c{q, A, B, detail::count_points(q, A, B, chi), 0, orbit};
            c.trace = q + 1 - c.point_count;
            if (c.trace * c.trace > 4 * q)
                throw std::logic_error("Hasse bound violated at q=" + std::to_string(q));
            out.push_back(c);
        }
    return out;
}

inline void require_hasse(std::int64_t q, std::int64_t t)
{
    if (t * t > 4 * q)
        throw std::invalid_argument("|t| = " + std::to_string(t < 0 ? -t : t) + " exceeds 2 sqrt(" +
                                    std::to_string(q) + ")");
}

/// N(t): classes with trace t.
inline std::int64_t isogeny_class_size(const std::vector<CurveClass>& census, std::int64_t t)
{
    std::int64_t n = 0;
    for (const auto& c : census)
        if (c.trace == t)
            ++n;
    return n;
}

inline std::int64_t isogeny_class_size(std::int64_t q, std::int64_t t)
{
    detail::require_census_prime(q);
    require_hasse(q, t);
    return isogeny_class_size(enumerate_curves(q), t);
}

struct DeuringEntry {
    std::int64_t t{0};
    std::int64_t observed{0};
    /// Unweighted count of classes of forms of discriminant t^2 - 4q.
    std::int64_t expected{0};
    /// Weighted Hurwitz value at the same discriminant, for reference.
    HurwitzValue hurwitz;
    bool pass{false};
};

struct DeuringReport {
    std::int64_t q{0};
    std::int64_t total_classes{0};
    std::vector<DeuringEntry> entries;
    bool passed{true};
};

/// Compares N(t) with the class count of discriminant t^2 - 4q for every
/// t^2 < 4q with q not dividing t, and for the supersingular trace t = 0.
inline DeuringReport verify_deuring(std::int64_t q)
{
    const auto census = enumerate_curves(q);
    DeuringReport r;
    r.q = q;
    r.total_classes = static_cast<std::int64_t>(census.size());
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& c : census)
        ++counts[c.trace];
    for (std::int64_t t = -detail::isqrt(4 * q); t <= detail::isqrt(4 * q); ++t) {
        if (t * t >= 4 * q)
            continue;
        if (t % q == 0 && t != 0)
            continue;
        DeuringEntry e;
        e.t = t;
        e.observed = counts.count(t) ? counts[t] : 0;
        e.expected = kronecker_class_number(t * t - 4 * q);
        e.hurwitz = hurwitz(t * t - 4 * q);
        e.pass = e.observed == e.expected;
        r.passed = r.passed && e.pass;
        r.entries.push_back(e);
    }
    return r;
}

namespace detail
{

struct AffinePoint {
    std::int64_t x, y;
};

using CurvePoint = std::optional<AffinePoint>;

inline CurvePoint add_points(const CurvePoint& P, const CurvePoint& Q, std::int64_t A, std::int64_t q)
{
    if (!P)
        return Q;
    if (!Q)
        return P;
    const auto [x1, y1] = *P;
    const auto [x2, y2] = *Q;
    std::int64_t lambda;
    if (x1 == x2) {
        if ((y1 + y2) % q == 0)
            return std::nullopt;
        lambda = (3 * x1 * x1 + A) % q * inverse_mod(2 * y1 % q, q) % q;
    } else {
        lambda = floor_mod(y2 - y1, q) * inverse_mod(floor_mod(x2 - x1, q), q) % q;
    }
    const std::int64_t x3 = floor_mod(lambda * lambda - x1 - x2, q);
    const std::int64_t y3 = floor_mod(lambda * (x1 - x3) - y1, q);
    return AffinePoint{x3, y3};
}

inline CurvePoint multiply_point(std::int64_t n, CurvePoint P, std::int64_t A, std::int64_t q)
{
    CurvePoint R;
    while (n > 0) {
        if (n & 1)
            R = add_points(R, P, A, q);
        n >>= 1;
        if (n > 0)
            P = add_points(P, P, A, q);
    }
    return R;
}

} // namespace detail

/// #{P in E(F_q) : nP = O}, counting the point at infinity.
inline std::int64_t n_torsion_size(const CurveClass& c, std::int64_t n)
{
    const std::int64_t q = c.q;
    std::vector<std::vector<std::int64_t>> roots(static_cast<std::size_t>(q));
    for (std::int64_t y = 0; y < q; ++y)
        roots[static_cast<std::size_t>(y * y % q)].push_back(y);
    std::int64_t count = 1;
    for (std::int64_t x = 0; x < q; ++x) {
        const std::int64_t v = ((x * x % q) * x + c.A * x + c.B) % q;
        for (std::int64_t y : roots[static_cast<std::size_t>(v)])
            if (!detail::multiply_point(n, detail::AffinePoint{x, y}, c.A, q))
                ++count;
    }
    return count;
}

inline void require_torsion_conditions(std::int64_t q, std::int64_t t, std::int64_t n)
{
    detail::require_census_prime(q);
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("n must be odd and >= 1, got " + std::to_string(n));
    require_hasse(q, t);
    if (t % q == 0)
        throw std::invalid_argument("q divides t");
    if ((q - 1) % n != 0)
        throw std::invalid_argument("q = " + std::to_string(q) + " is not 1 mod n = " + std::to_string(n));
    if (detail::floor_mod(t - q - 1, n * n) != 0)
        throw std::invalid_argument("t = " + std::to_string(t) + " is not q + 1 mod n^2 = " + std::to_string(n * n));
}

/// Classes of trace t whose n-torsion over F_q is all of (Z/n)^2.
inline std::int64_t torsion_class_count(std::int64_t q, std::int64_t t, std::int64_t n)
{
    require_torsion_conditions(q, t, n);
    std::int64_t count = 0;
    for (const auto& c : enumerate_curves(q))
        if (c.trace == t && n_torsion_size(c, n) == n * n)
            ++count;
    return count;
}

/// H((t^2 - 4q)/n^2), the weighted value.
inline HurwitzValue expected_torsion_count(std::int64_t q, std::int64_t t, std::int64_t n)
{
    require_torsion_conditions(q, t, n);
    return hurwitz((t * t - 4 * q) / (n * n));
}

struct TorsionReport {
    std::int64_t q{0}, t{0}, n{0};
    std::int64_t observed{0};
    HurwitzValue hurwitz;
    std::int64_t kronecker{0};
    std::int64_t primitive{0};
    bool fractional() const { return !hurwitz.is_integral(); }
    bool matches_kronecker() const { return observed == kronecker; }
};

inline TorsionReport torsion_report(std::int64_t q, std::int64_t t, std::int64_t n)
{
    TorsionReport r;
    r.q = q;
    r.t = t;
    r.n = n;
    r.observed = torsion_class_count(q, t, n);
    const std::int64_t d = (t * t - 4 * q) / (n * n);
    r.hurwitz = hurwitz(d);
    r.kronecker = kronecker_class_number(d);
    r.primitive = class_number(d);
    return r;
}

/// Every t admissible for (q, n).
inline std::vector<std::int64_t> admissible_torsion_traces(std::int64_t q, std::int64_t n)
{
    std::vector<std::int64_t> ts;
    for (std::int64_t t = -detail::isqrt(4 * q); t <= detail::isqrt(4 * q); ++t) {
        try {
            require_torsion_conditions(q, t, n);
            ts.push_back(t);
        } catch (const std::invalid_argument&) {
        }
    }
    return ts;
}

} // namespace bhcg
