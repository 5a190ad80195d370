#pragma once

// The form class group C(D) of a negative discriminant: Dirichlet
// composition, element orders, elementary divisors, genus theory, the map to
// ideals of the quadratic order, and class-number statistics and bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "integer.hpp"
#include "parallel.hpp"
#include "quadform.hpp"

namespace bhcg
{

/// Identity class I_D: [1,0,-D/4] or [1,1,(1-D)/4].
template <FormInteger Int>
QuadForm<Int> identity(const Int& D)
{
    require_negative_discriminant(D);
    if (detail::floor_mod(D, Int(4)) == 0)
        return {Int(1), Int(0), Int(-D / 4)};
    return {Int(1), Int(1), Int((1 - D) / 4)};
}

inline Form identity(int D) { return identity(std::int64_t{D}); }

template <FormInteger Int>
QuadForm<Int> inverse(const QuadForm<Int>& f)
{
    require_positive_definite(f);
    return reduce(QuadForm<Int>(f.a, -f.b, f.c));
}

namespace detail
{

// f composed with the (x, u; y, v) matrix, xv - uy = 1.
template <FormInteger Int>
QuadForm<Int> transform(const QuadForm<Int>& f, const Int& x, const Int& u, const Int& y, const Int& v)
{
    Int A = f(x, y);
    Int B = 2 * f.a * x * u + f.b * (x * v + u * y) + 2 * f.c * y * v;
    Int C = f(u, v);
    return {A, B, C};
}

// An equivalent form whose leading coefficient is coprime to m. Primitive
// forms represent integers coprime to any m, so the search over primitive
// vectors (x, y) in growing boxes terminates.
template <FormInteger Int>
QuadForm<Int> with_leading_coprime_to(const QuadForm<Int>& g, const Int& m)
{
    for (std::int64_t radius = 1;; ++radius) {
        for (std::int64_t xi = -radius; xi <= radius; ++xi) {
            for (std::int64_t yi = 0; yi <= radius; ++yi) {
                if (std::max(abs_value(xi), yi) != radius)
                    continue;
                Int x = xi, y = yi;
                if (gcd(x, y) != 1)
                    continue;
                Int value = g(x, y);
                if (value <= 0 || gcd(value, m) != 1)
                    continue;
                auto bez = extended_gcd(x, y); // x*s + y*t = 1
                // v = s, u = -t gives x*v - u*y = 1
                Int v = bez.x, u = -bez.y;
                return transform(g, x, u, y, v);
            }
        }
    }
}

} // namespace detail

/// Reduced representative of the Dirichlet composition of the classes of f
/// and g. When gcd(a, a', (b+b')/2) > 1, g is first replaced by an
/// equivalent form with leading coefficient coprime to a.
template <FormInteger Int>
QuadForm<Int> compose(const QuadForm<Int>& f, QuadForm<Int> g)
{
    require_positive_definite(f);
    require_positive_definite(g);
    const Int D = f.discriminant();
    if (g.discriminant() != D)
        throw std::invalid_argument("compose: discriminant mismatch " + f.to_string() + " vs " + g.to_string());
    if (!f.is_primitive() || !g.is_primitive())
        throw std::invalid_argument("compose: imprimitive input " + f.to_string() + ", " + g.to_string());

    Int B = (f.b + g.b) / 2;
    if (detail::gcd(detail::gcd(f.a, g.a), B) != 1) {
        g = detail::with_leading_coprime_to(g, f.a);
        B = (f.b + g.b) / 2;
    }
    const Int& a1 = f.a;
    const Int& a2 = g.a;

    // p*a1 + q*a2 + r*B = 1, then N = p*a1*b2 + q*a2*b1 + r*(b1*b2 + D)/2
    // satisfies all three congruences.
    auto e1 = detail::extended_gcd(a1, a2);
    auto e2 = detail::extended_gcd(e1.g, B);
    if (e2.g != 1)
        throw std::logic_error("compose: gcd condition not satisfied after substitution");
    Int p = e1.x * e2.x;
    Int q = e1.y * e2.x;
    Int r = e2.y;
    Int A = a1 * a2;
    Int two_A = 2 * A;
    Int N = p * a1 * g.b + q * a2 * f.b + r * ((f.b * g.b + D) / 2);
    N = detail::floor_mod(N, two_A);

    Int four_A = 4 * A;
    Int num = N * N - D;
    if (detail::floor_mod(N - f.b, Int(2 * a1)) != 0 || detail::floor_mod(N - g.b, Int(2 * a2)) != 0
        || detail::floor_mod(num, four_A) != 0)
        throw std::logic_error("compose: congruences for N failed for " + f.to_string() + " * " + g.to_string());
    return reduce(QuadForm<Int>(A, N, Int(num / four_A)));
}

/// f^k on classes, k >= 0, by binary powering.
template <FormInteger Int>
QuadForm<Int> power(const QuadForm<Int>& f, std::int64_t k)
{
    if (k < 0)
        return power(inverse(f), -k);
    QuadForm<Int> result = identity(f.discriminant());
    QuadForm<Int> base = reduce(f);
    while (k > 0) {
        if (k & 1)
            result = compose(result, base);
        k >>= 1;
        if (k > 0)
            base = compose(base, base);
    }
    return result;
}

/// Least k >= 1 with f^k in the identity class.
template <FormInteger Int>
std::int64_t element_order(const QuadForm<Int>& f)
{
    const QuadForm<Int> id = identity(f.discriminant());
    const QuadForm<Int> base = reduce(f);
    QuadForm<Int> x = base;
    std::int64_t k = 1;
    while (!(x == id)) {
        x = compose(x, base);
        ++k;
    }
    return k;
}

template <FormInteger Int = std::int64_t>
struct ClassGroupDescription {
    Int D;
    std::vector<QuadForm<Int>> representatives;
    std::vector<std::int64_t> orders;              // parallel to representatives
    std::vector<std::int64_t> elementary_divisors; // d1 | d2 | ... , all > 1

    std::int64_t class_number() const { return static_cast<std::int64_t>(representatives.size()); }

    std::int64_t exponent() const { return elementary_divisors.empty() ? 1 : elementary_divisors.back(); }
};

namespace detail
{

// Invariant factors of a finite abelian group from the multiset of element
// orders: for each prime p, #{x : x^(p^k) = 1} = p^(n_k), and the p-part has
// n_k - n_(k-1) cyclic factors of order >= p^k.
inline std::vector<std::int64_t> elementary_divisors_from_orders(const std::vector<std::int64_t>& orders)
{
    const auto h = static_cast<std::int64_t>(orders.size());
    std::vector<std::vector<std::int64_t>> prime_parts; // per prime, cyclic factor orders descending
    for (std::int64_t p : distinct_prime_factors(h)) {
        std::int64_t p_part = 1;
        for (std::int64_t r = h; r % p == 0; r /= p)
            p_part *= p;
        std::vector<int> rank_at_least; // rank_at_least[k-1] = #factors of order >= p^k
        int prev_exp = 0;
        for (std::int64_t pk = p;; pk *= p) {
            std::int64_t count = 0;
            for (std::int64_t o : orders)
                if (pk % o == 0)
                    ++count;
            int exp = 0;
            for (std::int64_t c = count; c > 1; c /= p)
                ++exp;
            rank_at_least.push_back(exp - prev_exp);
            prev_exp = exp;
            if (count == p_part)
                break;
        }
        // Factor i (0-based, descending) has order p^(#k with rank_at_least[k] > i).
        std::vector<std::int64_t> factors;
        if (!rank_at_least.empty()) {
            for (int i = 0; i < rank_at_least.front(); ++i) {
                std::int64_t q = 1;
                for (int r : rank_at_least)
                    if (r > i)
                        q *= p;
                factors.push_back(q);
            }
        }
        prime_parts.push_back(factors);
    }
    std::size_t n = 0;
    for (const auto& part : prime_parts)
        n = std::max(n, part.size());
    std::vector<std::int64_t> divisors(n, 1); // descending for now
    for (const auto& part : prime_parts)
        for (std::size_t i = 0; i < part.size(); ++i)
            divisors[i] *= part[i];
    std::reverse(divisors.begin(), divisors.end());
    return divisors;
}

} // namespace detail

/// Above this class number group_structure stops building the full
/// multiplication table and computes orders by powering instead.
inline constexpr std::int64_t kCompositionTableLimit = 512;

template <FormInteger Int>
ClassGroupDescription<Int> group_structure(const Int& D)
{
    ClassGroupDescription<Int> out;
    out.D = D;
    out.representatives = enumerate_reduced(D);
    const auto& reps = out.representatives;
    const auto h = static_cast<std::int64_t>(reps.size());
    out.orders.assign(reps.size(), 1);

    if (h <= kCompositionTableLimit) {
        std::map<QuadForm<Int>, std::size_t> index;
        for (std::size_t i = 0; i < reps.size(); ++i)
            index.emplace(reps[i], i);
        std::vector<std::vector<std::size_t>> table(reps.size(), std::vector<std::size_t>(reps.size()));
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (std::size_t j = i; j < reps.size(); ++j)
                table[i][j] = table[j][i] = index.at(compose(reps[i], reps[j]));
        const std::size_t id = index.at(identity(D));
        for (std::size_t i = 0; i < reps.size(); ++i) {
            std::size_t x = i;
            std::int64_t k = 1;
            while (x != id) {
                x = table[x][i];
                ++k;
            }
            out.orders[i] = k;
        }
    } else {
        const auto id = identity(D);
        const auto divs = divisors(h);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            for (std::int64_t d : divs) {
                if (power(reps[i], d) == id) {
                    out.orders[i] = d;
                    break;
                }
            }
        }
    }
    out.elementary_divisors = detail::elementary_divisors_from_orders(out.orders);
    return out;
}

inline ClassGroupDescription<std::int64_t> group_structure(int D) { return group_structure(std::int64_t{D}); }

/// Number of distinct primes dividing D.
inline int genus_prime_count(std::int64_t D) { return static_cast<int>(distinct_prime_factors(D).size()); }

/// #{f in C(D) : f^2 = 1}, counted by composing every class with itself.
inline std::int64_t two_torsion_order(std::int64_t D)
{
    if (D >= 0 || !is_fundamental(D))
        throw std::invalid_argument("two_torsion_order requires a negative fundamental discriminant, got "
                                    + std::to_string(D));
    const Form id = identity(D);
    std::int64_t count = 0;
    detail::for_each_reduced(D, true, [&](const Form& f) {
        if (compose(f, f) == id)
            ++count;
    });
    return count;
}

/// The ideal (a, (-b + sqrt(D))/2) attached to [a,b,c].
template <FormInteger Int = std::int64_t>
struct IdealDescription {
    Int D;
    Int generator_a;
    Int b; // second generator is (-b + sqrt(D))/2

    Int norm() const { return generator_a; }
};

template <FormInteger Int>
IdealDescription<Int> ideal_from_form(const QuadForm<Int>& f)
{
    require_positive_definite(f);
    const Int D = f.discriminant();
    if (!is_fundamental(detail::to_int64(D)))
        throw std::invalid_argument("ideal_from_form requires a fundamental discriminant, got " + detail::to_string(D));
    if (!f.is_primitive())
        throw std::invalid_argument("ideal_from_form requires a primitive form");
    return {D, f.a, f.b};
}

/// A rank-2 sublattice of O_D in Hermite normal form with respect to the
/// basis (1, w), w = (D + sqrt(D))/2:  Z*n1 + Z*(m + n2*w).
template <FormInteger Int = std::int64_t>
struct IdealLattice {
    Int D;
    Int n1, m, n2;

    Int norm() const { return n1 * n2; }
};

namespace detail
{

// Elements of O_D are stored as (x, y) meaning (x + y*sqrt(D))/2 with
// x = y*D mod 2.
template <FormInteger Int>
struct OrderElement {
    Int x, y;
};

template <FormInteger Int>
OrderElement<Int> multiply(const OrderElement<Int>& s, const OrderElement<Int>& t, const Int& D)
{
    return {Int((s.x * t.x + s.y * t.y * D) / 2), Int((s.x * t.y + s.y * t.x) / 2)};
}

template <FormInteger Int>
IdealLattice<Int> hnf_lattice(const std::vector<OrderElement<Int>>& gens, const Int& D)
{
    // coordinates in (1, w): element = u + v*w with v = y, u = (x - y*D)/2
    Int pu = 0, pv = 0, n1 = 0;
    for (const auto& e : gens) {
        Int u = (e.x - e.y * D) / 2, v = e.y;
        while (v != 0) {
            Int q = pv / v;
            Int nu = pu - q * u, nv = pv - q * v;
            pu = u;
            pv = v;
            u = nu;
            v = nv;
        }
        n1 = gcd(n1, u);
    }
    if (pv < 0) {
        pu = -pu;
        pv = -pv;
    }
    if (n1 == 0 || pv == 0)
        throw std::logic_error("hnf_lattice: generators do not span a full-rank lattice");
    return {D, abs_value(n1), floor_mod(pu, n1), pv};
}

} // namespace detail

template <FormInteger Int>
IdealLattice<Int> ideal_lattice(const IdealDescription<Int>& I)
{
    using E = detail::OrderElement<Int>;
    return detail::hnf_lattice(std::vector<E>{E{Int(2 * I.generator_a), Int(0)}, E{Int(-I.b), Int(1)}}, I.D);
}

/// Product ideal, as the Z-span of the four generator products.
template <FormInteger Int>
IdealLattice<Int> ideal_product(const IdealDescription<Int>& I, const IdealDescription<Int>& J)
{
    using E = detail::OrderElement<Int>;
    if (I.D != J.D)
        throw std::invalid_argument("ideal_product: discriminant mismatch");
    const Int& D = I.D;
    const E gi[2] = {E{Int(2 * I.generator_a), Int(0)}, E{Int(-I.b), Int(1)}};
    const E gj[2] = {E{Int(2 * J.generator_a), Int(0)}, E{Int(-J.b), Int(1)}};
    std::vector<E> gens;
    for (const auto& s : gi)
        for (const auto& t : gj)
            gens.push_back(detail::multiply(s, t, D));
    return detail::hnf_lattice(gens, D);
}

/// N(x*alpha - y*beta)/N(I) for the oriented basis alpha = n1,
/// beta = m + n2*w. Inverts ideal_from_form up to equivalence.
template <FormInteger Int>
QuadForm<Int> norm_form(const IdealLattice<Int>& L)
{
    const Int& D = L.D;
    // alpha = (2*n1, 0); beta = (2m + n2*D, n2) in the (x, y) representation
    const Int X1 = 2 * L.n1, Y1 = 0;
    const Int X2 = 2 * L.m + L.n2 * D, Y2 = L.n2;
    const Int N1 = (X1 * X1 - Y1 * Y1 * D) / 4;
    const Int N2 = (X2 * X2 - Y2 * Y2 * D) / 4;
    const Int trace = (X1 * X2 - Y1 * Y2 * D) / 2; // Tr(alpha * conj(beta))
    const Int nI = L.norm();
    if (detail::floor_mod(N1, nI) != 0 || detail::floor_mod(trace, nI) != 0 || detail::floor_mod(N2, nI) != 0)
        throw std::logic_error("norm_form: lattice is not an ideal");
    return {Int(N1 / nI), Int(-trace / nI), Int(N2 / nI)};
}

/// (1/7000) log|D| prod_{p | D, p != |D|} (1 - floor(2 sqrt p)/(p + 1)).
inline double ggz_lower_bound(std::int64_t D)
{
    if (D >= 0)
        throw std::invalid_argument("ggz_lower_bound expects D < 0");
    const std::int64_t absD = -D;
    double product = 1.0;
    for (std::int64_t p : distinct_prime_factors(absD)) {
        if (p == absD)
            continue;
        product *= 1.0 - static_cast<double>(detail::isqrt(4 * p)) / static_cast<double>(p + 1);
    }
    return std::log(static_cast<double>(absD)) * product / 7000.0;
}

/// |D|^(1/2 - eps), the Siegel growth curve drawn next to h(D).
inline double siegel_reference_curve(std::int64_t D, double eps)
{
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("siegel_reference_curve: eps must lie in (0, 1/2]");
    return std::pow(std::fabs(static_cast<double>(D)), 0.5 - eps);
}

/// prod_{n >= 1} (1 - p^-n), stopped once p^-n < 1e-12.
inline double cohen_lenstra_prediction(std::int64_t p)
{
    if (p == 2)
        throw std::invalid_argument("cohen_lenstra_prediction: p = 2 is governed by genus theory");
    if (!is_prime(p))
        throw std::invalid_argument("cohen_lenstra_prediction: p must be an odd prime");
    double product = 1.0;
    for (double t = 1.0 / static_cast<double>(p); t >= 1e-12; t /= static_cast<double>(p))
        product *= 1.0 - t;
    return product;
}

/// Square-free flags for 0..limit (entry 0 false).
inline std::vector<bool> square_free_sieve(std::int64_t limit)
{
    std::vector<bool> sf(static_cast<std::size_t>(limit) + 1, true);
    sf[0] = false;
    for (std::int64_t p = 2; p * p <= limit; ++p)
        for (std::int64_t k = p * p; k <= limit; k += p * p)
            sf[static_cast<std::size_t>(k)] = false;
    return sf;
}

/// Fundamental-discriminant flags indexed by |D| for -limit <= D < 0.
inline std::vector<bool> fundamental_sieve(std::int64_t limit)
{
    const auto sf = square_free_sieve(limit);
    std::vector<bool> fund(static_cast<std::size_t>(limit) + 1, false);
    for (std::int64_t n = 1; n <= limit; ++n) {
        // D = -n
        if (n % 4 == 3)
            fund[static_cast<std::size_t>(n)] = sf[static_cast<std::size_t>(n)];
        else if (n % 4 == 0) {
            std::int64_t m = n / 4; // D/4 = -m, need -m = 2,3 mod 4
            if ((m % 4 == 1 || m % 4 == 2) && sf[static_cast<std::size_t>(m)])
                fund[static_cast<std::size_t>(n)] = true;
        }
    }
    return fund;
}

struct ClStatistics {
    std::int64_t p = 0;
    std::int64_t N = 0;
    std::int64_t count_indivisible = 0;
    std::int64_t fundamental_count = 0;
    double proportion = 0.0;
};

/// Fundamental -N < D < 0 with p not dividing h(D).
inline ClStatistics cl_statistics(std::int64_t p, std::int64_t N)
{
    if (p == 2 || !is_prime(p))
        throw std::invalid_argument("cl_statistics: p must be an odd prime");
    if (N < 1)
        throw std::invalid_argument("cl_statistics: N must be positive");
    ClStatistics s{p, N, 0, 0, 0.0};
    const std::int64_t limit = N - 1;
    if (limit < 3)
        return s;
    const auto h = class_number_table(limit);
    const auto fund = fundamental_sieve(limit);
    for (std::int64_t n = 3; n <= limit; ++n) {
        if (!fund[static_cast<std::size_t>(n)])
            continue;
        ++s.fundamental_count;
        if (h[static_cast<std::size_t>(n)] % p != 0)
            ++s.count_indivisible;
    }
    s.proportion = s.fundamental_count ? static_cast<double>(s.count_indivisible) / s.fundamental_count : 0.0;
    return s;
}

/// Discriminant of Q(sqrt(-d)) for square-free d >= 1.
inline std::int64_t field_discriminant_of_negative(std::int64_t d)
{
    return (d % 4 == 3) ? -d : -4 * d;
}

/// True iff C(D) has an element of order exactly g.
inline bool has_element_of_order(std::int64_t D, std::int64_t g)
{
    const Form id = identity(D);
    const auto primes = distinct_prime_factors(g);
    bool found = false;
    detail::for_each_reduced(D, true, [&](const Form& f) {
        if (found || !(power(f, g) == id))
            return;
        for (std::int64_t p : primes)
            if (power(f, g / p) == id)
                return;
        found = true;
    });
    return found;
}

/// #{square-free 1 <= d <= x : C(disc Q(sqrt(-d))) has an element of order g}.
inline std::int64_t ng_count(std::int64_t g, std::int64_t x, unsigned jobs = 1)
{
    if (g < 2 || x < 1)
        throw std::invalid_argument("ng_count: need g >= 2 and x >= 1");
    const auto sf = square_free_sieve(x);
    return parallel_count(1, x + 1, jobs, [&](std::int64_t d) {
        return sf[static_cast<std::size_t>(d)] && has_element_of_order(field_discriminant_of_negative(d), g);
    });
}

/// (6/pi^2)(1 - prod_{i >= 1}(1 - g^-i)).
inline double cg_constant(std::int64_t g)
{
    if (g < 2)
        throw std::invalid_argument("cg_constant: g must be at least 2");
    double product = 1.0;
    for (double t = 1.0 / static_cast<double>(g); t >= 1e-17; t /= static_cast<double>(g))
        product *= 1.0 - t;
    return 6.0 / (std::numbers::pi * std::numbers::pi) * (1.0 - product);
}

} // namespace bhcg
