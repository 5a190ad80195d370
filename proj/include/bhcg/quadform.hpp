#pragma once

// Positive definite binary quadratic forms [a,b,c] = ax^2 + bxy + cy^2:
// reduction, enumeration of reduced forms, class numbers and the weighted
// (Hurwitz) and unweighted (Kronecker) class numbers.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "integer.hpp"

namespace bhcg
{

template <FormInteger Int = std::int64_t>
struct QuadForm {
    Int a{0}, b{0}, c{0};

    QuadForm() = default;
    QuadForm(Int a_, Int b_, Int c_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {}

    Int discriminant() const { return Int(b * b - 4 * a * c); }

    bool is_positive_definite() const { return a > 0 && discriminant() < 0; }

    bool is_primitive() const { return detail::gcd(detail::gcd(a, b), c) == 1; }

    // Value at (x, y).
    Int operator()(const Int& x, const Int& y) const { return Int(a * x * x + b * x * y + c * y * y); }

    friend bool operator==(const QuadForm& f, const QuadForm& g)
    {
        return f.a == g.a && f.b == g.b && f.c == g.c;
    }

    friend bool operator<(const QuadForm& f, const QuadForm& g)
    {
        if (f.a != g.a)
            return f.a < g.a;
        if (f.b != g.b)
            return f.b < g.b;
        return f.c < g.c;
    }

    std::string to_string() const
    {
        return "[" + detail::to_string(a) + "," + detail::to_string(b) + "," + detail::to_string(c) + "]";
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadForm& f) { return os << f.to_string(); }
};

using Form = QuadForm<std::int64_t>;
using BigForm = QuadForm<mpz_class>;

template <FormInteger Int>
Int discriminant(const QuadForm<Int>& f)
{
    return f.discriminant();
}

/// D = 0 or 1 mod 4.
template <FormInteger Int>
bool is_discriminant(const Int& D)
{
    Int r = detail::floor_mod(D, Int(4));
    return r == 0 || r == 1;
}

template <FormInteger Int>
void require_negative_discriminant(const Int& D)
{
    if (D >= 0)
        throw std::invalid_argument("discriminant must be negative, got " + detail::to_string(D));
    if (!is_discriminant(D))
        throw std::invalid_argument("not a discriminant (must be 0 or 1 mod 4): " + detail::to_string(D));
}

/// True iff D is the discriminant of an imaginary quadratic field.
inline bool is_fundamental(std::int64_t D)
{
    if (D >= 0)
        throw std::invalid_argument("is_fundamental expects D < 0, got " + std::to_string(D));
    std::int64_t r = detail::floor_mod(D, std::int64_t{4});
    if (r == 1)
        return is_square_free(D);
    if (r == 0) {
        std::int64_t m = D / 4;
        std::int64_t s = detail::floor_mod(m, std::int64_t{4});
        return (s == 2 || s == 3) && is_square_free(m);
    }
    return false;
}

template <FormInteger Int>
void require_positive_definite(const QuadForm<Int>& f)
{
    if (!f.is_positive_definite())
        throw std::invalid_argument("form is not positive definite: " + f.to_string());
}

/// -a < b <= a < c, or 0 <= b <= a = c.
template <FormInteger Int>
bool is_reduced(const QuadForm<Int>& f)
{
    require_positive_definite(f);
    if (f.a < f.c)
        return -f.a < f.b && f.b <= f.a;
    if (f.a == f.c)
        return 0 <= f.b && f.b <= f.a;
    return false;
}

/// The unique reduced form SL2(Z)-equivalent to f.
///
/// Alternates the translation x -> x + ky, which moves b into (-a, a], with
/// the inversion [a,b,c] -> [c,-b,a] while a > c. Both steps keep the
/// discriminant, and a strictly decreases at each inversion, so the loop ends.
template <FormInteger Int>
QuadForm<Int> reduce(QuadForm<Int> f)
{
    require_positive_definite(f);
    for (;;) {
        Int two_a = 2 * f.a;
        Int r = detail::floor_mod(f.b, two_a);
        if (r > f.a)
            r -= two_a;
        if (r != f.b) {
            // b' = b + 2ak
            Int k = (r - f.b) / two_a;
            f.c = Int(f.a * k * k + f.b * k + f.c);
            f.b = r;
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0)
            f.b = -f.b;
        return f;
    }
}

namespace detail
{

template <FormInteger Int, class Visit>
void for_each_reduced(const Int& D, bool primitive_only, Visit&& visit)
{
    require_negative_discriminant(D);
    const Int absD = -D;
    // b = D mod 2, and 3a^2 <= |D| for every reduced form.
    const bool odd = floor_mod(D, Int(2)) == 1;
    for (Int a = 1; 3 * a * a <= absD; ++a) {
        Int b = -a + 1;
        if ((floor_mod(b, Int(2)) == 1) != odd)
            ++b;
        for (; b <= a; b += 2) {
            Int num = b * b - D;
            Int four_a = 4 * a;
            if (floor_mod(num, four_a) != 0)
                continue;
            Int c = num / four_a;
            if (c < a || (c == a && b < 0))
                continue;
            if (primitive_only && gcd(gcd(a, b), c) != 1)
                continue;
            visit(QuadForm<Int>(a, b, c));
        }
    }
}

} // namespace detail

/// All primitive reduced forms of discriminant D, sorted by (a, b, c).
template <FormInteger Int>
std::vector<QuadForm<Int>> enumerate_reduced(const Int& D)
{
    std::vector<QuadForm<Int>> out;
    detail::for_each_reduced(D, true, [&](QuadForm<Int> f) { out.push_back(std::move(f)); });
    return out;
}

inline std::vector<Form> enumerate_reduced(int D) { return enumerate_reduced(std::int64_t{D}); }

/// Reduced forms of discriminant D including imprimitive ones.
template <FormInteger Int>
std::vector<QuadForm<Int>> enumerate_reduced_all(const Int& D)
{
    std::vector<QuadForm<Int>> out;
    detail::for_each_reduced(D, false, [&](QuadForm<Int> f) { out.push_back(std::move(f)); });
    return out;
}

template <FormInteger Int>
std::int64_t class_number(const Int& D)
{
    std::int64_t h = 0;
    detail::for_each_reduced(D, true, [&](const QuadForm<Int>&) { ++h; });
    return h;
}

inline std::int64_t class_number(int D) { return class_number(std::int64_t{D}); }

/// Reciprocal order of the stabilizer of f in PSL2(Z): 1/3 for the class of
/// [a,a,a], 1/2 for the class of [a,0,a], 1 otherwise.
template <FormInteger Int>
mpq_class stabilizer_weight(const QuadForm<Int>& f)
{
    QuadForm<Int> r = reduce(f);
    if (r.a == r.c && r.b == r.a)
        return mpq_class(1, 3);
    if (r.a == r.c && r.b == 0)
        return mpq_class(1, 2);
    return mpq_class(1);
}

/// An exact rational whose denominator divides 12.
class HurwitzValue
{
public:
    HurwitzValue() = default;
    explicit HurwitzValue(const mpq_class& v) : value_(v)
    {
        value_.canonicalize();
        if (12 % value_.get_den() != 0)
            throw std::domain_error("Hurwitz value with denominator not dividing 12: " + value_.get_str());
    }

    const mpq_class& value() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    int denominator() const { return static_cast<int>(value_.get_den().get_si()); }
    bool is_integral() const { return value_.get_den() == 1; }
    double to_double() const { return value_.get_d(); }
    std::string to_string() const { return value_.get_str(); }

    friend bool operator==(const HurwitzValue& x, const HurwitzValue& y) { return x.value_ == y.value_; }
    friend bool operator==(const HurwitzValue& x, const mpq_class& y) { return x.value_ == y; }

private:
    mpq_class value_{0};
};

/// H(n) with the conventions used by the trace formula: H(n) = 0 for n > 0
/// and for n = 2, 3 mod 4, H(0) = -1/12, and for discriminants n < 0
/// H(n) = sum over d^2 | n of h(n/d^2) / w(n/d^2), with w(-3) = 3,
/// w(-4) = 2 and w = 1 otherwise.
inline HurwitzValue hurwitz(std::int64_t n)
{
    if (n > 0)
        return HurwitzValue();
    if (n == 0)
        return HurwitzValue(mpq_class(-1, 12));
    if (!is_discriminant(n))
        return HurwitzValue();
    mpq_class sum = 0;
    for (std::int64_t d = 1; d * d <= -n; ++d) {
        if (n % (d * d) != 0)
            continue;
        std::int64_t inner = n / (d * d);
        if (!is_discriminant(inner))
            continue;
        mpq_class h = class_number(inner);
        if (inner == -3)
            h /= 3;
        else if (inner == -4)
            h /= 2;
        sum += h;
    }
    return HurwitzValue(sum);
}

/// Unweighted count of SL2(Z)-classes of positive definite forms of
/// discriminant n, primitive or not. Zero when n is not a negative
/// discriminant. This is the count that matches isomorphism classes of
/// elliptic curves with a given trace.
inline std::int64_t kronecker_class_number(std::int64_t n)
{
    if (n >= 0 || !is_discriminant(n))
        return 0;
    std::int64_t count = 0;
    detail::for_each_reduced(n, false, [&](const Form&) { ++count; });
    return count;
}

/// h(D) for every discriminant -limit <= D < 0, indexed by |D|. Entries at
/// non-discriminants are zero. One pass over all reduced forms, roughly
/// limit^{3/2} work.
inline std::vector<std::int32_t> class_number_table(std::int64_t limit)
{
    std::vector<std::int32_t> h(static_cast<std::size_t>(limit) + 1, 0);
    for (std::int64_t a = 1; 3 * a * a <= limit; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            const std::int64_t g_ab = detail::gcd(a, b);
            // 4ac - b^2 <= limit
            const std::int64_t c_max = (limit + b * b) / (4 * a);
            std::int64_t c = a;
            if (b < 0)
                ++c;
            for (; c <= c_max; ++c) {
                if (g_ab != 1 && detail::gcd(g_ab, c) != 1)
                    continue;
                ++h[static_cast<std::size_t>(4 * a * c - b * b)];
            }
        }
    }
    return h;
}

} // namespace bhcg
