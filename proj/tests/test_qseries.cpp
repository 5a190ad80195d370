#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <bhcg/qseries.hpp>

using bhcg::QSeries;

namespace
{

// prod (1 - q^n)^24 by multiplying out one binomial at a time.
std::vector<mpz_class> naive_delta(int order)
{
    std::vector<mpz_class> c(static_cast<std::size_t>(order), mpz_class(0));
    c[0] = 1;
    for (int n = 1; n < order; ++n)
        for (int rep = 0; rep < 24; ++rep)
            for (int e = order - 1; e >= n; --e)
                c[static_cast<std::size_t>(e)] -= c[static_cast<std::size_t>(e - n)];
    // Shift by q.
    std::vector<mpz_class> out(static_cast<std::size_t>(order) + 1, mpz_class(0));
    for (int e = 0; e < order; ++e)
        out[static_cast<std::size_t>(e) + 1] = c[static_cast<std::size_t>(e)];
    return out;
}

// Partitions of n into parts <= k, by direct recursion.
std::int64_t count_partitions(int n, int k)
{
    if (n == 0)
        return 1;
    if (k == 0)
        return 0;
    std::int64_t total = count_partitions(n, k - 1);
    if (n >= k)
        total += count_partitions(n - k, k);
    return total;
}

mpz_class sigma(std::int64_t n, unsigned k)
{
    mpz_class s = 0;
    for (std::int64_t d = 1; d <= n; ++d)
        if (n % d == 0) {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), k);
            s += p;
        }
    return s;
}

QSeries random_sparse(std::mt19937_64& rng, std::int64_t valuation, std::int64_t order)
{
    std::uniform_int_distribution<int> coin(0, 3), num(-9, 9), den(1, 5);
    std::vector<mpq_class> c(static_cast<std::size_t>(order - valuation), mpq_class(0));
    c[0] = mpq_class(num(rng) == 0 ? 1 : 3, den(rng));
    for (std::size_t i = 1; i < c.size(); ++i)
        if (coin(rng) == 0) {
            c[i] = mpq_class(num(rng), den(rng));
            c[i].canonicalize();
        }
    return QSeries(valuation, c, order);
}

} // namespace

TEST(QSeries, TruncationOrderOfProducts)
{
    QSeries f = QSeries(-1, {1, 2, 3}, 2);
    QSeries g = QSeries(2, {5}, 10);
    QSeries h = f * g;
    EXPECT_EQ(h.valuation(), 1);
    EXPECT_EQ(h.order(), 4); // min(-1 + 10, 2 + 2)
    EXPECT_EQ(h.coefficient(1), 5);
    EXPECT_EQ(h.coefficient(3), 15);
    EXPECT_THROW(h.coefficient(4), std::out_of_range);
    EXPECT_EQ((f + g).order(), 2);
}

TEST(QSeries, InverseNeedsNonzeroLeadingTerm)
{
    EXPECT_THROW(QSeries(0, {0, 0}, 2).inverse(), std::domain_error);
    QSeries f(0, {0, 2, 1}, 6);
    QSeries g = f.inverse();
    EXPECT_EQ(g.valuation(), -1);
    EXPECT_EQ(g.coefficient(-1), mpq_class(1, 2));
    EXPECT_EQ(g.coefficient(0), mpq_class(-1, 4));
}

TEST(QSeries, RingLawsOnRandomSparseSeries)
{
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> val(-2, 2);
    for (int trial = 0; trial < 40; ++trial) {
        QSeries f = random_sparse(rng, val(rng), 30);
        QSeries g = random_sparse(rng, val(rng), 25);
        QSeries h = random_sparse(rng, val(rng), 28);
        ASSERT_EQ((f * g) * h, f * (g * h));
        ASSERT_EQ(f * g, g * f);
        ASSERT_EQ(f * (g + h), f * g + f * h);
        QSeries one = f * f.inverse();
        ASSERT_EQ(one.order(), f.order() - f.valuation());
        for (std::int64_t e = one.valuation(); e < one.order(); ++e)
            ASSERT_EQ(one.coefficient(e), e == 0 ? 1 : 0);
        ASSERT_EQ(f.pow(3), f * f * f);
        ASSERT_EQ(f.pow(-2), (f * f).inverse());
    }
}

TEST(QSeries, SubstituteAndTheta)
{
    QSeries f(-1, {1, 2, 3}, 2);
    QSeries g = f.substitute(3);
    EXPECT_EQ(g.valuation(), -3);
    EXPECT_EQ(g.order(), 6);
    EXPECT_EQ(g.coefficient(3), 3);
    EXPECT_EQ(g.coefficient(2), 0);
    QSeries t = f.theta();
    EXPECT_EQ(t.coefficient(-1), -1);
    EXPECT_EQ(t.coefficient(1), 3);
}

TEST(Delta, Examples)
{
    QSeries d = bhcg::delta_series(10);
    EXPECT_EQ(d.coefficient(1), 1);
    EXPECT_EQ(d.coefficient(2), -24);
    EXPECT_EQ(d.coefficient(6), -6048);
    EXPECT_EQ(d.coefficient(6), d.coefficient(2) * d.coefficient(3));
    EXPECT_EQ(d.coefficient(0), 0);
    EXPECT_THROW(bhcg::delta_series(1), std::invalid_argument);
}

TEST(Delta, MatchesNaiveProduct)
{
    const auto naive = naive_delta(120);
    QSeries d = bhcg::delta_series(121);
    for (int e = 1; e <= 120; ++e)
        ASSERT_EQ(d.coefficient(e), mpq_class(naive[static_cast<std::size_t>(e)])) << e;
}

TEST(Delta, HeckeMultiplicativity)
{
    QSeries d = bhcg::delta_series(401);
    for (std::int64_t m = 1; m <= 20; ++m)
        for (std::int64_t n = 1; n <= 20; ++n)
            if (bhcg::detail::gcd(m, n) == 1) {
                ASSERT_EQ(d.coefficient(m * n), d.coefficient(m) * d.coefficient(n)) << m << "," << n;
            }
}

TEST(Delta, Ramanujan691Congruence)
{
    QSeries d = bhcg::delta_series(101);
    for (std::int64_t n = 1; n <= 100; ++n) {
        mpz_class diff = d.integer_coefficient(n) - sigma(n, 11);
        ASSERT_EQ(diff % 691, 0) << n;
    }
}

TEST(InverseDelta, Examples)
{
    QSeries f = bhcg::inverse_delta_series(20);
    EXPECT_EQ(f.valuation(), -1);
    EXPECT_EQ(f.coefficient(-1), 1);
    EXPECT_EQ(f.coefficient(0), 24);
    EXPECT_EQ(f.coefficient(1), 324);
    EXPECT_EQ(f.coefficient(2), 3200);
    QSeries one = f * bhcg::delta_series(30);
    EXPECT_EQ(one.order(), 21);
    for (std::int64_t e = 0; e < one.order(); ++e)
        ASSERT_EQ(one.coefficient(e), e == 0 ? 1 : 0);
    EXPECT_EQ(f, bhcg::delta_series(22).inverse());
}

TEST(Eisenstein, Examples)
{
    QSeries e2 = bhcg::eisenstein_E2(30), e4 = bhcg::eisenstein_E4(30);
    EXPECT_EQ(e2.coefficient(0), 1);
    EXPECT_EQ(e2.coefficient(1), -24);
    EXPECT_EQ(e4.coefficient(2), 2160);
    for (std::int64_t n = 1; n < 30; ++n) {
        ASSERT_EQ(e2.coefficient(n), mpq_class(-24 * sigma(n, 1)));
        ASSERT_EQ(e4.coefficient(n), mpq_class(240 * sigma(n, 3)));
    }
    // E4^2 = E8 = 1 + 480 sum sigma_7(n) q^n.
    QSeries e8 = e4 * e4;
    for (std::int64_t n = 1; n < 30; ++n)
        ASSERT_EQ(e8.coefficient(n), mpq_class(480 * sigma(n, 7)));
}

TEST(JInvariant, Examples)
{
    QSeries j = bhcg::j_series(5);
    EXPECT_EQ(j.coefficient(-1), 1);
    EXPECT_EQ(j.coefficient(0), 744);
    EXPECT_EQ(j.coefficient(1), 196884);
    EXPECT_EQ(j.coefficient(2), 21493760);
    EXPECT_EQ(j.coefficient(3), 864299970);
    EXPECT_EQ(j.order(), 5);
}

TEST(Partitions, Examples)
{
    const auto p = bhcg::partition_numbers(60);
    EXPECT_EQ(p[0], 1);
    EXPECT_EQ(p[1], 1);
    EXPECT_EQ(p[4], 5);
    EXPECT_EQ(p[10], 42);
    for (int n = 0; n <= 40; ++n)
        ASSERT_EQ(p[static_cast<std::size_t>(n)], count_partitions(n, n)) << n;
    // Generating function: prod (1 - q^n)^{-1}.
    QSeries g = bhcg::eta_product({{1, -1}}, 61);
    for (int n = 0; n <= 60; ++n)
        ASSERT_EQ(g.coefficient(n), mpq_class(p[static_cast<std::size_t>(n)]));
}

TEST(Pk, Examples)
{
    EXPECT_EQ(bhcg::pk_coefficient(12, 0, 1), -1);
    EXPECT_EQ(bhcg::pk_coefficient(12, 2, 1), 11);
    EXPECT_EQ(bhcg::pk_coefficient(12, 1, 1), -1);
    EXPECT_THROW(bhcg::pk_coefficient(11, 1, 1), std::invalid_argument);
    EXPECT_THROW(bhcg::pk_coefficient(2, 1, 1), std::invalid_argument);
}

TEST(Pk, MatchesSeriesInversion)
{
    for (std::int64_t t = -6; t <= 6; ++t)
        for (std::int64_t N = 1; N <= 9; ++N) {
            QSeries f(0, {1, mpq_class(-t), mpq_class(N)}, 30);
            QSeries g = f.inverse();
            for (std::int64_t k = 4; k <= 26; k += 2)
                ASSERT_EQ(g.coefficient(k - 2), mpq_class(bhcg::pk_coefficient(k, t, N)));
        }
}

TEST(HeckeTrace, Examples)
{
    EXPECT_EQ(bhcg::hecke_trace(12, 1), 1);
    for (std::int64_t n = 1; n <= 50; ++n)
        ASSERT_EQ(bhcg::hecke_trace(4, n), 0) << n;
    EXPECT_THROW(bhcg::hecke_trace(13, 1), std::invalid_argument);
    EXPECT_THROW(bhcg::hecke_trace(12, 0), std::invalid_argument);
}

TEST(HeckeTrace, DimensionOfCuspForms)
{
    for (std::int64_t k : {4, 6, 8, 10, 14})
        EXPECT_EQ(bhcg::hecke_trace(k, 1), 0) << k;
    for (std::int64_t k : {12, 16, 18, 20, 22, 26})
        EXPECT_EQ(bhcg::hecke_trace(k, 1), 1) << k;
    EXPECT_EQ(bhcg::hecke_trace(24, 1), 2);
}

TEST(HeckeTrace, RamanujanTau)
{
    QSeries d = bhcg::delta_series(51);
    for (std::int64_t n = 1; n <= 50; ++n)
        ASSERT_EQ(bhcg::hecke_trace(12, n), d.integer_coefficient(n)) << n;
}

TEST(HeckeTrace, VanishesWithoutCuspForms)
{
    for (std::int64_t k : {4, 6, 8, 10, 14})
        for (std::int64_t n = 1; n <= 50; ++n)
            ASSERT_EQ(bhcg::hecke_trace(k, n), 0) << k << "," << n;
}

TEST(HeckeTrace, WeightSixteenEigenvalues)
{
    // S_16 is spanned by Delta E4.
    QSeries f = bhcg::delta_series(31) * bhcg::eisenstein_E4(31);
    for (std::int64_t n = 1; n <= 30; ++n)
        ASSERT_EQ(bhcg::hecke_trace(16, n), f.integer_coefficient(n)) << n;
}

TEST(TauPrimeDisplay, RecordsTheComparison)
{
    // t = 0 term -2^5 H(-8) = -32, t = 1 term 23 H(-7) = 23.
    EXPECT_EQ(bhcg::tau_prime_display(2), mpq_class(7, 2));
    QSeries d = bhcg::delta_series(6);
    for (std::int64_t p : {2, 3, 5}) {
        mpq_class shown = bhcg::tau_prime_display(p);
        std::cout << "p=" << p << " displayed sum " << shown << " vs tau(p) " << d.coefficient(p) << "\n";
        EXPECT_NE(shown, d.coefficient(p));
        EXPECT_EQ(mpq_class(bhcg::hecke_trace(12, p)), d.coefficient(p));
    }
    EXPECT_THROW(bhcg::tau_prime_display(4), std::invalid_argument);
}
