#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include <bhcg/cftx.hpp>

namespace
{

// Count (n, l) directly: n >= 0, 1 <= l <= m, 4mn < l^2.
std::int64_t polar_pairs(std::int64_t m)
{
    std::int64_t c = 0;
    for (std::int64_t l = 1; l <= m; ++l)
        for (std::int64_t n = 0; 4 * m * n < l * l; ++n)
            ++c;
    return c;
}

} // namespace

TEST(Extremal, Z1IsJMinus744)
{
    const auto z = bhcg::extremal_partition_function(1, 10);
    const auto j = bhcg::j_series(10);
    EXPECT_EQ(z, j - bhcg::QSeries::constant(744, 10));
    EXPECT_EQ(z.integer_coefficient(1), 196884);
    EXPECT_EQ(z.integer_coefficient(0), 0);
    EXPECT_EQ(z.integer_coefficient(-1), 1);
}

TEST(Extremal, PolarPartMatchesTarget)
{
    for (std::int64_t k = 1; k <= 4; ++k) {
        const auto z = bhcg::extremal_partition_function(k, 20);
        const auto target = bhcg::extremal_target(k, 1);
        EXPECT_EQ(z.valuation(), -k);
        for (std::int64_t e = -k; e <= 0; ++e)
            EXPECT_EQ(z.coefficient(e), target.coefficient(e)) << k << " " << e;
    }
}

TEST(Extremal, IntegerCoefficients)
{
    for (std::int64_t k = 1; k <= 4; ++k) {
        const auto z = bhcg::extremal_partition_function(k, 20);
        EXPECT_EQ(z.order(), 20);
        for (const auto& c : z.coefficients())
            EXPECT_EQ(c.get_den(), 1);
    }
}

TEST(Extremal, Z2AgainstJSquared)
{
    // Polar part q^-2 + 0 q^-1 + 1: Z_2 = j^2 - 1488 j + 159769.
    const auto j = bhcg::j_series(12);
    const auto expect = (j * j - mpq_class(1488) * j + bhcg::QSeries::constant(159769, 11)).truncate(10);
    EXPECT_EQ(bhcg::extremal_partition_function(2, 10), expect);
}

TEST(Extremal, RejectsBadK)
{
    EXPECT_THROW(bhcg::extremal_partition_function(0, 5), std::invalid_argument);
}

TEST(ZkIdentity, KOneAtCmax200)
{
    const auto r = bhcg::verify_zk_identity(1, {200, 30, 5, false});
    EXPECT_LT(r.max_relative_residual, 1e-2);
    ASSERT_EQ(r.coefficients.size(), 5u);
    EXPECT_EQ(r.coefficients[0].exact, 196884);
    EXPECT_NEAR(r.coefficients[0].predicted.convert_to<double>(), 196884.0, 196884.0 * 1e-2);
    // p(1) = 1 enters only through the constant term.
    EXPECT_EQ(r.trace_ratios[1], 1);
    EXPECT_EQ(r.constant_predicted, 0);
    EXPECT_EQ(r.constant_exact, 0);
}

TEST(ZkIdentity, KOneMonotoneInCmax)
{
    double prev = 1e300;
    for (std::int64_t cmax : {25, 50, 100, 200}) {
        const auto r = bhcg::verify_zk_identity(1, {cmax, 30, 1, false});
        EXPECT_LT(r.max_relative_residual, prev) << cmax;
        prev = r.max_relative_residual;
    }
}

TEST(ZkIdentity, KTwoMonotoneInCmax)
{
    double prev = 1e300;
    for (std::int64_t cmax : {50, 100, 200}) {
        const auto r = bhcg::verify_zk_identity(2, {cmax, 30, 5, false});
        EXPECT_LT(r.max_relative_residual, prev) << cmax;
        prev = r.max_relative_residual;
    }
    EXPECT_LT(prev, 1e-2);
}

TEST(ZkIdentity, ConstantTermsExact)
{
    for (std::int64_t k = 1; k <= 4; ++k) {
        const auto r = bhcg::verify_zk_identity(k, {10, 20, 1, false});
        EXPECT_EQ(r.constant_predicted, bhcg::to_real(r.constant_exact)) << k;
    }
}

TEST(ZkIdentity, NumericTracesAgree)
{
    const auto exact = bhcg::verify_zk_identity(2, {100, 30, 3, false});
    const auto numeric = bhcg::verify_zk_identity(2, {100, 30, 3, true});
    for (std::size_t i = 0; i < exact.coefficients.size(); ++i)
        EXPECT_NEAR(numeric.coefficients[i].relative_residual, exact.coefficients[i].relative_residual, 1e-6);
    EXPECT_NEAR(numeric.trace_ratios[2].convert_to<double>(), 2.0, 1e-8);
}

TEST(ZkIdentity, RejectsLargeK)
{
    EXPECT_THROW(bhcg::verify_zk_identity(5), std::invalid_argument);
}

TEST(Jacobi, Dimension)
{
    EXPECT_EQ(bhcg::jacobi_dim(1), 1);
    EXPECT_EQ(bhcg::jacobi_dim(12), 19);
    EXPECT_EQ(bhcg::jacobi_dim(13), 21);
    for (std::int64_t m = 1; m <= 500; ++m) {
        const mpq_class v = mpq_class(m * m, 12) + mpq_class(m, 2) + 1;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
        EXPECT_EQ(bhcg::jacobi_dim(m), fl.get_si());
    }
    EXPECT_THROW(bhcg::jacobi_dim(0), std::invalid_argument);
}

TEST(Sawtooth, Values)
{
    EXPECT_EQ(bhcg::sawtooth(mpq_class(1, 4)), mpq_class(-1, 4));
    EXPECT_EQ(bhcg::sawtooth(mpq_class(-1, 4)), mpq_class(1, 4));
    EXPECT_EQ(bhcg::sawtooth(0), 0);
    EXPECT_EQ(bhcg::sawtooth(mpq_class(1, 2)), 0);
    EXPECT_EQ(bhcg::sawtooth(7), 0);
}

TEST(Sawtooth, OddAndPeriodic)
{
    for (int den = 1; den <= 12; ++den)
        for (int num = -30; num <= 30; ++num) {
            const mpq_class x(num, den);
            mpq_class xc = x;
            xc.canonicalize();
            EXPECT_EQ(bhcg::sawtooth(-xc), -bhcg::sawtooth(xc));
            EXPECT_EQ(bhcg::sawtooth(xc + 1), bhcg::sawtooth(xc));
            EXPECT_LE(abs(bhcg::sawtooth(xc)), mpq_class(1, 2));
        }
}

TEST(Polar, BruteForceExamples)
{
    EXPECT_EQ(bhcg::polar_count_bruteforce(1), 1);
    EXPECT_EQ(bhcg::polar_count_bruteforce(2), 2);
    EXPECT_EQ(bhcg::polar_count_bruteforce(4), 4);
    for (std::int64_t m = 1; m <= 120; ++m)
        EXPECT_EQ(bhcg::polar_count_bruteforce(m), polar_pairs(m)) << m;
}

TEST(Polar, FormulaAtOne)
{
    const auto t = bhcg::polar_formula_terms(1);
    EXPECT_EQ(t.quadratic, mpq_class(1, 12));
    EXPECT_EQ(t.linear, mpq_class(5, 8));
    EXPECT_EQ(t.class_term, mpq_class(1, 8));
    EXPECT_EQ(t.b_term, 0);
    EXPECT_EQ(t.sawtooth_term, mpq_class(1, 8));
    EXPECT_EQ(t.total, 1);
    EXPECT_EQ(bhcg::polar_count_formula(1), 1);
}

TEST(Polar, FormulaMatchesBruteForce)
{
    for (std::int64_t m = 1; m <= 2000; ++m)
        ASSERT_EQ(bhcg::polar_count_formula(m), bhcg::polar_count_bruteforce(m)) << m;
}

TEST(Polar, TableDrivenRowsAgree)
{
    const auto rows = bhcg::polar_rows(1, 301, 2);
    ASSERT_EQ(rows.size(), 300u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.P_formula, bhcg::polar_count_formula(r.m));
        EXPECT_EQ(r.excess, r.P_formula - r.J);
    }
}

TEST(Polar, ConventionErrorCarriesTerms)
{
    bhcg::PolarFormulaTerms t = bhcg::polar_formula_terms(6);
    t.constant = 0;
    const bhcg::PolarConventionError e(t);
    EXPECT_NE(std::string(e.what()).find("total="), std::string::npos);
    EXPECT_EQ(e.terms.m, 6);
}

TEST(Figure, SummariesConsistent)
{
    const auto f = bhcg::figure_data(3000);
    ASSERT_EQ(f.points.size(), 3000u);
    std::int64_t total = 0;
    for (const auto& b : f.histogram) {
        EXPECT_LT(b.left, b.right);
        total += b.count;
    }
    EXPECT_EQ(total, 3000);
    EXPECT_GT(f.bin_width, 0);
    EXPECT_DOUBLE_EQ(f.cdf.back().cumulative_fraction, 1.0);
    for (std::size_t i = 1; i < f.cdf.size(); ++i) {
        EXPECT_LT(f.cdf[i - 1].value, f.cdf[i].value);
        EXPECT_LT(f.cdf[i - 1].cumulative_fraction, f.cdf[i].cumulative_fraction);
    }
    double mx = 0;
    for (const auto& p : f.points) {
        mx = std::max(mx, std::abs(p.normalized_excess));
        const double direct = (static_cast<double>(p.P_formula) - p.m * p.m / 12.0 - 5.0 * p.m / 8.0) / std::sqrt(double(p.m));
        EXPECT_NEAR(p.normalized_excess, direct, 1e-9);
    }
    EXPECT_DOUBLE_EQ(f.c_scan, mx);
}

TEST(Figure, IndependentOfJobs)
{
    const auto a = bhcg::figure_data(500, 1);
    const auto b = bhcg::figure_data(500, 3);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        EXPECT_EQ(a.points[i].normalized_excess, b.points[i].normalized_excess);
    EXPECT_EQ(a.histogram.size(), b.histogram.size());
}

TEST(ExtremalN2, Table)
{
    const auto r = bhcg::extremal_n2_report(2000);
    ASSERT_EQ(r.rows.size(), 2000u);
    EXPECT_EQ(r.rows[0].J, 1);
    EXPECT_EQ(r.rows[0].P, 1);
    EXPECT_TRUE(r.rows[0].flagged);
    EXPECT_TRUE(r.rows[0].reported);
    EXPECT_EQ(r.rows[5].m, 6);
    EXPECT_FALSE(r.rows[5].reported);
    EXPECT_TRUE(r.excess_grows);
    for (std::int64_t m = 100; m <= 2000; ++m)
        EXPECT_GT(r.rows[static_cast<std::size_t>(m - 1)].P, r.rows[static_cast<std::size_t>(m - 1)].J) << m;
    EXPECT_THROW(bhcg::extremal_n2_report(12), std::invalid_argument);
}
