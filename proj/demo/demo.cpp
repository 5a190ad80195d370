// A short tour: class groups, black-hole charges, Rademacher sums, singular
// moduli, elliptic curves over F_13 and polar-term counts.

#include <iostream>

#include <bhcg/attractor.hpp>
#include <bhcg/cftx.hpp>
#include <bhcg/classgroup.hpp>
#include <bhcg/eccensus.hpp>
#include <bhcg/rademacher.hpp>

int main()
{
    const auto g = bhcg::group_structure(-84);
    std::cout << "C(-84): h = " << g.class_number() << ", invariants";
    for (auto d : g.elementary_divisors)
        std::cout << " " << d;
    std::cout << "\n";
    for (const auto& f : g.representatives)
        std::cout << "  " << f << "\n";

    std::cout << "\nBlack holes at D = -20 (entropy " << bhcg::entropy(-20) << "):\n";
    for (const auto& c : bhcg::classify_black_holes(-20))
        std::cout << "  p^2 = " << c.charges.p2 << ", p.q = " << c.charges.pq << ", q^2 = " << c.charges.q2 << "\n";

    const auto H = bhcg::hilbert_class_polynomial(-23);
    std::cout << "\nH_{-23}(X) coefficients (ascending):";
    for (const auto& c : H.coefficients)
        std::cout << " " << c;
    std::cout << "\n";

    {
        bhcg::ScopedPrecision prec(40);
        const auto inv = bhcg::inverse_delta_series(6);
        std::cout << "\n1/Delta coefficient a(5): exact " << inv.integer_coefficient(5) << ", Rademacher "
                  << bhcg::to_string(bhcg::rademacher_inv_delta(5), 25) << "\n";
    }

    std::cout << "\nTraces of singular moduli vs (24n-1)p(n):\n";
    for (std::int64_t n = 1; n <= 3; ++n) {
        const auto t = bhcg::trace_singular_moduli(n);
        std::cout << "  n = " << n << ": " << bhcg::to_string(t.value, 20) << " vs " << t.expected << " over "
                  << t.classes << " classes\n";
    }

    const auto z = bhcg::extremal_partition_function(2, 3);
    std::cout << "\nZ_2 = q^-2 + " << z.coefficient(-1) << " q^-1 + " << z.coefficient(0) << " + " << z.coefficient(1)
              << " q + " << z.coefficient(2) << " q^2 + ...\n";

    std::cout << "\nCurves over F_13, N(t) vs class count of t^2 - 52:\n";
    for (const auto& e : bhcg::verify_deuring(13).entries)
        std::cout << "  t = " << e.t << ": " << e.observed << " / " << e.expected << "\n";

    std::cout << "\nm  J(m)  P(m)\n";
    for (std::int64_t m = 1; m <= 13; ++m)
        std::cout << m << "  " << bhcg::jacobi_dim(m) << "  " << bhcg::polar_count_formula(m) << "\n";
}
