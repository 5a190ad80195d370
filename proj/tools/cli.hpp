#pragma once

// Command-line front end. run() parses arguments, dispatches to the library
// and writes one envelope (JSON) or one table (CSV) to `out`.
//
// Exit codes: 0 success, 1 a checked identity failed, 2 usage error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bhcg/attractor.hpp>
#include <bhcg/cftx.hpp>
#include <bhcg/classgroup.hpp>
#include <bhcg/eccensus.hpp>
#include <bhcg/qseries.hpp>
#include <bhcg/quadform.hpp>
#include <bhcg/rademacher.hpp>

namespace bhcg::cli
{

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr unsigned kDefaultPrecision = 30;
inline constexpr const char* kPrecisionEnv = "BHCG_PRECISION";

/// Thrown for bad user input that the option parser cannot catch.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// x rounded to 12 significant digits, so the shortest round-trip form that
/// the JSON writer emits has at most 12 digits.
inline double num(double x)
{
    if (!std::isfinite(x))
        return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline double num(const Real& x) { return num(x.convert_to<double>()); }

inline std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline json form_json(const Form& f) { return json::array({f.a, f.b, f.c}); }

inline json complex_json(const Complex& z) { return {{"re", num(z.re)}, {"im", num(z.im)}}; }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

/// What a subcommand hands back for printing.
struct Result {
    std::string module;
    json parameters = json::object();
    json results = json::object();
    std::optional<Table> table;
    /// Set when a checked identity fails; printed to stderr, exit 1.
    std::vector<std::string> failures;
};

struct Globals {
    std::string format{"json"};
    unsigned jobs{1};
    bool neg{false};
    bool timing{false};
    unsigned precision{kDefaultPrecision};
};

namespace detail
{

inline std::int64_t discriminant_arg(std::int64_t D, const Globals& g)
{
    if (g.neg)
        D = -D;
    if (D >= 0)
        throw UsageError("discriminant must be negative (give -D, or D with --neg), got " + std::to_string(D));
    if (!is_discriminant(D))
        throw UsageError(std::to_string(D) + " is not a discriminant (must be 0 or 1 mod 4)");
    return D;
}

inline std::string join(const std::vector<std::string>& v, const std::string& sep = " ")
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? sep : "") + v[i];
    return s;
}

// Flattens a JSON object into key,value rows for commands without a table.
inline void flatten(const json& j, const std::string& prefix, Table& t)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), t);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "." + std::to_string(i), t);
    } else if (j.is_string()) {
        t.add({prefix, j.get<std::string>()});
    } else if (j.is_number_float()) {
        t.add({prefix, fmt(j.get<double>())});
    } else {
        t.add({prefix, j.dump()});
    }
}

inline std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

} // namespace detail

// ---- subcommand bodies ----------------------------------------------------

inline Result cmd_classgroup(std::int64_t D)
{
    Result r;
    r.module = "classgroup";
    r.parameters = {{"D", D}};
    const auto g = group_structure(D);
    json reps = json::array();
    for (const auto& f : g.representatives)
        reps.push_back(form_json(f));
    std::int64_t two_torsion = 0;
    for (auto o : g.orders)
        if (o <= 2)
            ++two_torsion;
    const bool fundamental = is_fundamental(D);
    const double bound = ggz_lower_bound(D);
    r.results = {{"D", D},
                 {"fundamental", fundamental},
                 {"class_number", g.class_number()},
                 {"representatives", reps},
                 {"orders", g.orders},
                 {"elementary_divisors", g.elementary_divisors},
                 {"exponent", g.exponent()},
                 {"two_torsion_order", two_torsion},
                 {"genus_prime_count", genus_prime_count(D)},
                 {"ggz_lower_bound", num(bound)},
                 {"exceeds_ggz_bound", static_cast<double>(g.class_number()) > bound}};
    if (fundamental) {
        const std::int64_t predicted = std::int64_t{1} << (genus_prime_count(D) - 1);
        r.results["genus_prediction"] = predicted;
        if (predicted != two_torsion)
            r.failures.push_back("two-torsion " + std::to_string(two_torsion) + " != 2^(g-1) = " + std::to_string(predicted));
    }
    Table t{{"a", "b", "c", "order"}, {}};
    for (std::size_t i = 0; i < g.representatives.size(); ++i) {
        const auto& f = g.representatives[i];
        t.add({std::to_string(f.a), std::to_string(f.b), std::to_string(f.c), std::to_string(g.orders[i])});
    }
    r.table = std::move(t);
    return r;
}

inline Result cmd_bh_classify(std::int64_t D)
{
    Result r;
    r.module = "attractor";
    r.parameters = {{"D", D}};
    const auto classes = classify_black_holes(D);
    json arr = json::array();
    Table t{{"p2", "pq", "q2", "a", "b", "c", "entropy"}, {}};
    for (const auto& c : classes) {
        arr.push_back({{"p2", c.charges.p2}, {"pq", c.charges.pq}, {"q2", c.charges.q2},
                       {"form", form_json(c.form)}, {"entropy", num(c.entropy)}});
        t.add({std::to_string(c.charges.p2), std::to_string(c.charges.pq), std::to_string(c.charges.q2),
               std::to_string(c.form.a), std::to_string(c.form.b), std::to_string(c.form.c), fmt(c.entropy)});
    }
    r.results = {{"D", D}, {"count", classes.size()}, {"entropy", num(entropy(D))}, {"classes", arr}};
    if (D == -20 || D == -84) {
        json ex = json::array();
        for (const auto& e : example_charge_vectors(D)) {
            const auto got = invariants_of(e.p, e.q);
            const bool ok = got == e.stated;
            ex.push_back({{"stated", {e.stated.p2, e.stated.pq, e.stated.q2}},
                          {"computed", {got.p2, got.pq, got.q2}},
                          {"matches", ok}});
            if (!ok)
                r.failures.push_back("explicit charge vector invariants differ from stated ones at D=" + std::to_string(D));
        }
        r.results["explicit_vectors"] = ex;
    }
    r.table = std::move(t);
    return r;
}

inline Result cmd_bh_tau(std::int64_t a, std::int64_t b, std::int64_t c)
{
    Result r;
    r.module = "attractor";
    r.parameters = {{"a", a}, {"b", b}, {"c", c}};
    const Form f{a, b, c};
    ScopedPrecision prec(kDefaultPrecision);
    r.results = {{"form", form_json(f)}, {"discriminant", f.discriminant()}, {"tau", complex_json(attractor_tau(f))}};
    return r;
}

inline Result cmd_bh_hilbert(std::int64_t D)
{
    Result r;
    r.module = "attractor";
    r.parameters = {{"D", D}};
    const auto H = hilbert_class_polynomial(D);
    json coeffs = json::array();
    Table t{{"power", "coefficient"}, {}};
    for (std::size_t i = 0; i < H.coefficients.size(); ++i) {
        coeffs.push_back(H.coefficients[i].get_str());
        t.add({std::to_string(i), H.coefficients[i].get_str()});
    }
    json forms = json::array();
    for (const auto& f : H.forms)
        forms.push_back(form_json(f));
    r.results = {{"D", D}, {"degree", H.degree()}, {"coefficients", coeffs}, {"forms", forms},
                 {"residual", num(H.residual)}, {"digits", H.digits}};
    r.table = std::move(t);
    return r;
}

inline Result series_result(const std::string& name, const QSeries& s)
{
    Result r;
    r.module = "qseries";
    json coeffs = json::array();
    Table t{{"exponent", "coefficient"}, {}};
    for (std::int64_t e = s.valuation(); e < s.order(); ++e) {
        const std::string c = s.coefficient(e).get_str();
        coeffs.push_back({{"exponent", e}, {"coefficient", c}});
        t.add({std::to_string(e), c});
    }
    r.results = {{"series", name}, {"valuation", s.valuation()}, {"order", s.order()}, {"coefficients", coeffs}};
    r.table = std::move(t);
    return r;
}

inline Result cmd_series(const std::string& name, std::int64_t order)
{
    const QSeries s = name == "delta" ? delta_series(order) : name == "invdelta" ? inverse_delta_series(order) : j_series(order);
    Result r = series_result(name, s);
    r.parameters = {{"name", name}, {"order", order}};
    return r;
}

inline Result cmd_trace(std::int64_t k, std::int64_t n)
{
    Result r;
    r.module = "qseries";
    r.parameters = {{"weight", k}, {"n", n}};
    const mpz_class tr = hecke_trace(k, n);
    r.results = {{"weight", k}, {"n", n}, {"trace", tr.get_str()}};
    if (k == 12) {
        const mpz_class tau = delta_series(n + 1).integer_coefficient(n);
        r.results["tau_from_product"] = tau.get_str();
        if (tau != tr)
            r.failures.push_back("trace " + tr.get_str() + " != tau(n) = " + tau.get_str());
    } else if (k == 4 || k == 6 || k == 8 || k == 10 || k == 14) {
        if (tr != 0)
            r.failures.push_back("no cusp forms of weight " + std::to_string(k) + " but trace is " + tr.get_str());
    }
    return r;
}

inline Result cmd_rademacher(const std::string& kind, std::int64_t n, std::int64_t d, std::int64_t cmax, unsigned precision)
{
    Result r;
    r.module = "rademacher";
    r.parameters = {{"kind", kind}, {"n", n}, {"cmax", cmax}, {"precision", precision}};
    RademacherParams p{cmax, precision};
    ScopedPrecision prec(precision + 10);
    Real value;
    std::optional<mpz_class> exact;
    if (kind == "invdelta") {
        value = rademacher_inv_delta(n, p);
        exact = inverse_delta_series(n + 1).integer_coefficient(n);
    } else if (kind == "tau") {
        const Real beta = calibrate_beta_delta(p);
        value = rademacher_tau(n, beta, p);
        exact = delta_series(n + 1).integer_coefficient(n);
        r.results["beta"] = num(beta);
    } else {
        r.parameters["d"] = d;
        value = rd_coefficient(d, n, p);
        if (d == 1)
            exact = j_series(n + 1).integer_coefficient(n);
    }
    r.results["value"] = num(value);
    r.results["value_digits"] = to_string(value, static_cast<int>(precision));
    if (exact) {
        r.results["exact"] = exact->get_str();
        const Real ex = to_real(*exact);
        if (ex != 0)
            r.results["relative_error"] = num(Real(boost::multiprecision::abs((value - ex) / ex)));
    }
    return r;
}

inline Result cmd_singular_trace(std::int64_t n, unsigned precision, std::int64_t order)
{
    Result r;
    r.module = "rademacher";
    r.parameters = {{"n", n}, {"precision", precision}, {"order", order}};
    SingularTraceParams p;
    p.precision_digits = precision;
    p.order = order;
    const auto t = trace_singular_moduli(n, p);
    json forms = json::array();
    Table tab{{"a", "b", "c", "re", "im"}, {}};
    for (std::size_t i = 0; i < t.forms.size(); ++i) {
        const auto& f = t.forms[i];
        forms.push_back({{"form", form_json(f)}, {"value", complex_json(t.values[i])}});
        tab.add({std::to_string(f.a), std::to_string(f.b), std::to_string(f.c), fmt(t.values[i].re.convert_to<double>()),
                 fmt(t.values[i].im.convert_to<double>())});
    }
    r.results = {{"n", n},
                 {"classes", t.classes},
                 {"expected_classes", t.expected_classes},
                 {"trace", num(t.value)},
                 {"trace_digits", to_string(t.value, static_cast<int>(precision))},
                 {"expected", t.expected.get_str()},
                 {"residual", num(t.residual)},
                 {"imaginary_part", num(t.imaginary_part)},
                 {"order", t.order},
                 {"values", forms}};
    if (t.residual > 1e-4)
        r.failures.push_back("trace differs from (24n-1)p(n) = " + t.expected.get_str() + " by " + fmt(num(t.residual)));
    if (t.classes != t.expected_classes)
        r.failures.push_back("found " + std::to_string(t.classes) + " classes, expected " + std::to_string(t.expected_classes));
    r.table = std::move(tab);
    return r;
}

inline Result cmd_ecc_verify(std::int64_t q)
{
    Result r;
    r.module = "eccensus";
    r.parameters = {{"q", q}};
    const auto rep = verify_deuring(q);
    json entries = json::array();
    Table t{{"q", "t", "observed", "expected", "hurwitz", "status"}, {}};
    for (const auto& e : rep.entries) {
        const char* status = e.pass ? "pass" : "fail";
        entries.push_back({{"t", e.t}, {"observed", e.observed}, {"expected", e.expected},
                           {"hurwitz", e.hurwitz.to_string()}, {"status", status}});
        t.add({std::to_string(q), std::to_string(e.t), std::to_string(e.observed), std::to_string(e.expected),
               e.hurwitz.to_string(), status});
        if (!e.pass)
            r.failures.push_back("q=" + std::to_string(q) + " t=" + std::to_string(e.t) + ": N(t)=" +
                                 std::to_string(e.observed) + " expected " + std::to_string(e.expected));
    }
    r.results = {{"q", q}, {"total_classes", rep.total_classes}, {"passed", rep.passed}, {"entries", entries}};
    r.table = std::move(t);
    return r;
}

inline Result cmd_ecc_torsion(std::int64_t q, std::int64_t n, std::optional<std::int64_t> t_opt)
{
    Result r;
    r.module = "eccensus";
    r.parameters = {{"q", q}, {"n", n}};
    std::vector<std::int64_t> ts;
    if (t_opt) {
        r.parameters["t"] = *t_opt;
        require_torsion_conditions(q, *t_opt, n);
        ts.push_back(*t_opt);
    } else {
        ts = admissible_torsion_traces(q, n);
    }
    json entries = json::array();
    Table tab{{"q", "t", "n", "observed", "hurwitz", "kronecker", "fractional", "status"}, {}};
    for (std::int64_t t : ts) {
        const auto rep = torsion_report(q, t, n);
        std::string status;
        if (rep.fractional()) {
            status = "reported";
        } else {
            const bool ok = rep.hurwitz == mpq_class(rep.observed);
            status = ok ? "pass" : "fail";
            if (!ok)
                r.failures.push_back("q=" + std::to_string(q) + " t=" + std::to_string(t) + " n=" + std::to_string(n) +
                                     ": observed " + std::to_string(rep.observed) + " expected " + rep.hurwitz.to_string());
        }
        entries.push_back({{"t", t}, {"observed", rep.observed}, {"hurwitz", rep.hurwitz.to_string()},
                           {"kronecker", rep.kronecker}, {"primitive", rep.primitive},
                           {"fractional", rep.fractional()}, {"status", status}});
        tab.add({std::to_string(q), std::to_string(t), std::to_string(n), std::to_string(rep.observed),
                 rep.hurwitz.to_string(), std::to_string(rep.kronecker), rep.fractional() ? "true" : "false", status});
    }
    r.results = {{"q", q}, {"n", n}, {"entries", entries}};
    r.table = std::move(tab);
    return r;
}

inline Result cmd_cft_zk(std::int64_t k, std::int64_t cmax, unsigned precision, std::int64_t nmax, std::int64_t order,
                         bool numeric_traces)
{
    Result r;
    r.module = "cftx";
    r.parameters = {{"k", k}, {"cmax", cmax}, {"precision", precision}, {"nmax", nmax}, {"order", order},
                    {"numeric_traces", numeric_traces}};
    const QSeries z = extremal_partition_function(k, order);
    json coeffs = json::array();
    for (std::int64_t e = z.valuation(); e < z.order(); ++e)
        coeffs.push_back({{"exponent", e}, {"coefficient", z.coefficient(e).get_str()}});
    const auto rep = verify_zk_identity(k, {cmax, precision, nmax, numeric_traces});
    json checks = json::array();
    Table t{{"n", "exact", "predicted", "relative_residual"}, {}};
    for (const auto& c : rep.coefficients) {
        checks.push_back({{"n", c.n}, {"exact", c.exact.get_str()}, {"predicted", num(c.predicted)},
                          {"relative_residual", num(c.relative_residual)}});
        t.add({std::to_string(c.n), c.exact.get_str(), fmt(num(c.predicted)), fmt(num(c.relative_residual))});
    }
    json ratios = json::array();
    for (std::size_t i = 1; i < rep.trace_ratios.size(); ++i)
        ratios.push_back(num(rep.trace_ratios[i]));
    r.results = {{"k", k},
                 {"coefficients", coeffs},
                 {"trace_ratios", ratios},
                 {"constant_predicted", num(rep.constant_predicted)},
                 {"constant_exact", rep.constant_exact.get_str()},
                 {"identity", checks},
                 {"max_relative_residual", num(rep.max_relative_residual)}};
    if (rep.max_relative_residual >= 1e-2)
        r.failures.push_back("identity residual " + fmt(rep.max_relative_residual) + " >= 1e-2");
    if (boost::multiprecision::abs(rep.constant_predicted - to_real(rep.constant_exact)) > 1e-6)
        r.failures.push_back("constant term mismatch");
    r.table = std::move(t);
    return r;
}

inline Result cmd_cft_polar(std::int64_t mmax, const std::string& emit, unsigned jobs)
{
    Result r;
    r.module = "cftx";
    r.parameters = {{"mmax", mmax}, {"emit", emit}};
    if (emit == "extremal") {
        const auto rep = extremal_n2_report(mmax, jobs);
        json rows = json::array();
        Table t{{"m", "J", "P", "J_minus_P", "flagged", "reported"}, {}};
        for (const auto& row : rep.rows) {
            rows.push_back({{"m", row.m}, {"J", row.J}, {"P", row.P}, {"J_minus_P", row.J_minus_P},
                            {"flagged", row.flagged}, {"reported", row.reported}});
            t.add({std::to_string(row.m), std::to_string(row.J), std::to_string(row.P), std::to_string(row.J_minus_P),
                   row.flagged ? "true" : "false", row.reported ? "true" : "false"});
        }
        r.results = {{"mmax", mmax},
                     {"flagged", rep.flagged},
                     {"reported_indices", reported_extremal_indices()},
                     {"matches_reported", rep.matches_reported},
                     {"excess_grows", rep.excess_grows},
                     {"rows", rows}};
        if (!rep.excess_grows)
            r.failures.push_back("P - J does not grow for m >= 100");
        r.table = std::move(t);
        return r;
    }

    const auto f = figure_data(mmax, jobs);
    r.results = {{"mmax", mmax}, {"c_scan", num(f.c_scan)}, {"c_scan_m", f.c_scan_m},
                 {"bin_rule", "freedman-diaconis"}, {"bin_width", num(f.bin_width)}, {"bins", f.histogram.size()}};
    json rows = json::array();
    Table t;
    if (emit == "table") {
        t.header = {"m", "J", "P_formula", "P_bruteforce", "excess", "normalized_excess"};
        for (const auto& p : f.points) {
            rows.push_back({{"m", p.m}, {"J", p.J}, {"P_formula", p.P_formula}, {"P_bruteforce", p.P_bruteforce},
                            {"excess", p.excess}, {"normalized_excess", num(p.normalized_excess)}});
            t.add({std::to_string(p.m), std::to_string(p.J), std::to_string(p.P_formula), std::to_string(p.P_bruteforce),
                   std::to_string(p.excess), fmt(p.normalized_excess)});
        }
    } else if (emit == "figure-data") {
        t.header = {"m", "normalized_excess"};
        for (const auto& p : f.points) {
            rows.push_back({{"m", p.m}, {"normalized_excess", num(p.normalized_excess)}});
            t.add({std::to_string(p.m), fmt(p.normalized_excess)});
        }
    } else if (emit == "histogram") {
        t.header = {"bin_left", "bin_right", "count"};
        for (const auto& b : f.histogram) {
            rows.push_back({{"bin_left", num(b.left)}, {"bin_right", num(b.right)}, {"count", b.count}});
            t.add({fmt(b.left), fmt(b.right), std::to_string(b.count)});
        }
    } else {
        t.header = {"value", "cumulative_fraction"};
        for (const auto& c : f.cdf) {
            rows.push_back({{"value", num(c.value)}, {"cumulative_fraction", num(c.cumulative_fraction)}});
            t.add({fmt(c.value), fmt(c.cumulative_fraction)});
        }
    }
    r.results["rows"] = rows;
    r.table = std::move(t);
    return r;
}

inline Result cmd_stats_cl(std::int64_t p, std::int64_t N)
{
    Result r;
    r.module = "classgroup";
    r.parameters = {{"p", p}, {"N", N}};
    const auto s = cl_statistics(p, N);
    const double pred = cohen_lenstra_prediction(p);
    r.results = {{"p", p},
                 {"N", N},
                 {"fundamental_count", s.fundamental_count},
                 {"count_indivisible", s.count_indivisible},
                 {"proportion", num(s.proportion)},
                 {"prediction", num(pred)},
                 {"difference", num(s.proportion - pred)}};
    return r;
}

inline Result cmd_stats_ng(std::int64_t g, std::int64_t x, unsigned jobs)
{
    Result r;
    r.module = "classgroup";
    r.parameters = {{"g", g}, {"x", x}};
    const std::int64_t n = ng_count(g, x, jobs);
    const double c = cg_constant(g);
    r.results = {{"g", g},
                 {"x", x},
                 {"count", n},
                 {"cg_constant", num(c)},
                 {"ratio", num(static_cast<double>(n) / static_cast<double>(x))}};
    return r;
}

inline Result cmd_stats_hscan(std::int64_t N, double eps)
{
    Result r;
    r.module = "classgroup";
    r.parameters = {{"N", N}, {"eps", num(eps)}};
    if (N < 1)
        throw UsageError("--N must be >= 1");
    const auto sf = square_free_sieve(N);
    const auto h = class_number_table(4 * N);
    json rows = json::array();
    Table t{{"d", "D", "h", "siegel"}, {}};
    std::int64_t hmax = 0;
    for (std::int64_t d = 1; d <= N; ++d) {
        if (!sf[static_cast<std::size_t>(d)])
            continue;
        const std::int64_t D = field_discriminant_of_negative(d);
        const std::int64_t hd = h[static_cast<std::size_t>(-D)];
        const double s = siegel_reference_curve(D, eps);
        hmax = std::max(hmax, hd);
        rows.push_back({{"d", d}, {"D", D}, {"h", hd}, {"siegel", num(s)}});
        t.add({std::to_string(d), std::to_string(D), std::to_string(hd), fmt(s)});
    }
    r.results = {{"N", N}, {"count", rows.size()}, {"h_max", hmax}, {"rows", rows}};
    r.table = std::move(t);
    return r;
}

// ---- driver ---------------------------------------------------------------

inline void write_json(std::ostream& out, const std::string& command, const Result& r, std::optional<double> ms)
{
    json env;
    env["command"] = command;
    env["parameters"] = r.parameters;
    env["results"] = r.results;
    env["provenance"] = {{"module", r.module}};
    env["status"] = r.failures.empty() ? "ok" : "failed";
    if (!r.failures.empty())
        env["failures"] = r.failures;
    if (ms)
        env["wall_time_ms"] = num(*ms);
    out << env.dump(2) << "\n";
}

inline void write_csv(std::ostream& out, const std::string& command, const Result& r, std::optional<double> ms)
{
    out << "# command: " << command << "\n";
    out << "# parameters: " << r.parameters.dump() << "\n";
    out << "# module: " << r.module << "\n";
    if (r.results.is_object())
        for (auto it = r.results.begin(); it != r.results.end(); ++it)
            if (!it.value().is_array() && !it.value().is_object())
                out << "# " << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
                    << "\n";
    if (ms)
        out << "# wall_time_ms: " << fmt(num(*ms)) << "\n";
    Table t;
    if (r.table) {
        t = *r.table;
    } else {
        t.header = {"key", "value"};
        detail::flatten(r.results, "", t);
    }
    std::vector<std::string> cells;
    for (const auto& h : t.header)
        cells.push_back(detail::csv_cell(h));
    out << detail::join(cells, ",") << "\n";
    for (const auto& row : t.rows) {
        cells.clear();
        for (const auto& c : row)
            cells.push_back(detail::csv_cell(c));
        out << detail::join(cells, ",") << "\n";
    }
}

inline unsigned precision_from_env()
{
    const char* v = std::getenv(kPrecisionEnv);
    if (!v || !*v)
        return kDefaultPrecision;
    char* end = nullptr;
    const long p = std::strtol(v, &end, 10);
    if (*end || p < 15 || p > 2000)
        throw UsageError(std::string(kPrecisionEnv) + " must be an integer in [15, 2000], got '" + v + "'");
    return static_cast<unsigned>(p);
}

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Globals g;
    try {
        g.precision = precision_from_env();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App app{"Class groups, modular forms and black-hole counting"};
    app.name("bhcg");
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", g.jobs, "Worker threads for long scans (0 = all cores)");
    app.add_flag("--neg", g.neg, "Negate discriminant arguments");
    app.add_flag("--timing", g.timing, "Include wall time in the output");

    std::function<Result()> action;
    std::string command;
    auto set = [&](CLI::App* sub, std::string name, std::function<Result()> f) {
        sub->callback([&, name, f] {
            command = name;
            action = f;
        });
    };

    std::int64_t D = 0, a = 0, b = 0, c = 0, order = 20, k = 12, n = 1, d = 1, cmax = 30, q = 0, mmax = 100;
    std::int64_t p = 3, N = 100000, gg = 3, x = 1000, nmax = 5, st_order = 0, zk_cmax = 200;
    std::optional<unsigned> precision;
    std::optional<std::int64_t> torsion_t;
    std::string name, kind, emit{"table"};
    bool numeric_traces = false;
    double eps = 0.05;

    auto* cg = app.add_subcommand("classgroup", "Reduced forms and group structure of discriminant D");
    cg->add_option("D", D, "Negative discriminant")->required();
    set(cg, "classgroup", [&] { return cmd_classgroup(detail::discriminant_arg(D, g)); });

    auto* bh = app.add_subcommand("bh", "Black-hole charges and attractor points");
    bh->require_subcommand(1);
    auto* bhc = bh->add_subcommand("classify", "U-duality classes at discriminant D");
    bhc->add_option("D", D)->required();
    set(bhc, "bh classify", [&] { return cmd_bh_classify(detail::discriminant_arg(D, g)); });
    auto* bht = bh->add_subcommand("tau", "Attractor point of the form [a,b,c]");
    bht->add_option("a", a)->required();
    bht->add_option("b", b)->required();
    bht->add_option("c", c)->required();
    set(bht, "bh tau", [&] { return cmd_bh_tau(a, b, c); });
    auto* bhh = bh->add_subcommand("hilbert", "Hilbert class polynomial of fundamental D");
    bhh->add_option("D", D)->required();
    set(bhh, "bh hilbert", [&] { return cmd_bh_hilbert(detail::discriminant_arg(D, g)); });

    auto* se = app.add_subcommand("series", "q-expansion coefficients");
    se->add_option("name", name)->required()->check(CLI::IsMember({"delta", "invdelta", "j"}));
    se->add_option("--order", order, "Coefficients below q^order");
    set(se, "series", [&] { return cmd_series(name, order); });

    auto* tr = app.add_subcommand("trace", "Trace of the Hecke operator T_n on S_k");
    tr->add_option("--weight", k)->required();
    tr->add_option("--n", n)->required();
    set(tr, "trace", [&] { return cmd_trace(k, n); });

    auto* ra = app.add_subcommand("rademacher", "Rademacher sums for 1/Delta, Delta and R_d");
    ra->add_option("kind", kind)->required()->check(CLI::IsMember({"invdelta", "tau", "rd"}));
    ra->add_option("--n", n)->required();
    ra->add_option("--d", d, "Polar order for rd");
    ra->add_option("--cmax", cmax);
    ra->add_option("--precision", precision);
    set(ra, "rademacher", [&] { return cmd_rademacher(kind, n, d, cmax, precision.value_or(g.precision)); });

    auto* sg = app.add_subcommand("singular-trace", "Trace of P over Gamma0(6)-classes of CM points");
    sg->add_option("--n", n)->required();
    sg->add_option("--precision", precision);
    sg->add_option("--order", st_order, "Truncation order of G (0 = automatic)");
    set(sg, "singular-trace", [&] { return cmd_singular_trace(n, precision.value_or(g.precision), st_order); });

    auto* ec = app.add_subcommand("ecc", "Elliptic-curve census over F_q");
    ec->require_subcommand(1);
    auto* ecv = ec->add_subcommand("verify", "Compare N(t) with class numbers");
    ecv->add_option("--q", q)->required();
    set(ecv, "ecc verify", [&] { return cmd_ecc_verify(q); });
    auto* ect = ec->add_subcommand("torsion", "Classes with full n-torsion");
    ect->add_option("--q", q)->required();
    ect->add_option("--n", n)->required();
    ect->add_option("--t", torsion_t, "A single trace (default: every admissible t)");
    set(ect, "ecc torsion", [&] { return cmd_ecc_torsion(q, n, torsion_t); });

    auto* cf = app.add_subcommand("cft", "Extremal partition functions and polar counts");
    cf->require_subcommand(1);
    auto* cfz = cf->add_subcommand("zk", "Z_k and its Rademacher expression");
    cfz->add_option("--k", k)->required();
    cfz->add_option("--cmax", zk_cmax);
    cfz->add_option("--precision", precision);
    cfz->add_option("--nmax", nmax, "Check coefficients q^1..q^nmax");
    cfz->add_option("--order", order, "Expansion order of Z_k");
    cfz->add_flag("--numeric-traces", numeric_traces, "Use computed singular traces");
    set(cfz, "cft zk", [&] { return cmd_cft_zk(k, zk_cmax, precision.value_or(g.precision), nmax, order, numeric_traces); });
    auto* cfp = cf->add_subcommand("polar", "Polar-term counts P(m) against Jacobi dimensions J(m)");
    cfp->add_option("--mmax", mmax)->required();
    cfp->add_option("--emit", emit)->check(CLI::IsMember({"table", "figure-data", "histogram", "cdf", "extremal"}));
    set(cfp, "cft polar", [&] { return cmd_cft_polar(mmax, emit, g.jobs); });

    auto* sa = app.add_subcommand("stats", "Class-number statistics");
    sa->require_subcommand(1);
    auto* scl = sa->add_subcommand("cohen-lenstra", "Proportion of h(D) prime to p");
    scl->add_option("--p", p)->required();
    scl->add_option("--N", N)->required();
    set(scl, "stats cohen-lenstra", [&] { return cmd_stats_cl(p, N); });
    auto* sng = sa->add_subcommand("ng", "Square-free d <= x with an element of order g");
    sng->add_option("--g", gg)->required();
    sng->add_option("--x", x)->required();
    set(sng, "stats ng", [&] { return cmd_stats_ng(gg, x, g.jobs); });
    auto* shs = sa->add_subcommand("h-scan", "h of Q(sqrt(-d)) for square-free d <= N with the Siegel curve");
    shs->add_option("--N", N)->required();
    shs->add_option("--eps", eps)->check(CLI::Range(1e-6, 0.5));
    set(shs, "stats h-scan", [&] { return cmd_stats_hscan(N, eps); });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!action) {
        err << "error: no command given\n";
        return kExitUsage;
    }

    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r = action();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::overflow_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "check failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    std::optional<double> ms;
    if (g.timing)
        ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (g.format == "csv")
        write_csv(out, command, r, ms);
    else
        write_json(out, command, r, ms);
    for (const auto& f : r.failures)
        err << "check failed: " << f << "\n";
    return r.failures.empty() ? kExitOk : kExitCheckFailed;
}

} // namespace bhcg::cli
