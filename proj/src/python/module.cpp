#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "cfnormal/arith.hpp"
#include "cfnormal/census.hpp"
#include "cfnormal/cf_core.hpp"
#include "cfnormal/enumeration.hpp"
#include "cfnormal/integer.hpp"
#include "cfnormal/measures.hpp"
#include "cfnormal/report_io.hpp"
#include "cfnormal/stream_stats.hpp"

namespace py = pybind11;
using namespace cfn;

namespace {

// 128-bit values cross the boundary as Python ints via their decimal text.
py::int_ to_py(Int v) { return py::int_(py::str(to_string(v))); }
Int from_py(const py::int_& v) { return parse_int(std::string(py::str(v))); }

py::tuple pair(Int a, Int b) { return py::make_tuple(to_py(a), to_py(b)); }

Rational make_rational(const py::int_& p, const py::int_& q) { return Rational::make(from_py(p), from_py(q)); }

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

DigitString copy_digits(std::span<const Digit> d) { return DigitString(d.begin(), d.end()); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Continued-fraction normal numbers
        ---------------------------------

        Exact expansions, cylinder measures, rational enumerations,
        concatenated digit streams and abnormal-rational censuses.
        Rationals are passed as (p, q) with 0 < p < q and gcd(p, q) = 1.
    )pbdoc";

    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<InsufficientDigits>(m, "InsufficientDigits", PyExc_ValueError);
    py::register_exception<NotMemberError>(m, "NotMemberError", PyExc_ValueError);
    py::register_exception<OverflowError>(m, "CFOverflowError", PyExc_OverflowError);

    m.def(
        "expand",
        [](const py::int_& p, const py::int_& q, const std::string& conv) {
            return copy_digits(expand(make_rational(p, q), parse_convention(conv)).digits());
        },
        py::arg("p"), py::arg("q"), py::arg("conv") = "long", R"pbdoc(
        Continued fraction digits of p/q. "long" ends in 1, "short" ends in a digit >= 2.
    )pbdoc");

    m.def(
        "evaluate",
        [](const DigitString& digits) {
            const Fraction f = evaluate_digits(digits);
            return pair(f.num, f.den);
        },
        py::arg("digits"), "Exact value (p, q) of a digit list.");

    m.def(
        "convergents",
        [](const DigitString& digits) {
            py::list out;
            for (const auto& c : convergents(digits)) out.append(pair(c.p, c.q));
            return out;
        },
        py::arg("digits"), "Convergents (p_k, q_k) for k = 1..len(digits).");

    m.def(
        "concat",
        [](const py::tuple& r, const py::tuple& rp, const std::string& conv) {
            const Rational c = concat_rationals(make_rational(r[0], r[1]), make_rational(rp[0], rp[1]),
                                                parse_convention(conv));
            return pair(c.num(), c.den());
        },
        py::arg("r"), py::arg("rprime"), py::arg("conv") = "long",
        "The rational whose digits are those of r followed by those of rprime.");

    m.def("gauss_map", &gauss_map, py::arg("x"));
    m.def("mirror", [](const DigitString& d) { return mirror(d); }, py::arg("digits"));

    m.def(
        "gauss_measure", [](const DigitString& s) { return gauss_measure(Pattern(s)); }, py::arg("pattern"),
        "Gauss measure of the cylinder of a digit pattern.");
    m.def(
        "lebesgue_measure",
        [](const DigitString& s) {
            const Fraction f = lebesgue_measure(Pattern(s));
            return pair(f.num, f.den);
        },
        py::arg("pattern"));
    m.def(
        "cylinder",
        [](const DigitString& s) {
            const auto g = cylinder_geometry(Pattern(s));
            return py::make_tuple(pair(g.lower.num, g.lower.den), pair(g.upper.num, g.upper.den));
        },
        py::arg("pattern"), "Endpoints ((a, b), (c, d)) of the cylinder, lower first.");
    m.def(
        "in_cylinder",
        [](const DigitString& s, const py::int_& p, const py::int_& q) {
            return in_cylinder(Pattern(s), make_rational(p, q));
        },
        py::arg("pattern"), py::arg("p"), py::arg("q"), "Whether the Long expansion of p/q begins with pattern.");
    m.def("constants", [] { return to_py(to_json(constants())); });

    m.def("is_prime", &is_prime_u64, py::arg("n"));
    m.def(
        "pi_prime",
        [](std::uint64_t x, std::uint64_t q, std::uint64_t a) { return pi_prime_linear(x, q, a); },
        py::arg("x"), py::arg("q"), py::arg("a"), "Number of l <= x with l*q + a prime.");
    m.def(
        "pi_prime_joint",
        [](std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp, std::uint64_t ap) {
            return pi_prime_joint(x, q, a, qp, ap);
        },
        py::arg("x"), py::arg("q"), py::arg("a"), py::arg("qp"), py::arg("ap"));

    m.def(
        "count",
        [](const std::string& kind, std::uint64_t m) { return count_R(parse_kind(kind), m); },
        py::arg("kind"), py::arg("m"), "Number of members with denominator <= m.");
    m.def(
        "rational_at",
        [](const std::string& kind, std::uint64_t i) {
            const Entry e = rational_at(parse_kind(kind), i);
            return py::make_tuple(e.num, e.den);
        },
        py::arg("kind"), py::arg("i"), "The i-th member (1-based) as an unreduced (p, q).");
    m.def(
        "index_of",
        [](const std::string& kind, std::uint64_t p, std::uint64_t q) {
            return index_of(parse_kind(kind), Entry{p, q});
        },
        py::arg("kind"), py::arg("p"), py::arg("q"));

    m.def(
        "stream",
        [](const std::string& kind, std::uint64_t n, const std::string& conv) {
            DigitStream s(parse_kind(kind), parse_convention(conv));
            DigitString out(n);
            out.resize(s.read(out));
            return out;
        },
        py::arg("kind"), py::arg("n"), py::arg("conv") = "long",
        "First n digits of the concatenated expansions of a sequence kind.");

    m.def(
        "normality_report",
        [](const std::string& kind, std::uint64_t N, const std::string& conv, Digit max_digit,
           std::size_t max_len) {
            NormalityReport rep;
            {
                py::gil_scoped_release release;
                rep = normality_report(parse_kind(kind), parse_convention(conv), N, max_digit, max_len);
            }
            return to_py(to_json(rep));
        },
        py::arg("kind"), py::arg("N"), py::arg("conv") = "long", py::arg("max_digit") = 5, py::arg("max_len") = 2);

    m.def(
        "is_normal",
        [](const py::int_& p, const py::int_& q, double eps, const DigitString& s, const std::string& conv) {
            return is_eps_s_normal(make_rational(p, q), NormalityParams::make(eps, Pattern(s), parse_convention(conv)))
                .normal;
        },
        py::arg("p"), py::arg("q"), py::arg("eps") = 0.25, py::arg("s") = DigitString{1},
        py::arg("conv") = "long", "Whether p/q is (eps, s)-normal.");

    m.def(
        "census",
        [](const std::string& kind, std::uint64_t m, double eps, const DigitString& s, const std::string& conv,
           unsigned threads) {
            const auto p = NormalityParams::make(eps, Pattern(s), parse_convention(conv));
            CensusReport rep;
            {
                py::gil_scoped_release release;
                rep = run_census(parse_kind(kind), m, p, threads ? threads : default_threads());
            }
            return to_py(census_json({rep}));
        },
        py::arg("kind"), py::arg("m"), py::arg("eps") = 0.25, py::arg("s") = DigitString{1},
        py::arg("conv") = "long", py::arg("threads") = 0, "Count abnormal rationals with denominator <= m.");

    m.def(
        "estimate_deviation_set",
        [](const std::string& set, double eps, std::uint64_t N, std::uint64_t samples, std::uint64_t seed,
           const DigitString& s, unsigned threads) {
            if (set != "E" && set != "F") throw std::invalid_argument("set must be 'E' or 'F'");
            const Pattern pat(s);
            const bool is_e = set == "E";
            const std::size_t depth = is_e ? N + pat.size() - 1 : N;
            MeasureEstimate est;
            {
                py::gil_scoped_release release;
                est = sample_statistics(
                    [&](std::span<const Digit> d, std::span<double> out) {
                        out[0] = (is_e ? in_E_set(d, eps, pat, N) : in_F_set(d, eps, N)) ? 1.0 : 0.0;
                    },
                    1, depth, samples, seed, threads ? threads : default_threads())[0];
            }
            return to_py(to_json(est));
        },
        py::arg("set"), py::arg("eps"), py::arg("N"), py::arg("samples") = 100000, py::arg("seed") = 1,
        py::arg("s") = DigitString{1}, py::arg("threads") = 0,
        "Monte Carlo estimate of the Gauss measure of a frequency (E) or growth (F) deviation set.");

    m.attr("__version__") = "1.0.0";
}
