#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cfnormal/measures.hpp"
#include "oracles.hpp"

using namespace cfn;

namespace {

// mu from exact endpoints: |ln((1 + upper)/(1 + lower))| / ln 2, with the
// endpoints evaluated independently as <s> and <s with last digit + 1>.
double mu_oracle(const DigitString& s) {
    DigitString t = s;
    t.back() += 1;
    const oracle::BigRational a = oracle::evaluate(s), b = oracle::evaluate(t);
    const oracle::BigRational ratio = (1 + a) / (1 + b);
    // ln of a ratio near 1 via log1p of the exact difference.
    const oracle::BigRational diff = ratio - 1;
    return std::fabs(std::log1p(static_cast<double>(diff))) / std::log(2.0);
}

double density(double x) { return 1.0 / ((1.0 + x) * std::log(2.0)); }

} // namespace

TEST_SUITE("measures") {

TEST_CASE("pattern") {
    CHECK_THROWS_AS(Pattern(DigitString{}), std::invalid_argument);
    CHECK_THROWS_AS(Pattern(DigitString{1, 0}), std::invalid_argument);
    CHECK(Pattern::parse("1,2").digits().size() == 2);
    CHECK(Pattern::parse("[3, 4]") == Pattern{3, 4});
    CHECK(Pattern::parse("1.2.3") == Pattern{1, 2, 3});
    CHECK_THROWS(Pattern::parse("1,x"));
    CHECK(Pattern{1, 2, 3}.to_string() == "1,2,3");
    CHECK(Pattern{4, 9, 2}.max_digit() == 9);
}

TEST_CASE("cylinder geometry examples") {
    const auto g12 = cylinder_geometry(Pattern{1, 2});
    CHECK(g12.lower == Fraction{2, 3});
    CHECK(g12.upper == Fraction{3, 4});
    CHECK(g12.upper - g12.lower == Fraction{1, 12});
    for (Digit a = 1; a < 20; ++a) {
        const auto g = cylinder_geometry(Pattern{a});
        CHECK(g.lower == Fraction::reduced(1, static_cast<Int>(a + 1)));
        CHECK(g.upper == Fraction::reduced(1, static_cast<Int>(a)));
    }
    const auto g23 = cylinder_geometry(Pattern{2, 3});
    CHECK(g23.lower == Fraction{3, 7});
    CHECK(g23.upper == Fraction{4, 9});
}

TEST_CASE("gauss measure examples") {
    const double mu1 = gauss_measure(Pattern{1});
    CHECK(mu1 == doctest::Approx(std::log(4.0 / 3.0) / std::log(2.0)).epsilon(1e-14));
    CHECK(mu1 == doctest::Approx(oracle::simpson(density, 0.5, 1.0, 2000)).epsilon(1e-10));
    for (Digit a = 1; a <= 50; ++a) {
        const double ad = static_cast<double>(a);
        CHECK(gauss_measure(Pattern{a}) ==
              doctest::Approx(std::log1p(1.0 / (ad * (ad + 2))) / std::log(2.0)).epsilon(1e-13));
    }
    const double expect = std::log2(21.0 / 20.0);
    CHECK(gauss_measure(Pattern{1, 2}) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(gauss_measure(Pattern{2, 1}) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("gauss measure agrees with exact endpoints") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        const auto s = oracle::random_digits(rng, len, 30);
        CHECK(gauss_measure(s) == doctest::Approx(mu_oracle(s)).epsilon(1e-12));
    }
}

TEST_CASE("deep cylinders keep relative precision") {
    // 60 ones: width ~ G^-120, far below the spacing of doubles near 1/2.
    const DigitString ones(60, 1);
    CHECK(gauss_measure(ones) == doctest::Approx(mu_oracle(ones)).epsilon(1e-12));
    CHECK(gauss_measure(ones) > 0.0);
}

TEST_CASE("reversal invariance") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 15)(rng);
        auto s = oracle::random_digits(rng, len, 12);
        const double a = gauss_measure(s);
        std::reverse(s.begin(), s.end());
        worst = std::max(worst, std::fabs(a - gauss_measure(s)) / a);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("lebesgue width identity and bounds") {
    CHECK(lebesgue_measure(Pattern{1, 2}) == Fraction{1, 12});
    for (Digit a = 1; a < 30; ++a) {
        CHECK(lebesgue_measure(Pattern{a}) == Fraction{1, static_cast<Int>(a * (a + 1))});
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const auto s = oracle::random_digits(rng, len, 9);
        const Pattern p(s);
        const auto geo = cylinder_geometry(p);
        const auto lam = lebesgue_measure(p);
        CHECK(geo.upper - geo.lower == lam);
        // q_k (q_k + q_{k-1}) >= 2^k for any digits, so lambda(C_s) <= 2^-k.
        CHECK(lam.to_double() <= std::ldexp(1.0, -static_cast<int>(len)) + 1e-300);
        // Density of the Gauss measure lies in [1/(2 ln 2), 1/ln 2].
        const double mu = gauss_measure(p);
        const double l = lam.to_double();
        CHECK(mu >= l / (2 * std::log(2.0)) * (1 - 1e-12));
        CHECK(mu <= l / std::log(2.0) * (1 + 1e-12));
    }
}

TEST_CASE("cylinder membership") {
    CHECK(in_cylinder(Pattern{2}, Rational::make(1, 3)));
    CHECK_FALSE(in_cylinder(Pattern{2}, Rational::make(1, 2)));
    CHECK(in_cylinder(Pattern{1}, Rational::make(1, 2)));
    CHECK(in_cylinder(Pattern{1, 2}, Rational::make(3, 4)));
    CHECK_FALSE(in_cylinder(Pattern{1, 2}, Rational::make(2, 3)));
    // Every rational with den <= 60 lies in exactly one length-2 cylinder
    // with digits <= 60, and inside its closed interval.
    for (std::int64_t q = 2; q <= 60; ++q) {
        for (std::int64_t p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            const Rational x = Rational::make(p, q);
            int hits = 0;
            for (Digit a = 1; a <= 60; ++a) {
                for (Digit b = 1; b <= 60; ++b) {
                    const Pattern s{a, b};
                    if (!in_cylinder(s, x)) continue;
                    ++hits;
                    const auto g = cylinder_geometry(s);
                    const oracle::BigRational v(p, q);
                    CHECK(v >= oracle::BigRational(static_cast<long long>(g.lower.num), static_cast<long long>(g.lower.den)));
                    CHECK(v <= oracle::BigRational(static_cast<long long>(g.upper.num), static_cast<long long>(g.upper.den)));
                }
            }
            CHECK(hits == (expand(x, Convention::Long).size() >= 2 ? 1 : 0));
        }
    }
}

TEST_CASE("additivity over the next digit") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const auto s = oracle::random_digits(rng, std::uniform_int_distribution<std::size_t>(1, 5)(rng), 6);
        const double parent = gauss_measure(s);
        double sum = 0.0;
        auto child = s;
        child.push_back(0);
        for (Digit a = 1; a <= 200; ++a) {
            child.back() = a;
            sum += gauss_measure(child);
        }
        CHECK(sum <= parent * (1 + 1e-12));
        CHECK(parent - sum <= parent * 2.0 / 200.0);
    }
}

TEST_CASE("constants") {
    const auto c = constants();
    CHECK(c.g == doctest::Approx(1.1865691104).epsilon(1e-9));
    CHECK(c.g == doctest::Approx(kKhinchinLevy).epsilon(1e-15));
    CHECK(std::fabs(c.G - 1.6180339887) < 1e-9);
    CHECK(std::fabs(c.G * c.G - c.G - 1.0) < 1e-15);
    CHECK(std::exp(c.g) == doctest::Approx(3.2758).epsilon(1e-4));
    // g = integral of -ln x against the Gauss measure; substitute x = e^-t
    // to remove the log singularity: int_0^inf t e^-t / (1 + e^-t) dt / ln 2.
    const double integral =
        oracle::simpson([](double t) { return t * std::exp(-t) / (1.0 + std::exp(-t)); }, 0.0, 60.0, 20000) /
        std::log(2.0);
    CHECK(std::fabs(integral - c.g) < 1e-8);
}

TEST_CASE("sample_gauss") {
    CHECK(sample_gauss(0.5) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
    CHECK_THROWS(sample_gauss(0.0));
    CHECK_THROWS(sample_gauss(1.0));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 1'000'000;
    int below_half = 0, first_one = 0;
    for (int i = 0; i < n; ++i) {
        double v;
        do v = u(rng);
        while (v == 0.0);
        const double x = sample_gauss(v);
        if (x < 0.5) ++below_half;
        if (x >= 0.5) ++first_one;
    }
    CHECK(std::fabs(below_half / double(n) - std::log2(1.5)) < 0.002);
    CHECK(std::fabs(first_one / double(n) - 0.41504) < 0.002);
}

TEST_CASE("gauss digit extraction") {
    // 0.43 = <2, 3, 14, ...>
    const auto d = gauss_digits(0.43, 3);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 2);
    CHECK(d[1] == 3);
    CHECK(d[2] == 14);
    CHECK_THROWS_AS(gauss_digits(0.3, 41), std::invalid_argument);
    CHECK(gauss_digits(0.0, 5).empty());
}

TEST_CASE("Markov digit sampler matches cylinder measures") {
    std::mt19937_64 rng(1234);
    const auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53; };
    const int n = 400'000;
    int c1 = 0, c12 = 0, c3_at_20 = 0;
    for (int i = 0; i < n; ++i) {
        GaussDigitSampler s;
        DigitString d;
        for (int k = 0; k < 25; ++k) d.push_back(s.next(uniform()));
        if (d[0] == 1) ++c1;
        if (d[0] == 1 && d[1] == 2) ++c12;
        if (d[20] == 3) ++c3_at_20;  // stationarity: later digits share mu
        CHECK(s.count() == 25);
    }
    const double se = std::sqrt(0.25 / n);
    CHECK(std::fabs(c1 / double(n) - gauss_measure(Pattern{1})) < 4 * se);
    CHECK(std::fabs(c12 / double(n) - gauss_measure(Pattern{1, 2})) < 4 * se);
    CHECK(std::fabs(c3_at_20 / double(n) - gauss_measure(Pattern{3})) < 4 * se);
    // ln q_25 tracked by the sampler matches the big-integer continuant.
    GaussDigitSampler s;
    DigitString d;
    for (int k = 0; k < 200; ++k) d.push_back(s.next(uniform()));
    const auto q = oracle::denominator(d);
    const double exact = std::log(static_cast<double>(q >> (boost::multiprecision::msb(q) - 60))) +
                         (boost::multiprecision::msb(q) - 60) * std::log(2.0);
    CHECK(s.log_q() == doctest::Approx(exact).epsilon(1e-12));
}

}
