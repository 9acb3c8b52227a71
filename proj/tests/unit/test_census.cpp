#include <doctest.h>

#include <cmath>
#include <random>

#include "cfnormal/census.hpp"
#include "cfnormal/integer.hpp"
#include "oracles.hpp"

using namespace cfn;

namespace {

Rational R(Int p, Int q) { return Rational::make(p, q); }

constexpr double g = 1.1865691104156254;

// Direct evaluation of both inequalities from the Short/Long digits.
bool normal_oracle(std::uint64_t p, std::uint64_t q, double eps, const DigitString& s, Convention conv, double mu) {
    auto d = oracle::short_digits(p, q);
    if (conv == Convention::Long) {
        d.back() -= 1;
        d.push_back(1);
    }
    const double L = static_cast<double>(d.size());
    const double A = static_cast<double>(oracle::naive_count(d, s, d.size()));
    return std::fabs(A / L - mu) < eps && std::fabs(std::log(static_cast<double>(q)) / L - g) < eps;
}

} // namespace

TEST_SUITE("census") {

TEST_CASE("digit length") {
    CHECK(digit_length(R(1, 2), Convention::Short) == 1);
    CHECK(digit_length(R(2, 3), Convention::Long) == 3);
    const double lg = std::log(1.6180339887498949);
    for (std::int64_t q = 2; q <= 10'000; q += (q < 500 ? 1 : 37)) {
        for (std::int64_t p = 1; p < q; p += (q < 500 ? 1 : 13)) {
            if (std::gcd(p, q) != 1) continue;
            const auto ls = digit_length(R(p, q), Convention::Short);
            const auto ll = digit_length(R(p, q), Convention::Long);
            CHECK(ll == ls + 1);
            CHECK(static_cast<double>(ll) <= std::log(static_cast<double>(q)) / lg + 2.0);
        }
    }
}

TEST_CASE("eps-s normality examples") {
    const auto p = NormalityParams::make(0.5, Pattern{2}, Convention::Short);
    const auto v = is_eps_s_normal(R(3, 7), p);
    CHECK(v.normal);
    CHECK(v.count == 1);
    CHECK(v.length == 2);
    CHECK(v.frequency_gap == doctest::Approx(0.5 - 0.169925).epsilon(1e-4));
    CHECK(v.growth_gap == doctest::Approx(0.2136).epsilon(1e-3));
    const auto tight = NormalityParams::make(0.1, Pattern{2}, Convention::Short);
    CHECK_FALSE(is_eps_s_normal(R(3, 7), tight).normal);
    // Pattern longer than the expansion: no occurrences.
    const auto longp = NormalityParams::make(0.5, Pattern{2, 3, 4}, Convention::Short);
    const auto w = is_eps_s_normal(R(3, 7), longp);
    CHECK(w.count == 0);
    CHECK(w.frequency_ok == (gauss_measure(Pattern{2, 3, 4}) < 0.5));
    CHECK_THROWS(NormalityParams::make(0.0, Pattern{1}));
    CHECK_THROWS(NormalityParams::make(1.0, Pattern{1}));
}

TEST_CASE("n_delta") {
    CHECK(n_delta(1000, 0.1) == 4);
    CHECK(n_delta(3, 0.3) == 0);
    CHECK_THROWS(n_delta(2, 0.1));
    CHECK_THROWS(n_delta(100, 0.34));
    CHECK_THROWS(n_delta(100, 0.0));
    std::uint64_t prev = 0;
    for (std::uint64_t m = 3; m < 100'000; m = m * 5 / 4 + 1) {
        const auto n = n_delta(m, 0.2);
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("gamma membership") {
    const auto gp = GammaParams::make(10'000, 0.1, 0.1, Pattern{1});
    REQUIRE(gp.n >= 2);
    CHECK(in_gamma(R(1, 2), gp));
    CHECK_FALSE(in_gamma(R(1, 10'001), gp));  // denominator above m
    // Rationals shorter than n are always exceptional.
    for (std::int64_t q = 2; q < 60; ++q) {
        for (std::int64_t p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            if (digit_length(R(p, q)) < gp.n) CHECK(in_gamma(R(p, q), gp));
        }
    }
}

TEST_CASE("gamma proportion shrinks from m = 10^3 to 10^4") {
    auto proportion = [](std::uint64_t m) {
        const auto gp = GammaParams::make(m, 0.1, 0.1, Pattern{1});
        std::uint64_t in = 0, total = 0;
        for (std::uint64_t q = 2; q <= m; ++q) {
            for (std::uint64_t p = 1; p < q; ++p) {
                if (std::gcd(p, q) != 1) continue;
                ++total;
                in += in_gamma(R(static_cast<Int>(p), static_cast<Int>(q)), gp);
            }
        }
        return static_cast<double>(in) / static_cast<double>(total);
    };
    const double small = proportion(1000), large = proportion(10'000);
    MESSAGE("Gamma proportion m=1e3: " << small << ", m=1e4: " << large);
    CHECK(large < small);
}

namespace {

// Every length-n string with digits <= 8; returns {accepted, violations}.
std::pair<std::size_t, std::size_t> exhaust_gamma_prime(const GammaParams& gp) {
    const auto bounds = gamma_prime_q_bounds(gp);
    DigitString s(gp.n, 1);
    std::size_t accepted = 0, violations = 0;
    while (true) {
        if (gamma_prime_contains(s, gp)) {
            ++accepted;
            const double qn = static_cast<double>(oracle::denominator(s));
            const double qn1 = static_cast<double>(oracle::denominator(std::span(s).first(gp.n - 1)));
            if (!(bounds.lower <= qn1 && qn1 < qn && qn <= bounds.upper)) ++violations;
        }
        std::size_t i = s.size();
        while (i > 0 && s[i - 1] == 8) s[--i] = 1;
        if (i == 0) break;
        ++s[i - 1];
    }
    return {accepted, violations};
}

} // namespace

TEST_CASE("gamma prime bounds hold exhaustively") {
    // m = 200 gives n = 3, and q_2 would need to lie in [10.4, 10.9]: no
    // prefix qualifies, so the bound holds vacuously.
    const auto small = GammaParams::make(200, 0.1, 0.1, Pattern{1});
    CHECK(small.n == 3);
    const auto [acc_small, bad_small] = exhaust_gamma_prime(small);
    CHECK(bad_small == 0);
    CHECK(acc_small == 0);
    // m = 10^4 gives n = 6 and a nonempty accepted set.
    const auto large = GammaParams::make(10'000, 0.1, 0.1, Pattern{1});
    CHECK(large.n == 6);
    const auto [acc_large, bad_large] = exhaust_gamma_prime(large);
    MESSAGE("accepted length-6 prefixes: " << acc_large);
    CHECK(acc_large > 0);
    CHECK(bad_large == 0);
    CHECK_THROWS(gamma_prime_contains(DigitString(large.n + 1, 1), large));
}

TEST_CASE("accepted prefixes are disjoint cylinders") {
    // Distinct equal-length prefixes give cylinders with disjoint interiors.
    const auto gp = GammaParams::make(10'000, 0.1, 0.1, Pattern{1});
    std::vector<std::pair<Fraction, Fraction>> cyl;
    DigitString s(gp.n, 1);
    while (true) {
        if (gamma_prime_contains(s, gp)) {
            const auto geo = cylinder_geometry(Pattern(s));
            cyl.emplace_back(geo.lower, geo.upper);
        }
        std::size_t i = s.size();
        while (i > 0 && s[i - 1] == 4) s[--i] = 1;
        if (i == 0) break;
        ++s[i - 1];
    }
    std::sort(cyl.begin(), cyl.end());
    bool disjoint = true;
    for (std::size_t i = 1; i < cyl.size(); ++i) disjoint = disjoint && !(cyl[i].first < cyl[i - 1].second);
    CHECK(disjoint);
}

TEST_CASE("all-ones prefixes are never in the complement-side set") {
    const auto gp = GammaParams::make(1'000'000'000ULL, 0.1, 0.1, Pattern{2});
    CHECK_FALSE(gamma_prime_contains(DigitString(gp.n, 1), gp));
}

TEST_CASE("gamma complement consistency for den <= 500") {
    const auto gp = GammaParams::make(500, 0.1, 0.1, Pattern{1});
    const double mu = gauss_measure(gp.s);
    std::size_t bad = 0;
    for (std::int64_t q = 2; q <= 500; ++q) {
        for (std::int64_t p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            const auto e = expand(R(p, q));
            if (e.size() < gp.n) continue;
            const auto prefix = e.digits().first(gp.n);
            const auto st = prefix_statistics(prefix, gp.s.digits());
            const double n = static_cast<double>(gp.n);
            const bool growth_dev = std::fabs(st.log_qn / n - g) > gp.delta;
            const bool freq_dev = std::fabs(static_cast<double>(st.windows) / n - mu) > gp.eta;
            const bool in = in_gamma(R(p, q), gp);
            if (in != (growth_dev || freq_dev)) ++bad;
            if ((growth_dev || freq_dev) && gamma_prime_contains(prefix, gp)) ++bad;
            if (gamma_prime_contains(prefix, gp) && in) ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("census examples and oracle") {
    const auto loose = NormalityParams::make(0.9, Pattern{1}, Convention::Long);
    const auto rep = run_census(SequenceKind::AllLowestTerms, 5, loose);
    CHECK(rep.total == 9);
    CHECK(rep.abnormal == 0);
    CHECK_THROWS(run_census(SequenceKind::AllLowestTerms, 2, loose));
    CHECK_THROWS_AS(run_census(SequenceKind::AllLowestTerms, kMaxCensusDenominator + 1, loose), ResourceError);

    for (SequenceKind kind : kAllKinds) {
        for (Convention conv : {Convention::Short, Convention::Long}) {
            const auto p = NormalityParams::make(0.25, Pattern{1}, conv);
            const double mu = gauss_measure(p.s);
            std::uint64_t total = 0, abnormal = 0;
            Enumerator en(kind);
            en.for_each(200, [&](Entry e) {
                ++total;
                const std::uint64_t gcd = std::gcd(e.num, e.den);
                if (!normal_oracle(e.num / gcd, e.den / gcd, 0.25, {1}, conv, mu)) ++abnormal;
            });
            const auto r = run_census(kind, 200, p);
            CHECK(r.total == total);
            CHECK(r.total == count_R(kind, 200));
            CHECK(r.abnormal == abnormal);
        }
    }
}

TEST_CASE("census merge and threads") {
    const auto p = NormalityParams::make(0.25, Pattern{1});
    const auto whole = run_census(SequenceKind::AllLowestTerms, 400, p);
    auto lo = run_census_range(SequenceKind::AllLowestTerms, 2, 200, p);
    const auto hi = run_census_range(SequenceKind::AllLowestTerms, 201, 400, p);
    lo.merge(hi);
    CHECK(lo.total == whole.total);
    CHECK(lo.abnormal == whole.abnormal);
    CHECK(lo.m == 400);
    CHECK(lo.den_lo == 2);
    CHECK_THROWS(lo.merge(hi));  // overlapping range
    const auto threaded = run_census(SequenceKind::AllLowestTerms, 400, p, 4);
    CHECK(threaded.total == whole.total);
    CHECK(threaded.abnormal == whole.abnormal);
    CHECK(whole.abnormal <= whole.total);
}

TEST_CASE("normal rationals have lengths inside the growth window") {
    const auto p = NormalityParams::make(0.25, Pattern{1});
    const std::uint64_t m = 2000;
    const double lo_q = std::sqrt(static_cast<double>(m));
    std::size_t bad = 0;
    for (std::uint64_t q = static_cast<std::uint64_t>(std::ceil(lo_q)); q <= m; ++q) {
        for (std::uint64_t n = 1; n < q; ++n) {
            if (std::gcd(n, q) != 1) continue;
            const auto v = is_eps_s_normal(R(static_cast<Int>(n), static_cast<Int>(q)), p);
            if (!v.normal) continue;
            const double lq = std::log(static_cast<double>(q));
            const double L = static_cast<double>(v.length);
            if (!(L > lq / (g + p.epsilon) && L < lq / (g - p.epsilon))) ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("E and F set membership") {
    // s repeated: frequency ~ 1/k, far above mu for s = [1].
    const DigitString ones(1000, 1);
    CHECK(in_E_set(ones, 0.5, Pattern{1}, 1000));
    CHECK_THROWS_AS(in_E_set(DigitString(10, 1), 0.5, Pattern{1, 1}, 10), InsufficientDigits);
    // A_s = N exactly and eps = (1 - mu)/mu: equality is not exceeding.
    const double mu1 = gauss_measure(Pattern{1});
    CHECK_FALSE(in_E_set(DigitString(10, 1), (1 - mu1) / mu1 * (1 + 1e-12), Pattern{1}, 10));
    CHECK(in_E_set(DigitString(10, 1), (1 - mu1) / mu1 * (1 - 1e-12), Pattern{1}, 10));

    CHECK(in_F_set(DigitString(50, 1), 0.5, 50));
    CHECK_FALSE(in_F_set(DigitString(50, 3), 0.05, 50));
    CHECK_THROWS_AS(in_F_set(DigitString(49, 3), 0.05, 50), InsufficientDigits);
    const double three = std::log((3 + std::sqrt(13.0)) / 2);
    CHECK(std::fabs(three - g) < 0.01);
}

TEST_CASE("E and F are antitone in epsilon") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 300; ++i) {
        const auto d = oracle::random_digits(rng, 60, std::uniform_int_distribution<std::uint64_t>(1, 6)(rng));
        bool e_prev = true, f_prev = true;
        for (double eps = 0.01; eps < 3.0; eps += 0.07) {
            const bool e = in_E_set(d, eps, Pattern{1}, 50);
            const bool f = in_F_set(d, eps, 50);
            CHECK((!e || e_prev));
            CHECK((!f || f_prev));
            e_prev = e;
            f_prev = f;
        }
    }
}

TEST_CASE("Monte Carlo estimates") {
    const auto first_one = estimate_measure([](std::span<const Digit> d) { return !d.empty() && d[0] == 1; }, 1,
                                            1'000'000, 42);
    CHECK(std::fabs(first_one.estimate - 0.41504) < 3 * first_one.stderr_ + 1e-12);
    const auto always = estimate_measure([](std::span<const Digit>) { return true; }, 3, 5000, 1);
    CHECK(always.estimate == 1.0);
    const auto pair = estimate_measure(
        [](std::span<const Digit> d) { return d.size() >= 2 && d[0] == 1 && d[1] == 2; }, 2, 1'000'000, 43);
    CHECK(std::fabs(pair.estimate - std::log2(21.0 / 20.0)) < 3 * pair.stderr_);
    CHECK_THROWS(estimate_measure([](std::span<const Digit>) { return true; }, 41, 5000, 1));
    CHECK_THROWS(estimate_measure([](std::span<const Digit>) { return true; }, 3, 999, 1));

    // Determinism across runs and thread counts.
    auto pred = [](std::span<const Digit> d) { return d.size() >= 3 && d[2] <= 2; };
    const auto a = estimate_measure(pred, 3, 50'000, 9, 1);
    const auto b = estimate_measure(pred, 3, 50'000, 9, 3);
    CHECK(a.estimate == b.estimate);
    CHECK(a.stderr_ == b.stderr_);
    const auto deep_a = estimate_measure_deep(pred, 60, 20'000, 9, 1);
    const auto deep_b = estimate_measure_deep(pred, 60, 20'000, 9, 2);
    CHECK(deep_a.estimate == deep_b.estimate);
    const double mu = gauss_measure(Pattern{1}) + gauss_measure(Pattern{2});
    CHECK(std::fabs(deep_a.estimate - mu) < 4 * deep_a.stderr_);
}

}
