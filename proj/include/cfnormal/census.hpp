#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfnormal/cf_core.hpp"
#include "cfnormal/enumeration.hpp"
#include "cfnormal/measures.hpp"

namespace cfn {

struct NormalityParams {
    double epsilon = 0.25;
    Pattern s{1};
    Convention convention = kDefaultConvention;

    // Requires 0 < epsilon < 1.
    static NormalityParams make(double epsilon, Pattern s, Convention conv = kDefaultConvention);
};

std::size_t digit_length(const Rational& r, Convention conv = kDefaultConvention);

// Occurrences of s lying wholly inside digits.
std::uint64_t count_inside(std::span<const Digit> digits, std::span<const Digit> s);

struct NormalityVerdict {
    bool normal = false;
    bool frequency_ok = false;
    bool growth_ok = false;
    std::uint64_t count = 0;      // A_s(r)
    std::size_t length = 0;       // L(r)
    double frequency = 0.0;       // A_s(r) / L(r)
    double mu = 0.0;              // mu(C_s)
    double frequency_gap = 0.0;   // |A_s(r)/L(r) - mu(C_s)|
    double growth = 0.0;          // ln q / L(r)
    double growth_gap = 0.0;      // |ln q / L(r) - g|
};

// (eps, s)-normality of r with both left-hand sides as diagnostics.
NormalityVerdict is_eps_s_normal(const Rational& r, const NormalityParams& p);
// Same, for a precomputed expansion of a rational with denominator q.
NormalityVerdict is_eps_s_normal(std::span<const Digit> digits, std::uint64_t q, const NormalityParams& p, double mu);

// floor((1 - 2 delta) ln m / g). Requires m >= 3 and 0 < delta < 1/3.
std::uint64_t n_delta(std::uint64_t m, double delta);

struct GammaParams {
    std::uint64_t m = 3;
    double delta = 0.1;
    double eta = 0.1;
    Pattern s{1};
    std::uint64_t n = 0;

    // Validates the ranges and derives n; throws if n < 1.
    static GammaParams make(std::uint64_t m, double delta, double eta, Pattern s);
};

// Window statistics on the first n digits of a prefix.
struct PrefixStatistics {
    double log_qn = 0.0;         // ln q_n
    double log_qn1 = 0.0;        // ln q_{n-1}
    std::uint64_t windows = 0;   // #{0 <= i <= n-k : window i equals s}
};

PrefixStatistics prefix_statistics(std::span<const Digit> prefix, std::span<const Digit> s);

bool in_gamma(const Rational& r, const GammaParams& gp, Convention conv = kDefaultConvention);

// Cylinder-set membership for the union defining the complement-side set.
// prefix.size() must equal gp.n, and gp.n must be >= 2.
bool gamma_prime_contains(std::span<const Digit> prefix, const GammaParams& gp);

struct QBounds {
    double lower;  // bound for q_{n-1}
    double upper;  // bound for q_n
};

// m^{(1-2d)(1-d/12g)} e^{-2g} <= q_{n-1} and q_n <= m^{(1-2d)(1+d/g)}.
QBounds gamma_prime_q_bounds(const GammaParams& gp);

inline constexpr std::uint64_t kMaxCensusDenominator = 1u << 16;

struct CensusReport {
    SequenceKind kind = SequenceKind::AllLowestTerms;
    std::uint64_t den_lo = 2;
    std::uint64_t m = 2;  // den_hi
    NormalityParams params;
    std::uint64_t total = 0;
    std::uint64_t abnormal = 0;
    double wall_seconds = 0.0;

    double ratio() const { return total ? static_cast<double>(abnormal) / static_cast<double>(total) : 0.0; }
    // abnormal * ln m / m^2
    double normalized() const;

    // Combines reports over disjoint denominator ranges of the same census.
    CensusReport& merge(const CensusReport& other);
};

// Classifies every member with denominator in [den_lo, den_hi].
CensusReport run_census_range(SequenceKind kind, std::uint64_t den_lo, std::uint64_t den_hi,
                              const NormalityParams& p, unsigned threads = 1);
// Requires 3 <= m <= kMaxCensusDenominator (ResourceError above).
CensusReport run_census(SequenceKind kind, std::uint64_t m, const NormalityParams& p, unsigned threads = 1);

// |A_s(N) - mu N| > eps mu N over the first N starts; needs N + k - 1 digits.
bool in_E_set(std::span<const Digit> digits, double epsilon, const Pattern& s, std::uint64_t N);
// |ln q_N / N - g| > eps; needs N digits.
bool in_F_set(std::span<const Digit> digits, double epsilon, std::uint64_t N);

struct MeasureEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    MeasureEstimate& merge(const MeasureEstimate& other);
    void finish();
};

using PrefixPredicate = std::function<bool(std::span<const Digit>)>;
using PrefixStatistic = std::function<void(std::span<const Digit>, std::span<double>)>;

inline constexpr std::uint64_t kMonteCarloBlock = 4096;

// Gauss-distributed points drawn by inverse CDF; digits extracted by the
// Gauss map in double precision. depth <= 40, samples >= 1000. Deterministic
// for a fixed seed regardless of thread count.
MeasureEstimate estimate_measure(const PrefixPredicate& pred, std::size_t depth, std::uint64_t samples,
                                 std::uint64_t seed, unsigned threads = 1);

// Any depth: digit sequences come from GaussDigitSampler. Computes `width`
// statistics per sample and returns their means.
std::vector<MeasureEstimate> sample_statistics(const PrefixStatistic& stat, std::size_t width, std::size_t depth,
                                               std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

MeasureEstimate estimate_measure_deep(const PrefixPredicate& pred, std::size_t depth, std::uint64_t samples,
                                      std::uint64_t seed, unsigned threads = 1);

unsigned default_threads();

} // namespace cfn
