#include "cfnormal/census.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "cfnormal/integer.hpp"
#include "cfnormal/stream_stats.hpp"

namespace cfn {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers pulling from a shared
// counter. fn must only touch state owned by index i or by its worker slot.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(n, 1024))));
    std::atomic<std::uint64_t> next{0};
    auto worker = [&](unsigned slot) {
        for (std::uint64_t i = next++; i < n; i = next++) fn(i, slot);
    };
    if (threads == 1) {
        worker(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on (0, 1), never 0 or 1.
double open_unit(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53; }

bool matches_at(std::span<const Digit> digits, std::size_t i, std::span<const Digit> s) {
    return std::equal(s.begin(), s.end(), digits.begin() + static_cast<std::ptrdiff_t>(i));
}

} // namespace

unsigned default_threads() {
    if (const char* env = std::getenv("CFNORMAL_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

NormalityParams NormalityParams::make(double epsilon, Pattern s, Convention conv) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    return NormalityParams{epsilon, std::move(s), conv};
}

std::size_t digit_length(const Rational& r, Convention conv) { return expand(r, conv).size(); }

std::uint64_t count_inside(std::span<const Digit> digits, std::span<const Digit> s) {
    if (s.empty() || s.size() > digits.size()) return 0;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i + s.size() <= digits.size(); ++i) {
        if (matches_at(digits, i, s)) ++count;
    }
    return count;
}

NormalityVerdict is_eps_s_normal(std::span<const Digit> digits, std::uint64_t q, const NormalityParams& p, double mu) {
    NormalityVerdict v;
    v.length = digits.size();
    v.count = count_inside(digits, p.s.digits());
    v.mu = mu;
    v.frequency = static_cast<double>(v.count) / static_cast<double>(v.length);
    v.frequency_gap = std::fabs(v.frequency - mu);
    v.growth = std::log(static_cast<double>(q)) / static_cast<double>(v.length);
    v.growth_gap = std::fabs(v.growth - kKhinchinLevy);
    v.frequency_ok = v.frequency_gap < p.epsilon;
    v.growth_ok = v.growth_gap < p.epsilon;
    v.normal = v.frequency_ok && v.growth_ok;
    return v;
}

NormalityVerdict is_eps_s_normal(const Rational& r, const NormalityParams& p) {
    const auto e = expand(r, p.convention);
    if (r.den() > static_cast<Int>(~std::uint64_t{0})) throw std::out_of_range("denominator exceeds 64 bits");
    return is_eps_s_normal(e.digits(), static_cast<std::uint64_t>(r.den()), p, gauss_measure(p.s));
}

std::uint64_t n_delta(std::uint64_t m, double delta) {
    if (m < 3) throw std::invalid_argument("n_delta requires m >= 3");
    if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw std::invalid_argument("n_delta requires 0 < delta < 1/3");
    const double v = (1.0 - 2.0 * delta) * std::log(static_cast<double>(m)) / kKhinchinLevy;
    return static_cast<std::uint64_t>(std::floor(v));
}

GammaParams GammaParams::make(std::uint64_t m, double delta, double eta, Pattern s) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    GammaParams gp{m, delta, eta, std::move(s), n_delta(m, delta)};
    if (gp.n < 1) throw std::invalid_argument("m too small: n_delta(m, delta) = 0");
    return gp;
}

PrefixStatistics prefix_statistics(std::span<const Digit> prefix, std::span<const Digit> s) {
    PrefixStatistics st;
    double ratio = 0.0;  // q_{i-1} / q_i
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const double a = static_cast<double>(prefix[i]);
        st.log_qn1 = st.log_qn;
        st.log_qn += std::log(a + ratio);
        ratio = 1.0 / (a + ratio);
    }
    st.windows = count_inside(prefix, s);
    return st;
}

bool in_gamma(const Rational& r, const GammaParams& gp, Convention conv) {
    if (r.den() > static_cast<Int>(gp.m)) return false;
    const auto e = expand(r, conv);
    if (e.size() < gp.n) return true;
    const auto prefix = e.digits().first(gp.n);
    const auto st = prefix_statistics(prefix, gp.s.digits());
    const double n = static_cast<double>(gp.n);
    if (std::fabs(st.log_qn / n - kKhinchinLevy) > gp.delta) return true;
    return std::fabs(static_cast<double>(st.windows) / n - gauss_measure(gp.s)) > gp.eta;
}

bool gamma_prime_contains(std::span<const Digit> prefix, const GammaParams& gp) {
    if (prefix.size() != gp.n) throw std::invalid_argument("prefix length must equal n_delta");
    if (gp.n < 2) throw std::invalid_argument("gamma_prime_contains requires n >= 2");
    const auto st = prefix_statistics(prefix, gp.s.digits());
    const double n = static_cast<double>(gp.n);
    return std::fabs(st.log_qn / n - kKhinchinLevy) <= gp.delta &&
           std::fabs(st.log_qn1 / (n - 1.0) - kKhinchinLevy) <= gp.delta / 12.0 &&
           std::fabs(static_cast<double>(st.windows) / n - gauss_measure(gp.s)) <= gp.eta;
}

QBounds gamma_prime_q_bounds(const GammaParams& gp) {
    const double lm = std::log(static_cast<double>(gp.m));
    const double g = kKhinchinLevy;
    const double d = gp.delta;
    return QBounds{std::exp(lm * (1 - 2 * d) * (1 - d / (12 * g)) - 2 * g), std::exp(lm * (1 - 2 * d) * (1 + d / g))};
}

double CensusReport::normalized() const {
    const double mm = static_cast<double>(m);
    return static_cast<double>(abnormal) * std::log(mm) / (mm * mm);
}

CensusReport& CensusReport::merge(const CensusReport& other) {
    if (other.kind != kind || other.params.epsilon != params.epsilon || !(other.params.s == params.s) ||
        other.params.convention != params.convention) {
        throw std::invalid_argument("cannot merge censuses with different parameters");
    }
    if (!(other.den_lo > m || other.m < den_lo)) throw std::invalid_argument("census ranges overlap");
    den_lo = std::min(den_lo, other.den_lo);
    m = std::max(m, other.m);
    total += other.total;
    abnormal += other.abnormal;
    wall_seconds += other.wall_seconds;
    return *this;
}

CensusReport run_census_range(SequenceKind kind, std::uint64_t den_lo, std::uint64_t den_hi,
                              const NormalityParams& p, unsigned threads) {
    if (den_lo < 2 || den_hi < den_lo) throw std::invalid_argument("census range must satisfy 2 <= lo <= hi");
    if (den_hi > kMaxCensusDenominator) {
        throw ResourceError("census denominator bound " + std::to_string(den_hi) + " exceeds " +
                            std::to_string(kMaxCensusDenominator));
    }
    const auto start = std::chrono::steady_clock::now();
    const double mu = gauss_measure(p.s);
    threads = std::max(1u, threads);

    struct Slot {
        std::unique_ptr<Enumerator> en;
        std::uint64_t total = 0;
        std::uint64_t abnormal = 0;
        DigitString buf;
    };
    std::vector<Slot> slots(threads);
    // Largest denominators first: they carry the most members.
    const std::uint64_t span = den_hi - den_lo + 1;
    parallel_for(span, threads, [&](std::uint64_t i, unsigned slot) {
        Slot& sl = slots[slot];
        if (!sl.en) sl.en = std::make_unique<Enumerator>(kind);
        const std::uint64_t q = den_hi - i;
        for (std::uint64_t num : sl.en->numerators(q)) {
            const std::uint64_t g = std::gcd(num, q);
            sl.buf.clear();
            append_expansion(num / g, q / g, p.convention, sl.buf);
            ++sl.total;
            if (!is_eps_s_normal(sl.buf, q / g, p, mu).normal) ++sl.abnormal;
        }
    });

    CensusReport rep;
    rep.kind = kind;
    rep.den_lo = den_lo;
    rep.m = den_hi;
    rep.params = p;
    for (const auto& sl : slots) {
        rep.total += sl.total;
        rep.abnormal += sl.abnormal;
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

CensusReport run_census(SequenceKind kind, std::uint64_t m, const NormalityParams& p, unsigned threads) {
    if (m < 3) throw std::invalid_argument("run_census requires m >= 3");
    return run_census_range(kind, 2, m, p, threads);
}

bool in_E_set(std::span<const Digit> digits, double epsilon, const Pattern& s, std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const std::uint64_t needed = N + s.size() - 1;
    if (digits.size() < needed) {
        throw InsufficientDigits("E-set membership needs " + std::to_string(needed) + " digits");
    }
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < N; ++i) {
        if (matches_at(digits, i, s.digits())) ++count;
    }
    const double mu = gauss_measure(s);
    const double expected = mu * static_cast<double>(N);
    return std::fabs(static_cast<double>(count) - expected) > epsilon * expected;
}

bool in_F_set(std::span<const Digit> digits, double epsilon, std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (digits.size() < N) throw InsufficientDigits("F-set membership needs " + std::to_string(N) + " digits");
    const auto prefix = digits.first(N);
    double log_q = 0.0, ratio = 0.0;
    for (Digit d : prefix) {
        const double a = static_cast<double>(d);
        log_q += std::log(a + ratio);
        ratio = 1.0 / (a + ratio);
    }
    const double n = static_cast<double>(N);
    double gap = std::fabs(log_q / n - kKhinchinLevy);
    // Near the threshold, settle the strict inequality from the exact q_N.
    if (std::fabs(gap - epsilon) < 1e-9) gap = std::fabs(log_continuant_exact(prefix) / n - kKhinchinLevy);
    return gap > epsilon;
}

MeasureEstimate& MeasureEstimate::merge(const MeasureEstimate& other) {
    samples += other.samples;
    sum += other.sum;
    sum_sq += other.sum_sq;
    finish();
    return *this;
}

void MeasureEstimate::finish() {
    if (samples == 0) {
        estimate = stderr_ = 0.0;
        return;
    }
    const double n = static_cast<double>(samples);
    estimate = sum / n;
    const double var = std::max(0.0, sum_sq / n - estimate * estimate);
    stderr_ = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
}

namespace {

// Per-block sums, combined in block order so the result does not depend on
// scheduling.
template <class Body>
std::vector<MeasureEstimate> run_blocks(std::size_t width, std::uint64_t samples, std::uint64_t seed,
                                        unsigned threads, Body&& body) {
    if (samples < 1000) throw std::invalid_argument("Monte Carlo needs at least 1000 samples");
    const std::uint64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<std::vector<MeasureEstimate>> per_block(blocks, std::vector<MeasureEstimate>(width));
    parallel_for(blocks, std::max(1u, threads), [&](std::uint64_t b, unsigned) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
        const std::uint64_t begin = b * kMonteCarloBlock;
        const std::uint64_t end = std::min(samples, begin + kMonteCarloBlock);
        std::vector<double> values(width);
        auto& acc = per_block[b];
        for (std::uint64_t i = begin; i < end; ++i) {
            std::fill(values.begin(), values.end(), 0.0);
            body(rng, std::span<double>(values));
            for (std::size_t w = 0; w < width; ++w) {
                acc[w].sum += values[w];
                acc[w].sum_sq += values[w] * values[w];
                ++acc[w].samples;
            }
        }
    });
    std::vector<MeasureEstimate> out(width);
    for (const auto& block : per_block) {
        for (std::size_t w = 0; w < width; ++w) out[w].merge(block[w]);
    }
    return out;
}

} // namespace

MeasureEstimate estimate_measure(const PrefixPredicate& pred, std::size_t depth, std::uint64_t samples,
                                 std::uint64_t seed, unsigned threads) {
    if (depth > kMaxDoubleDigitDepth) {
        throw std::invalid_argument("prefix depth exceeds the 40-digit double-precision limit");
    }
    return run_blocks(1, samples, seed, threads, [&](std::mt19937_64& rng, std::span<double> out) {
        const double x = sample_gauss(open_unit(rng));
        const auto digits = gauss_digits(x, depth);
        out[0] = pred(digits) ? 1.0 : 0.0;
    }).front();
}

std::vector<MeasureEstimate> sample_statistics(const PrefixStatistic& stat, std::size_t width, std::size_t depth,
                                               std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    if (width < 1) throw std::invalid_argument("statistic width must be >= 1");
    return run_blocks(width, samples, seed, threads, [&](std::mt19937_64& rng, std::span<double> out) {
        thread_local DigitString digits;
        digits.resize(depth);
        GaussDigitSampler sampler;
        for (std::size_t i = 0; i < depth; ++i) digits[i] = sampler.next(open_unit(rng));
        stat(digits, out);
    });
}

MeasureEstimate estimate_measure_deep(const PrefixPredicate& pred, std::size_t depth, std::uint64_t samples,
                                      std::uint64_t seed, unsigned threads) {
    return sample_statistics([&](std::span<const Digit> d, std::span<double> out) { out[0] = pred(d) ? 1.0 : 0.0; },
                             1, depth, samples, seed, threads)
        .front();
}

} // namespace cfn
