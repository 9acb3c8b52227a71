#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfnormal/cf_core.hpp"
#include "cfnormal/enumeration.hpp"
#include "cfnormal/measures.hpp"

namespace cfn {

/// Concatenated expansions r_{f(1)}, r_{f(2)}, ... as a lazy digit source.
/// Kind streams are infinite; index-list streams end after the last index.
class DigitStream {
public:
    DigitStream(SequenceKind kind, Convention conv);
    // Indices are 1-based positions in the AllLowestTerms sequence.
    static DigitStream from_indices(std::vector<std::uint64_t> indices, Convention conv);

    std::optional<Digit> next_digit();
    // Fills out; returns fewer digits only when a finite stream runs dry.
    std::size_t read(std::span<Digit> out);

    std::uint64_t position() const { return position_; }
    // M: number of rationals whose expansion has started.
    std::uint64_t rationals_started() const { return started_; }
    Convention convention() const { return conv_; }
    std::optional<SequenceKind> kind() const { return kind_; }
    bool finite() const { return !kind_.has_value(); }
    std::string source_name() const;
    // "cfdigits v1 kind=<...> conv=<short|long>"
    std::string header() const;

private:
    DigitStream(Convention conv) : conv_(conv) {}
    bool load_next();

    Convention conv_;
    std::optional<SequenceKind> kind_;
    std::unique_ptr<RationalCursor> cursor_;
    std::vector<std::uint64_t> indices_;
    std::size_t next_index_ = 0;
    std::unique_ptr<Enumerator> index_map_;
    DigitString current_;
    std::size_t offset_ = 0;
    std::uint64_t position_ = 0;
    std::uint64_t started_ = 0;
};

/// Counts A_s(N; x) for a fixed set of patterns with one Aho-Corasick
/// automaton. Digits that appear in no pattern share a single "other"
/// symbol. Overlapping occurrences are all counted.
///
/// push() feeds the first N digits; every occurrence ending there starts at
/// or before N. push_tail() feeds read-ahead digits N+1..N+k-1 and counts
/// only occurrences that started at or before N.
class FrequencyTracker {
public:
    explicit FrequencyTracker(std::vector<Pattern> patterns);

    void push(Digit d);
    void push_tail(Digit d);

    std::uint64_t processed() const { return processed_; }
    std::size_t max_length() const { return max_length_; }
    const std::vector<Pattern>& patterns() const { return patterns_; }
    std::vector<std::uint64_t> counts() const;

private:
    std::uint32_t symbol(Digit d) const;

    std::vector<Pattern> patterns_;
    std::vector<Digit> alphabet_;             // sorted distinct pattern digits
    std::vector<std::uint32_t> small_symbol_; // direct lookup for small digits
    std::size_t width_ = 1;                   // alphabet size including "other"
    std::vector<std::uint32_t> delta_;        // state * width_ + symbol
    std::vector<std::uint32_t> fail_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::uint32_t> order_;        // BFS order
    std::vector<bool> terminal_;
    std::vector<std::uint32_t> pattern_node_;
    std::vector<std::uint64_t> visits_;
    std::vector<std::uint64_t> tail_hits_;
    std::uint32_t state_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t tail_pushed_ = 0;
    std::size_t max_length_ = 0;
};

// Exact A_s(N) for each pattern over a stream, reading max(k)-1 digits past
// N. Throws InsufficientDigits if a finite stream ends first.
std::vector<std::uint64_t> count_patterns(DigitStream& stream, const std::vector<Pattern>& patterns, std::uint64_t N);
// Same over a finite digit vector, which must hold N + max(k) - 1 digits.
std::vector<std::uint64_t> count_patterns(std::span<const Digit> digits, const std::vector<Pattern>& patterns,
                                          std::uint64_t N);

/// ln q_N of the concatenated number, via ln q_n = ln q_{n-1} + ln(a_n + r)
/// with r = q_{n-2}/q_{n-1}. Every `checkpoint_every` digits the window just
/// completed is recomputed with exact big integers to bound drift.
class GrowthTracker {
public:
    explicit GrowthTracker(std::uint64_t checkpoint_every = 10'000);

    void push(Digit a);

    double log_q() const { return log_q_; }
    std::uint64_t count() const { return n_; }
    double per_digit() const { return n_ ? log_q_ / static_cast<double>(n_) : 0.0; }
    double max_checkpoint_error() const { return max_error_; }
    std::size_t checkpoints() const { return checkpoints_; }

private:
    void checkpoint();

    std::uint64_t checkpoint_every_;
    double log_q_ = 0.0;
    double ratio_ = 0.0;
    std::uint64_t n_ = 0;
    DigitString window_;
    double window_log_ = 0.0;
    double window_ratio_ = 0.0;
    double max_error_ = 0.0;
    std::size_t checkpoints_ = 0;
};

// ln q_n for the digit string, from the exact big-integer continuant.
double log_continuant_exact(std::span<const Digit> digits);

struct StatsConfig {
    std::uint64_t checkpoint_every = 10'000;
    std::size_t buffer_digits = std::size_t{1} << 20;
    std::uint64_t max_patterns = 10'000;
};

struct PatternRow {
    Pattern pattern;
    std::uint64_t count = 0;
    std::uint64_t N = 0;
    double empirical = 0.0;
    double mu = 0.0;
    double deviation = 0.0;
};

struct GrowthSummary {
    double log_q = 0.0;
    std::uint64_t n = 0;
    double per_digit = 0.0;
    double g_ref = kKhinchinLevy;
    double checkpoint_max_rel_error = 0.0;
    std::size_t checkpoints = 0;
};

struct NormalityReport {
    std::string source;
    Convention convention = kDefaultConvention;
    std::uint64_t N = 0;
    Digit max_digit = 0;
    std::size_t max_len = 0;
    std::vector<PatternRow> rows;
    GrowthSummary growth;

    double max_deviation() const;
};

// Every pattern with digits <= max_digit and length <= max_len, shortest
// first. Throws ResourceError past cfg.max_patterns.
std::vector<Pattern> all_patterns(Digit max_digit, std::size_t max_len, std::uint64_t max_patterns = 10'000);

NormalityReport pattern_report(DigitStream& stream, std::vector<Pattern> patterns, std::uint64_t N,
                               const StatsConfig& cfg = {});

// Requires N >= 1000.
NormalityReport normality_report(SequenceKind kind, Convention conv, std::uint64_t N, Digit max_digit,
                                 std::size_t max_len, const StatsConfig& cfg = {});

/// Diagnostics for the growth hypotheses on L(r_{f(n)}) at one checkpoint.
struct HypothesisRow {
    std::uint64_t n = 0;              // rationals considered
    std::uint64_t length_sum = 0;     // sum of L over the first n rationals
    std::uint64_t max_length = 0;     // max of L over the first n rationals
    std::uint64_t digit_rational = 0; // M(n): rational holding digit n
    std::uint64_t max_length_to_m = 0;
    std::uint64_t den_at_m = 0;
    double n_over_sum = 0.0;
    double n_max_over_sum = 0.0;
    double m_over_n = 0.0;
};

// Rows at n = N, 2N, 4N.
std::vector<HypothesisRow> hypothesis_ratios(SequenceKind kind, Convention conv, std::uint64_t N);
// One row over the whole index list (indices into AllLowestTerms).
HypothesisRow hypothesis_ratios(std::span<const std::uint64_t> indices, Convention conv);

enum class DumpFormat { Text, Varint };

// LEB128 unsigned varint.
void write_varint(std::ostream& out, Digit d);
std::optional<Digit> read_varint(std::istream& in);

// Writes the next n digits of the stream. Text digits are separated by single
// spaces with no trailing newline; the optional header is its own line.
// Returns the number of digits written.
std::uint64_t dump_stream(DigitStream& stream, std::uint64_t n, std::ostream& out, DumpFormat format,
                          bool header);

} // namespace cfn
