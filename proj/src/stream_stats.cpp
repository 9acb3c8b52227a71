#include "cfnormal/stream_stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "cfnormal/integer.hpp"

namespace cfn {

// ---------------------------------------------------------------------------
// DigitStream

DigitStream::DigitStream(SequenceKind kind, Convention conv)
    : conv_(conv), kind_(kind), cursor_(std::make_unique<RationalCursor>(kind)) {}

DigitStream DigitStream::from_indices(std::vector<std::uint64_t> indices, Convention conv) {
    for (std::uint64_t i : indices) {
        if (i == 0) throw std::invalid_argument("sequence indices start at 1");
    }
    DigitStream s(conv);
    s.indices_ = std::move(indices);
    s.index_map_ = std::make_unique<Enumerator>(SequenceKind::AllLowestTerms);
    return s;
}

std::string DigitStream::source_name() const {
    return kind_ ? std::string(to_string(*kind_)) : std::string("indices");
}

std::string DigitStream::header() const {
    return "cfdigits v1 kind=" + source_name() + " conv=" + std::string(to_string(conv_));
}

bool DigitStream::load_next() {
    Entry e;
    if (cursor_) {
        if (started_ > 0) cursor_->advance();
        e = cursor_->current();
    } else {
        if (next_index_ == indices_.size()) return false;
        e = index_map_->at(indices_[next_index_++]);
    }
    // Duplicated pairs such as 2/4 contribute the digits of their reduced form.
    const std::uint64_t g = std::gcd(e.num, e.den);
    current_.clear();
    append_expansion(e.num / g, e.den / g, conv_, current_);
    offset_ = 0;
    ++started_;
    return true;
}

std::optional<Digit> DigitStream::next_digit() {
    if (offset_ == current_.size() && !load_next()) return std::nullopt;
    ++position_;
    return current_[offset_++];
}

std::size_t DigitStream::read(std::span<Digit> out) {
    std::size_t filled = 0;
    while (filled < out.size()) {
        if (offset_ == current_.size() && !load_next()) break;
        const std::size_t take = std::min(out.size() - filled, current_.size() - offset_);
        std::copy_n(current_.begin() + static_cast<std::ptrdiff_t>(offset_), take, out.begin() + filled);
        offset_ += take;
        filled += take;
    }
    position_ += filled;
    return filled;
}

// ---------------------------------------------------------------------------
// FrequencyTracker

FrequencyTracker::FrequencyTracker(std::vector<Pattern> patterns) : patterns_(std::move(patterns)) {
    if (patterns_.empty()) throw std::invalid_argument("pattern set must be nonempty");
    for (const auto& p : patterns_) {
        alphabet_.insert(alphabet_.end(), p.digits().begin(), p.digits().end());
        max_length_ = std::max(max_length_, p.size());
    }
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    width_ = alphabet_.size() + 1;
    small_symbol_.assign(256, 0);
    for (std::size_t i = 0; i < alphabet_.size() && alphabet_[i] < 256; ++i) {
        small_symbol_[alphabet_[i]] = static_cast<std::uint32_t>(i + 1);
    }

    constexpr std::uint32_t kNone = ~std::uint32_t{0};
    auto new_state = [&](std::uint32_t depth) {
        delta_.resize(delta_.size() + width_, kNone);
        fail_.push_back(0);
        depth_.push_back(depth);
        terminal_.push_back(false);
        return static_cast<std::uint32_t>(depth_.size() - 1);
    };
    new_state(0);
    for (const auto& p : patterns_) {
        std::uint32_t s = 0;
        for (Digit d : p.digits()) {
            const std::size_t slot = s * width_ + symbol(d);
            if (delta_[slot] == kNone) {
                const std::uint32_t next = new_state(depth_[s] + 1);
                delta_[slot] = next;
            }
            s = delta_[slot];
        }
        terminal_[s] = true;
        pattern_node_.push_back(s);
    }

    // BFS: failure links, then fill missing edges from the failure state,
    // which has smaller depth and is therefore already complete.
    order_.push_back(0);
    for (std::size_t head = 0; head < order_.size(); ++head) {
        const std::uint32_t s = order_[head];
        for (std::size_t c = 0; c < width_; ++c) {
            const std::uint32_t child = delta_[s * width_ + c];
            const std::uint32_t via_fail = s == 0 ? 0 : delta_[fail_[s] * width_ + c];
            if (child != kNone) {
                fail_[child] = via_fail;
                order_.push_back(child);
            } else {
                delta_[s * width_ + c] = via_fail;
            }
        }
    }
    visits_.assign(depth_.size(), 0);
    tail_hits_.assign(depth_.size(), 0);
}

std::uint32_t FrequencyTracker::symbol(Digit d) const {
    if (d < 256) return small_symbol_[d];
    const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), d);
    if (it != alphabet_.end() && *it == d) return static_cast<std::uint32_t>(it - alphabet_.begin() + 1);
    return 0;
}

void FrequencyTracker::push(Digit d) {
    if (tail_pushed_ != 0) throw std::logic_error("push after read-ahead started");
    state_ = delta_[state_ * width_ + symbol(d)];
    ++visits_[state_];
    ++processed_;
}

void FrequencyTracker::push_tail(Digit d) {
    state_ = delta_[state_ * width_ + symbol(d)];
    ++tail_pushed_;
    // A match of length k ending at N + tail_pushed_ started at or before N
    // iff k > tail_pushed_. Depth strictly decreases along failure links.
    for (std::uint32_t s = state_; s != 0 && depth_[s] > tail_pushed_; s = fail_[s]) {
        if (terminal_[s]) ++tail_hits_[s];
    }
}

std::vector<std::uint64_t> FrequencyTracker::counts() const {
    // Every visit to state u is an occurrence of each pattern whose node lies
    // on u's failure chain; accumulate bottom-up over the failure tree.
    std::vector<std::uint64_t> total(visits_);
    for (std::size_t i = order_.size(); i-- > 1;) {
        const std::uint32_t u = order_[i];
        total[fail_[u]] += total[u];
    }
    std::vector<std::uint64_t> out;
    out.reserve(patterns_.size());
    for (std::uint32_t node : pattern_node_) out.push_back(total[node] + tail_hits_[node]);
    return out;
}

std::vector<std::uint64_t> count_patterns(DigitStream& stream, const std::vector<Pattern>& patterns,
                                          std::uint64_t N) {
    FrequencyTracker tracker(patterns);
    const std::uint64_t needed = N + tracker.max_length() - 1;
    for (std::uint64_t i = 0; i < N; ++i) {
        const auto d = stream.next_digit();
        if (!d) throw InsufficientDigits("stream ended before N + k - 1 digits");
        tracker.push(*d);
    }
    for (std::uint64_t i = N; i < needed; ++i) {
        const auto d = stream.next_digit();
        if (!d) throw InsufficientDigits("stream ended before N + k - 1 digits");
        tracker.push_tail(*d);
    }
    return tracker.counts();
}

std::vector<std::uint64_t> count_patterns(std::span<const Digit> digits, const std::vector<Pattern>& patterns,
                                          std::uint64_t N) {
    FrequencyTracker tracker(patterns);
    const std::uint64_t needed = N + tracker.max_length() - 1;
    if (digits.size() < needed) {
        throw InsufficientDigits("A_s(N) needs " + std::to_string(needed) + " digits, have " +
                                 std::to_string(digits.size()));
    }
    for (std::uint64_t i = 0; i < N; ++i) tracker.push(digits[i]);
    for (std::uint64_t i = N; i < needed; ++i) tracker.push_tail(digits[i]);
    return tracker.counts();
}

// ---------------------------------------------------------------------------
// GrowthTracker

namespace {

double log_of(const boost::multiprecision::cpp_int& v) {
    const std::size_t bits = boost::multiprecision::msb(v);
    const std::size_t shift = bits > 60 ? bits - 60 : 0;
    const double top = static_cast<boost::multiprecision::cpp_int>(v >> shift).convert_to<double>();
    return std::log(top) + static_cast<double>(shift) * kLn2;
}

} // namespace

double log_continuant_exact(std::span<const Digit> digits) {
    using boost::multiprecision::cpp_int;
    cpp_int q_prev = 0;
    cpp_int q = 1;
    for (Digit a : digits) {
        cpp_int next = q * a + q_prev;
        q_prev = std::move(q);
        q = std::move(next);
    }
    return log_of(q);
}

GrowthTracker::GrowthTracker(std::uint64_t checkpoint_every) : checkpoint_every_(checkpoint_every) {
    if (checkpoint_every_) window_.reserve(checkpoint_every_);
}

void GrowthTracker::push(Digit a) {
    const double ad = static_cast<double>(a);
    log_q_ += std::log(ad + ratio_);
    ratio_ = 1.0 / (ad + ratio_);
    ++n_;
    if (checkpoint_every_) {
        window_.push_back(a);
        window_log_ += std::log(ad + window_ratio_);
        window_ratio_ = 1.0 / (ad + window_ratio_);
        if (window_.size() == checkpoint_every_) checkpoint();
    }
}

void GrowthTracker::checkpoint() {
    // The window restarts the recurrence from r = 0, so its log-domain sum is
    // exactly ln of the window's own continuant.
    const double exact = log_continuant_exact(window_);
    if (exact > 0) max_error_ = std::max(max_error_, std::fabs(window_log_ - exact) / exact);
    ++checkpoints_;
    window_.clear();
    window_log_ = 0.0;
    window_ratio_ = 0.0;
}

// ---------------------------------------------------------------------------
// Reports

double NormalityReport::max_deviation() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.deviation);
    return m;
}

std::vector<Pattern> all_patterns(Digit max_digit, std::size_t max_len, std::uint64_t max_patterns) {
    if (max_digit < 1 || max_len < 1) throw std::invalid_argument("max_digit and max_len must be >= 1");
    // Count first so oversized requests fail before allocating.
    std::uint64_t total = 0;
    std::uint64_t layer = 1;
    for (std::size_t k = 1; k <= max_len; ++k) {
        if (layer > max_patterns / max_digit + 1) throw ResourceError("pattern set exceeds configured bound");
        layer *= max_digit;
        total += layer;
        if (total > max_patterns) {
            throw ResourceError("pattern set of size > " + std::to_string(max_patterns) + " exceeds configured bound");
        }
    }
    std::vector<Pattern> out;
    out.reserve(total);
    DigitString cur;
    for (std::size_t k = 1; k <= max_len; ++k) {
        cur.assign(k, 1);
        while (true) {
            out.emplace_back(cur);
            std::size_t i = k;
            while (i > 0 && cur[i - 1] == max_digit) cur[--i] = 1;
            if (i == 0) break;
            ++cur[i - 1];
        }
    }
    return out;
}

NormalityReport pattern_report(DigitStream& stream, std::vector<Pattern> patterns, std::uint64_t N,
                               const StatsConfig& cfg) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (patterns.size() > cfg.max_patterns) throw ResourceError("pattern set exceeds configured bound");
    FrequencyTracker tracker(patterns);
    GrowthTracker growth(cfg.checkpoint_every);
    std::vector<Digit> buffer(std::max<std::size_t>(1, cfg.buffer_digits));
    std::uint64_t done = 0;
    while (done < N) {
        const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(buffer.size(), N - done));
        const std::size_t got = stream.read(std::span<Digit>(buffer.data(), want));
        for (std::size_t i = 0; i < got; ++i) {
            tracker.push(buffer[i]);
            growth.push(buffer[i]);
        }
        done += got;
        if (got < want) throw InsufficientDigits("stream ended before N digits");
    }
    for (std::size_t i = 1; i < tracker.max_length(); ++i) {
        const auto d = stream.next_digit();
        if (!d) throw InsufficientDigits("stream ended before N + k - 1 digits");
        tracker.push_tail(*d);
    }

    NormalityReport report;
    report.source = stream.source_name();
    report.convention = stream.convention();
    report.N = N;
    report.max_len = tracker.max_length();
    const auto counts = tracker.counts();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        PatternRow row{patterns[i], counts[i], N, 0, 0, 0};
        row.empirical = static_cast<double>(counts[i]) / static_cast<double>(N);
        row.mu = gauss_measure(patterns[i]);
        row.deviation = std::fabs(row.empirical - row.mu);
        report.max_digit = std::max(report.max_digit, patterns[i].max_digit());
        report.rows.push_back(std::move(row));
    }
    report.growth.log_q = growth.log_q();
    report.growth.n = growth.count();
    report.growth.per_digit = growth.per_digit();
    report.growth.checkpoint_max_rel_error = growth.max_checkpoint_error();
    report.growth.checkpoints = growth.checkpoints();
    return report;
}

NormalityReport normality_report(SequenceKind kind, Convention conv, std::uint64_t N, Digit max_digit,
                                 std::size_t max_len, const StatsConfig& cfg) {
    if (N < 1000) throw std::invalid_argument("normality_report requires N >= 1000");
    auto patterns = all_patterns(max_digit, max_len, cfg.max_patterns);
    DigitStream stream(kind, conv);
    NormalityReport report = pattern_report(stream, std::move(patterns), N, cfg);
    report.max_digit = max_digit;
    report.max_len = max_len;
    return report;
}

namespace {

// Walks rationals in order and snapshots the hypothesis diagnostics at the
// requested rational counts.
template <class NextEntry>
std::vector<HypothesisRow> scan_hypotheses(NextEntry&& next, Convention conv, std::vector<std::uint64_t> checkpoints) {
    std::vector<HypothesisRow> rows(checkpoints.size());
    std::size_t count_idx = 0;   // next checkpoint on rational count
    std::size_t digit_idx = 0;   // next checkpoint on digit position
    std::uint64_t sum = 0, max_len = 0, n = 0;
    DigitString buf;
    const std::uint64_t last = checkpoints.back();
    while (n < last && (count_idx < rows.size() || digit_idx < rows.size())) {
        const auto e = next();
        if (!e) break;
        buf.clear();
        const std::uint64_t g = std::gcd(e->num, e->den);
        append_expansion(e->num / g, e->den / g, conv, buf);
        ++n;
        sum += buf.size();
        max_len = std::max<std::uint64_t>(max_len, buf.size());
        while (digit_idx < rows.size() && sum >= checkpoints[digit_idx]) {
            rows[digit_idx].digit_rational = n;
            rows[digit_idx].max_length_to_m = max_len;
            rows[digit_idx].den_at_m = e->den;
            ++digit_idx;
        }
        while (count_idx < rows.size() && n == checkpoints[count_idx]) {
            rows[count_idx].n = n;
            rows[count_idx].length_sum = sum;
            rows[count_idx].max_length = max_len;
            ++count_idx;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        if (r.n == 0) {
            // Finite list shorter than the checkpoint: report what exists.
            r.n = n;
            r.length_sum = sum;
            r.max_length = max_len;
        }
        if (r.length_sum) {
            r.n_over_sum = static_cast<double>(r.n) / static_cast<double>(r.length_sum);
            r.n_max_over_sum = static_cast<double>(r.n) * static_cast<double>(r.max_length) /
                               static_cast<double>(r.length_sum);
        }
        if (r.n) r.m_over_n = static_cast<double>(r.digit_rational) / static_cast<double>(r.n);
    }
    return rows;
}

} // namespace

std::vector<HypothesisRow> hypothesis_ratios(SequenceKind kind, Convention conv, std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    RationalCursor cursor(kind);
    bool first = true;
    auto next = [&]() -> std::optional<Entry> {
        if (!first) cursor.advance();
        first = false;
        return cursor.current();
    };
    return scan_hypotheses(next, conv, {N, 2 * N, 4 * N});
}

HypothesisRow hypothesis_ratios(std::span<const std::uint64_t> indices, Convention conv) {
    if (indices.empty()) return HypothesisRow{};
    Enumerator map(SequenceKind::AllLowestTerms);
    std::size_t i = 0;
    auto next = [&]() -> std::optional<Entry> {
        if (i == indices.size()) return std::nullopt;
        if (indices[i] == 0) throw std::invalid_argument("sequence indices start at 1");
        return map.at(indices[i++]);
    };
    return scan_hypotheses(next, conv, {indices.size()}).front();
}

// ---------------------------------------------------------------------------
// Dump format

void write_varint(std::ostream& out, Digit d) {
    do {
        auto byte = static_cast<unsigned char>(d & 0x7f);
        d >>= 7;
        if (d) byte |= 0x80;
        out.put(static_cast<char>(byte));
    } while (d);
}

std::optional<Digit> read_varint(std::istream& in) {
    Digit value = 0;
    int shift = 0;
    while (true) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            if (shift == 0) return std::nullopt;
            throw std::runtime_error("truncated varint");
        }
        if (shift > 63) throw std::runtime_error("varint too long");
        value |= static_cast<Digit>(c & 0x7f) << shift;
        if ((c & 0x80) == 0) return value;
        shift += 7;
    }
}

std::uint64_t dump_stream(DigitStream& stream, std::uint64_t n, std::ostream& out, DumpFormat format,
                          bool header) {
    if (header) out << stream.header() << '\n';
    std::vector<Digit> buffer(std::size_t{1} << 16);
    std::uint64_t written = 0;
    std::string text;
    while (written < n) {
        const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(buffer.size(), n - written));
        const std::size_t got = stream.read(std::span<Digit>(buffer.data(), want));
        if (format == DumpFormat::Text) {
            text.clear();
            for (std::size_t i = 0; i < got; ++i) {
                if (written + i > 0) text.push_back(' ');
                text += std::to_string(buffer[i]);
            }
            out << text;
        } else {
            for (std::size_t i = 0; i < got; ++i) write_varint(out, buffer[i]);
        }
        written += got;
        if (got < want) break;
    }
    return written;
}

} // namespace cfn
