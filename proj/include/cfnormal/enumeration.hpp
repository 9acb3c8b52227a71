#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfnormal/arith.hpp"
#include "cfnormal/cf_core.hpp"

namespace cfn {

// Every kind is ordered by ascending denominator, then ascending numerator.
enum class SequenceKind {
    AllWithDuplicates,  // every p/q with 1 <= p < q, reduced or not
    AllLowestTerms,     // gcd(p, q) = 1
    SquarefreeBoth,     // lowest terms, p and q squarefree
    Type1,              // q prime, any p
    Type2,              // p prime, p does not divide q
    Type3,              // p and q prime
};

inline constexpr std::array<SequenceKind, 6> kAllKinds = {
    SequenceKind::AllWithDuplicates, SequenceKind::AllLowestTerms, SequenceKind::SquarefreeBoth,
    SequenceKind::Type1,             SequenceKind::Type2,          SequenceKind::Type3,
};

std::string_view to_string(SequenceKind kind);
// Accepts the canonical names plus aliases such as "prime-prime" for type3.
SequenceKind parse_kind(std::string_view text);

/// A raw numerator/denominator pair as it appears in a sequence.
/// AllWithDuplicates yields unreduced pairs such as 2/4.
struct Entry {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Entry from(const Rational& r);
    Rational reduced() const { return Rational::reduced(static_cast<Int>(num), static_cast<Int>(den)); }
    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Index <-> rational maps and R(m) counts for one sequence kind. Owns a
/// sieve that grows on demand, so it is single-owner mutable state.
class Enumerator {
public:
    explicit Enumerator(SequenceKind kind);

    SequenceKind kind() const { return kind_; }

    bool contains(Entry e);
    // Members with denominator exactly q, computed without enumeration.
    std::uint64_t count_with_den(std::uint64_t q);
    // |R(m)|: members with denominator <= m.
    std::uint64_t count(std::uint64_t m);

    // i-th member, i >= 1.
    Entry at(std::uint64_t i);
    // Inverse of at(); throws NotMemberError.
    std::uint64_t index_of(Entry e);

    // Numerators of the members with denominator q, ascending.
    std::vector<std::uint64_t> numerators(std::uint64_t q);

    void for_each(std::uint64_t m, const std::function<void(Entry)>& fn);

    // Tables covering at least n.
    const ArithTables& tables(std::uint64_t n);

private:
    void ensure_den(std::uint64_t q);
    std::uint64_t rank_within_den(Entry e);
    std::uint64_t select_within_den(std::uint64_t q, std::uint64_t j);
    std::uint64_t squarefree_coprime_count(std::uint64_t x, std::span<const std::uint64_t> factors);

    SequenceKind kind_;
    std::unique_ptr<ArithTables> tables_;
    std::vector<std::uint64_t> cumulative_;  // cumulative_[q] = count(q)
};

Entry rational_at(SequenceKind kind, std::uint64_t i);
std::uint64_t index_of(SequenceKind kind, Entry e);
std::uint64_t index_of(SequenceKind kind, const Rational& r);
std::vector<Entry> enumerate_R(SequenceKind kind, std::uint64_t m);
std::uint64_t count_R(SequenceKind kind, std::uint64_t m);

/// Walks one kind's sequence in order, starting at index 1.
class RationalCursor {
public:
    explicit RationalCursor(SequenceKind kind);

    SequenceKind kind() const { return enumerator_.kind(); }
    std::uint64_t index() const { return index_; }
    Entry current() const { return Entry{numerators_[pos_], den_}; }
    void advance();

private:
    void load_next_den();

    Enumerator enumerator_;
    std::uint64_t index_ = 1;
    std::uint64_t den_ = 1;
    std::vector<std::uint64_t> numerators_;
    std::size_t pos_ = 0;
};

} // namespace cfn
