#include "cfnormal/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cfnormal/integer.hpp"

namespace cfn {

std::string_view to_string(SequenceKind kind) {
    switch (kind) {
    case SequenceKind::AllWithDuplicates: return "aks-dup";
    case SequenceKind::AllLowestTerms: return "all";
    case SequenceKind::SquarefreeBoth: return "squarefree";
    case SequenceKind::Type1: return "type1";
    case SequenceKind::Type2: return "type2";
    case SequenceKind::Type3: return "type3";
    }
    return "unknown";
}

SequenceKind parse_kind(std::string_view text) {
    if (text == "aks-dup" || text == "dup" || text == "all-dup") return SequenceKind::AllWithDuplicates;
    if (text == "all" || text == "lowest" || text == "aks") return SequenceKind::AllLowestTerms;
    if (text == "squarefree" || text == "sqf") return SequenceKind::SquarefreeBoth;
    if (text == "type1" || text == "nat-prime") return SequenceKind::Type1;
    if (text == "type2" || text == "prime-nat") return SequenceKind::Type2;
    if (text == "type3" || text == "prime-prime") return SequenceKind::Type3;
    throw std::invalid_argument("unknown sequence kind: " + std::string(text));
}

Entry Entry::from(const Rational& r) {
    if (r.den() > static_cast<Int>(~std::uint64_t{0})) throw std::out_of_range("rational exceeds 64-bit entry range");
    return Entry{static_cast<std::uint64_t>(r.num()), static_cast<std::uint64_t>(r.den())};
}

Enumerator::Enumerator(SequenceKind kind) : kind_(kind), cumulative_{0, 0} {}

const ArithTables& Enumerator::tables(std::uint64_t n) {
    if (!tables_ || tables_->limit() < n) {
        std::uint64_t limit = std::max<std::uint64_t>(1024, n);
        if (tables_) limit = std::max(limit, 2 * tables_->limit());
        limit = std::min(limit, std::max(n, kMaxSieveLimit));
        tables_ = std::make_unique<ArithTables>(limit);
    }
    return *tables_;
}

bool Enumerator::contains(Entry e) {
    if (e.num == 0 || e.num >= e.den) return false;
    if (kind_ == SequenceKind::AllWithDuplicates) return true;
    const auto& t = tables(e.den);
    if (std::gcd(e.num, e.den) != 1) return false;
    switch (kind_) {
    case SequenceKind::AllLowestTerms: return true;
    case SequenceKind::SquarefreeBoth: return t.is_squarefree(e.num) && t.is_squarefree(e.den);
    case SequenceKind::Type1: return t.is_prime(e.den);
    case SequenceKind::Type2: return t.is_prime(e.num);
    case SequenceKind::Type3: return t.is_prime(e.num) && t.is_prime(e.den);
    default: return false;
    }
}

std::uint64_t Enumerator::squarefree_coprime_count(std::uint64_t x, std::span<const std::uint64_t> factors) {
    // #{n <= x : n squarefree, gcd(n, q) = 1}
    //   = sum_{d <= sqrt x, gcd(d, q) = 1} mu(d) * #{k <= x / d^2 : gcd(k, q) = 1}
    if (x == 0) return 0;
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x))) + 1;
    const auto& t = tables(root);
    std::int64_t total = 0;
    for (std::uint64_t d = 1; d * d <= x; ++d) {
        const int mu = t.mobius(d);
        if (mu == 0) continue;
        bool coprime = true;
        for (std::uint64_t p : factors) {
            if (d % p == 0) {
                coprime = false;
                break;
            }
        }
        if (!coprime) continue;
        total += mu * static_cast<std::int64_t>(coprime_count(x / (d * d), factors));
    }
    return static_cast<std::uint64_t>(total);
}

std::uint64_t Enumerator::count_with_den(std::uint64_t q) {
    if (q < 2) return 0;
    switch (kind_) {
    case SequenceKind::AllWithDuplicates: return q - 1;
    case SequenceKind::AllLowestTerms: return tables(q).phi(q);
    case SequenceKind::SquarefreeBoth: {
        if (!tables(q).is_squarefree(q)) return 0;
        const auto factors = prime_factors(q);
        return squarefree_coprime_count(q - 1, factors);
    }
    case SequenceKind::Type1: return tables(q).is_prime(q) ? q - 1 : 0;
    case SequenceKind::Type2: {
        const auto& t = tables(q);
        // Primes below q, minus those dividing q (q itself is never below q).
        const std::uint64_t below = t.prime_count(q - 1);
        std::uint64_t dividing = 0;
        for (std::uint64_t p : prime_factors(q)) {
            if (p < q) ++dividing;
        }
        return below - dividing;
    }
    case SequenceKind::Type3: return tables(q).is_prime(q) ? tables(q).prime_count(q - 1) : 0;
    }
    return 0;
}

void Enumerator::ensure_den(std::uint64_t q) {
    if (cumulative_.size() > q) return;
    tables(q);
    cumulative_.reserve(q + 1);
    for (std::uint64_t d = cumulative_.size(); d <= q; ++d) {
        cumulative_.push_back(cumulative_.back() + count_with_den(d));
    }
}

std::uint64_t Enumerator::count(std::uint64_t m) {
    if (m < 2) return 0;
    ensure_den(m);
    return cumulative_[m];
}

std::vector<std::uint64_t> Enumerator::numerators(std::uint64_t q) {
    std::vector<std::uint64_t> out;
    if (q < 2) return out;
    const auto& t = tables(q);
    switch (kind_) {
    case SequenceKind::AllWithDuplicates:
        out.resize(q - 1);
        std::iota(out.begin(), out.end(), std::uint64_t{1});
        break;
    case SequenceKind::AllLowestTerms:
        out.reserve(t.phi(q));
        for (std::uint64_t p = 1; p < q; ++p) {
            if (std::gcd(p, q) == 1) out.push_back(p);
        }
        break;
    case SequenceKind::SquarefreeBoth:
        if (!t.is_squarefree(q)) break;
        for (std::uint64_t p = 1; p < q; ++p) {
            if (t.is_squarefree(p) && std::gcd(p, q) == 1) out.push_back(p);
        }
        break;
    case SequenceKind::Type1:
        if (!t.is_prime(q)) break;
        out.resize(q - 1);
        std::iota(out.begin(), out.end(), std::uint64_t{1});
        break;
    case SequenceKind::Type2:
        for (std::uint32_t p : t.primes()) {
            if (p >= q) break;
            if (q % p != 0) out.push_back(p);
        }
        break;
    case SequenceKind::Type3:
        if (!t.is_prime(q)) break;
        for (std::uint32_t p : t.primes()) {
            if (p >= q) break;
            out.push_back(p);
        }
        break;
    }
    return out;
}

std::uint64_t Enumerator::rank_within_den(Entry e) {
    const std::uint64_t p = e.num;
    const std::uint64_t q = e.den;
    switch (kind_) {
    case SequenceKind::AllWithDuplicates:
    case SequenceKind::Type1: return p;
    case SequenceKind::AllLowestTerms: return coprime_count(p, q);
    case SequenceKind::SquarefreeBoth: {
        const auto factors = prime_factors(q);
        return squarefree_coprime_count(p, factors);
    }
    case SequenceKind::Type2: {
        std::uint64_t rank = tables(q).prime_count(p);
        for (std::uint64_t f : prime_factors(q)) {
            if (f <= p) --rank;
        }
        return rank;
    }
    case SequenceKind::Type3: return tables(q).prime_count(p);
    }
    return 0;
}

std::uint64_t Enumerator::select_within_den(std::uint64_t q, std::uint64_t j) {
    switch (kind_) {
    case SequenceKind::AllWithDuplicates:
    case SequenceKind::Type1: return j;
    case SequenceKind::AllLowestTerms:
    case SequenceKind::SquarefreeBoth: {
        const auto factors = prime_factors(q);
        auto rank = [&](std::uint64_t x) {
            return kind_ == SequenceKind::AllLowestTerms ? coprime_count(x, factors)
                                                         : squarefree_coprime_count(x, factors);
        };
        // Smallest x with rank(x) >= j; rank is nondecreasing in x.
        std::uint64_t lo = 1, hi = q - 1;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (rank(mid) >= j) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }
    case SequenceKind::Type2: {
        const auto primes = tables(q).primes();
        std::size_t idx = j - 1;
        for (std::uint64_t f : prime_factors(q)) {
            if (f <= primes[idx]) ++idx;
        }
        return primes[idx];
    }
    case SequenceKind::Type3: return tables(q).primes()[j - 1];
    }
    return 0;
}

Entry Enumerator::at(std::uint64_t i) {
    if (i == 0) throw std::invalid_argument("sequence indices start at 1");
    while (cumulative_.back() < i) ensure_den(std::max<std::uint64_t>(16, 2 * (cumulative_.size() - 1)));
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), i);
    const auto q = static_cast<std::uint64_t>(it - cumulative_.begin());
    const std::uint64_t j = i - cumulative_[q - 1];
    return Entry{select_within_den(q, j), q};
}

std::uint64_t Enumerator::index_of(Entry e) {
    if (!contains(e)) throw NotMemberError(e.to_string() + " is not a member of sequence " + std::string(to_string(kind_)));
    ensure_den(e.den);
    return cumulative_[e.den - 1] + rank_within_den(e);
}

void Enumerator::for_each(std::uint64_t m, const std::function<void(Entry)>& fn) {
    for (std::uint64_t q = 2; q <= m; ++q) {
        for (std::uint64_t p : numerators(q)) fn(Entry{p, q});
    }
}

Entry rational_at(SequenceKind kind, std::uint64_t i) { return Enumerator(kind).at(i); }

std::uint64_t index_of(SequenceKind kind, Entry e) { return Enumerator(kind).index_of(e); }

std::uint64_t index_of(SequenceKind kind, const Rational& r) { return index_of(kind, Entry::from(r)); }

std::vector<Entry> enumerate_R(SequenceKind kind, std::uint64_t m) {
    std::vector<Entry> out;
    Enumerator(kind).for_each(m, [&](Entry e) { out.push_back(e); });
    return out;
}

std::uint64_t count_R(SequenceKind kind, std::uint64_t m) { return Enumerator(kind).count(m); }

RationalCursor::RationalCursor(SequenceKind kind) : enumerator_(kind) { load_next_den(); }

void RationalCursor::load_next_den() {
    pos_ = 0;
    do {
        ++den_;
        numerators_ = enumerator_.numerators(den_);
    } while (numerators_.empty());
}

void RationalCursor::advance() {
    ++index_;
    if (++pos_ == numerators_.size()) load_next_den();
}

} // namespace cfn
