#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cfn {

inline constexpr std::uint64_t kMaxSieveLimit = 100'000'000;

/// Euler totient, primality, squarefreeness, Moebius and divisor counts for
/// 0..limit, all from one linear sieve pass. Immutable once built.
class ArithTables {
public:
    // Requires 2 <= limit <= kMaxSieveLimit; larger limits throw ResourceError.
    explicit ArithTables(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }

    bool is_prime(std::uint64_t n) const { return (flags_[n] & kPrime) != 0; }
    bool is_squarefree(std::uint64_t n) const { return (flags_[n] & kSquarefree) != 0; }
    std::uint32_t phi(std::uint64_t n) const { return phi_[n]; }
    int mobius(std::uint64_t n) const { return mobius_[n]; }
    std::uint32_t divisor_count(std::uint64_t n) const { return divisors_[n]; }

    std::span<const std::uint32_t> primes() const { return primes_; }
    // Number of primes <= n, for n <= limit.
    std::uint64_t prime_count(std::uint64_t n) const;

private:
    static constexpr std::uint8_t kPrime = 1;
    static constexpr std::uint8_t kSquarefree = 2;

    std::uint64_t limit_;
    std::vector<std::uint8_t> flags_;
    std::vector<std::uint32_t> phi_;
    std::vector<std::int8_t> mobius_;
    std::vector<std::uint32_t> divisors_;
    std::vector<std::uint32_t> primes_;
};

// Sum of phi(n) for 1 <= n <= m; m must not exceed tables.limit().
std::uint64_t phi_summatory(const ArithTables& tables, std::uint64_t m);

// Distinct prime factors of n in ascending order (trial division).
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

// Number of 1 <= l <= x with gcd(l, m) = 1, by Moebius inversion over the
// squarefree divisors of m.
std::uint64_t coprime_count(std::uint64_t x, std::uint64_t m);
std::uint64_t coprime_count(std::uint64_t x, std::span<const std::uint64_t> prime_factors_of_m);

// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime_u64(std::uint64_t n);

// Number of 1 <= l <= x with l q + a prime. Requires gcd(a, q) = 1.
std::uint64_t pi_prime_linear(std::uint64_t x, std::uint64_t q, std::uint64_t a);
std::uint64_t pi_prime_linear(std::uint64_t x, std::uint64_t q, std::uint64_t a, const ArithTables& tables);

// Number of 1 <= l <= x with l q + a and l qp + ap both prime. Requires
// gcd(a, q) = gcd(ap, qp) = 1 and a qp - q ap != 0.
std::uint64_t pi_prime_joint(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp,
                             std::uint64_t ap);
std::uint64_t pi_prime_joint(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp,
                             std::uint64_t ap, const ArithTables& tables);

} // namespace cfn
