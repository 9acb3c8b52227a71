#include "cfnormal/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfnormal/integer.hpp"

namespace cfn {

ArithTables::ArithTables(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("sieve limit must be >= 2");
    if (limit > kMaxSieveLimit) {
        throw ResourceError("sieve limit " + std::to_string(limit) + " exceeds " + std::to_string(kMaxSieveLimit));
    }
    const std::size_t n = static_cast<std::size_t>(limit) + 1;
    flags_.assign(n, 0);
    phi_.assign(n, 0);
    mobius_.assign(n, 0);
    divisors_.assign(n, 0);
    // Exponent of the least prime factor, needed to update divisor counts.
    std::vector<std::uint8_t> lpf_exp(n, 0);
    std::vector<bool> composite(n, false);

    phi_[1] = 1;
    mobius_[1] = 1;
    divisors_[1] = 1;
    flags_[1] = kSquarefree;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes_.push_back(static_cast<std::uint32_t>(i));
            flags_[i] = kPrime | kSquarefree;
            phi_[i] = static_cast<std::uint32_t>(i - 1);
            mobius_[i] = -1;
            divisors_[i] = 2;
            lpf_exp[i] = 1;
        }
        for (std::uint32_t p : primes_) {
            const std::uint64_t ip = i * p;
            if (ip > limit) break;
            composite[ip] = true;
            if (i % p == 0) {
                // p is the least prime factor of i: exponent grows by one.
                phi_[ip] = phi_[i] * p;
                mobius_[ip] = 0;
                lpf_exp[ip] = static_cast<std::uint8_t>(lpf_exp[i] + 1);
                divisors_[ip] = divisors_[i] / (lpf_exp[i] + 1u) * (lpf_exp[ip] + 1u);
                flags_[ip] = 0;
                break;
            }
            phi_[ip] = phi_[i] * (p - 1);
            mobius_[ip] = static_cast<std::int8_t>(-mobius_[i]);
            lpf_exp[ip] = 1;
            divisors_[ip] = divisors_[i] * 2;
            flags_[ip] = (flags_[i] & kSquarefree);
        }
    }
}

std::uint64_t ArithTables::prime_count(std::uint64_t n) const {
    if (n > limit_) throw std::out_of_range("prime_count beyond sieve limit");
    return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

std::uint64_t phi_summatory(const ArithTables& tables, std::uint64_t m) {
    if (m > tables.limit()) throw std::out_of_range("phi_summatory beyond sieve limit");
    std::uint64_t total = 0;
    for (std::uint64_t n = 1; n <= m; ++n) total += tables.phi(n);
    return total;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::uint64_t coprime_count(std::uint64_t x, std::span<const std::uint64_t> factors) {
    // Sum over subsets of the distinct primes: mu(d) floor(x / d).
    std::int64_t total = 0;
    const std::size_t k = factors.size();
    auto recurse = [&](auto&& self, std::size_t i, std::uint64_t d, int sign) -> void {
        if (i == k) {
            total += sign * static_cast<std::int64_t>(x / d);
            return;
        }
        self(self, i + 1, d, sign);
        if (d <= x / factors[i]) self(self, i + 1, d * factors[i], -sign);
    };
    recurse(recurse, 0, 1, 1);
    return static_cast<std::uint64_t>(total);
}

std::uint64_t coprime_count(std::uint64_t x, std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("coprime_count requires m >= 1");
    const auto factors = prime_factors(m);
    return coprime_count(x, factors);
}

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime(std::uint64_t n, std::uint64_t a, std::uint64_t d, int s) {
    a %= n;
    if (a == 0) return true;
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int r = 1; r < s; ++r) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

std::uint64_t linear_value(std::uint64_t l, std::uint64_t q, std::uint64_t a) {
    std::uint64_t v;
    if (__builtin_mul_overflow(l, q, &v) || __builtin_add_overflow(v, a, &v)) {
        throw OverflowError("l*q + a exceeds 64 bits");
    }
    return v;
}

struct PrimeTest {
    const ArithTables* tables = nullptr;
    bool operator()(std::uint64_t n) const {
        if (tables && n <= tables->limit()) return tables->is_prime(n);
        return is_prime_u64(n);
    }
};

void check_coprime(std::uint64_t a, std::uint64_t q, const char* what) {
    if (q == 0) throw std::invalid_argument(std::string(what) + ": modulus must be >= 1");
    if (std::gcd(a, q) != 1) throw std::invalid_argument(std::string(what) + ": requires gcd(a, q) = 1");
}

std::uint64_t linear_impl(std::uint64_t x, std::uint64_t q, std::uint64_t a, PrimeTest prime) {
    check_coprime(a, q, "pi_prime_linear");
    std::uint64_t count = 0;
    for (std::uint64_t l = 1; l <= x; ++l) {
        if (prime(linear_value(l, q, a))) ++count;
    }
    return count;
}

std::uint64_t joint_impl(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp, std::uint64_t ap,
                         PrimeTest prime) {
    check_coprime(a, q, "pi_prime_joint");
    check_coprime(ap, qp, "pi_prime_joint");
    const Int t = static_cast<Int>(a) * qp - static_cast<Int>(q) * ap;
    if (t == 0) throw std::invalid_argument("pi_prime_joint: requires a*qp - q*ap != 0");
    std::uint64_t count = 0;
    for (std::uint64_t l = 1; l <= x; ++l) {
        if (prime(linear_value(l, q, a)) && prime(linear_value(l, qp, ap))) ++count;
    }
    return count;
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % p == 0) return n == p;
    }
    if (n < 37 * 37) return true;
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Bases 2..17 are exact below 3.4e14; beyond that use the 7-base set
    // that is exact for every 64-bit n.
    static constexpr std::uint64_t kSmall[] = {2, 3, 5, 7, 11, 13, 17};
    static constexpr std::uint64_t kFull[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    if (n < 341'550'071'728'321ULL) {
        for (std::uint64_t a : kSmall) {
            if (!strong_probable_prime(n, a, d, s)) return false;
        }
        return true;
    }
    for (std::uint64_t a : kFull) {
        if (!strong_probable_prime(n, a, d, s)) return false;
    }
    return true;
}

std::uint64_t pi_prime_linear(std::uint64_t x, std::uint64_t q, std::uint64_t a) {
    return linear_impl(x, q, a, PrimeTest{});
}

std::uint64_t pi_prime_linear(std::uint64_t x, std::uint64_t q, std::uint64_t a, const ArithTables& tables) {
    return linear_impl(x, q, a, PrimeTest{&tables});
}

std::uint64_t pi_prime_joint(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp,
                             std::uint64_t ap) {
    return joint_impl(x, q, a, qp, ap, PrimeTest{});
}

std::uint64_t pi_prime_joint(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::uint64_t qp,
                             std::uint64_t ap, const ArithTables& tables) {
    return joint_impl(x, q, a, qp, ap, PrimeTest{&tables});
}

} // namespace cfn
