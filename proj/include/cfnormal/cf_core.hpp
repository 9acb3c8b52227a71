#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfnormal/integer.hpp"

namespace cfn {

using Digit = std::uint64_t;
using DigitString = std::vector<Digit>;

// The two finite expansions of a rational: Short ends in a digit >= 2,
// Long replaces that final a by (a-1, 1) and therefore always ends in 1.
enum class Convention { Short, Long };

inline constexpr Convention kDefaultConvention = Convention::Long;

std::string_view to_string(Convention conv);
Convention parse_convention(std::string_view text);

/// Exact nonnegative fraction in lowest terms. Unlike Rational it may sit on
/// the boundary of the unit interval, which cylinder endpoints need.
struct Fraction {
    Int num = 0;
    Int den = 1;

    static Fraction reduced(Int num, Int den);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
    friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b);
};

Fraction operator-(const Fraction& a, const Fraction& b);

/// A rational number strictly inside (0, 1), in lowest terms.
class Rational {
public:
    // Throws std::invalid_argument unless 0 < num < den and gcd(num, den) = 1.
    static Rational make(Int num, Int den);
    // Reduces first, then applies the same range check.
    static Rational reduced(Int num, Int den);
    // Parses "p/q" (must already be in lowest terms).
    static Rational parse(std::string_view text);

    Int num() const { return num_; }
    Int den() const { return den_; }
    Fraction fraction() const { return Fraction{num_, den_}; }
    double to_double() const { return fraction().to_double(); }
    std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    Rational(Int num, Int den) : num_(num), den_(den) {}

    Int num_;
    Int den_;
};

/// Finite continued fraction digits a_1..a_L of a Rational, tagged with the
/// convention that produced them. Never empty.
class CFExpansion {
public:
    // Validates digits >= 1, nonempty, and the convention's tail rule.
    CFExpansion(DigitString digits, Convention conv);

    std::span<const Digit> digits() const { return digits_; }
    Convention convention() const { return conv_; }
    std::size_t size() const { return digits_.size(); }
    Digit operator[](std::size_t i) const { return digits_[i]; }

    friend bool operator==(const CFExpansion&, const CFExpansion&) = default;

private:
    DigitString digits_;
    Convention conv_;
};

/// p_k / q_k, the value of the first k digits. index = k >= 1.
struct Convergent {
    Int p = 0;
    Int q = 1;
    std::size_t index = 0;

    friend bool operator==(const Convergent&, const Convergent&) = default;
};

CFExpansion expand(Rational r, Convention conv = kDefaultConvention);

Rational evaluate(const CFExpansion& e);

// Value of an arbitrary nonempty digit string with digits >= 1. Lies in
// (0, 1]; the string [1] evaluates to 1. Throws OverflowError.
Fraction evaluate_digits(std::span<const Digit> digits);

std::vector<Convergent> convergents(std::span<const Digit> digits);
std::vector<Convergent> convergents(const CFExpansion& e);

// The rational whose expansion is digits(r) followed by digits(rprime),
// computed by the closed form (u p_n + v p_{n-1}) / (u q_n + v q_{n-1}).
Rational concat_rationals(Rational r, Rational rprime, Convention conv = kDefaultConvention);

// Drops the first digit. Returns nullopt when the Gauss map sends the number
// to 0: a length-1 expansion, or a Long expansion ending <a, 1>.
std::optional<CFExpansion> gauss_shift(const CFExpansion& e);

// Tx = 1/x - floor(1/x), T0 = 0. Requires 0 <= x < 1.
double gauss_map(double x);

DigitString mirror(std::span<const Digit> digits);

// Appends the expansion of num/den (0 < num < den, any common factor) to out.
// Fast 64-bit path used by the digit streams.
void append_expansion(std::uint64_t num, std::uint64_t den, Convention conv, DigitString& out);

std::string digits_to_string(std::span<const Digit> digits, char sep = ' ');

} // namespace cfn
