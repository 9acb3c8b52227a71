#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfnormal/cf_core.hpp"

namespace cfn {

/// A nonempty string s = [d_1, ..., d_k] of positive digits.
class Pattern {
public:
    explicit Pattern(DigitString digits);
    Pattern(std::initializer_list<Digit> digits) : Pattern(DigitString(digits)) {}

    // "1,2,3" (also accepts spaces or dots as separators).
    static Pattern parse(std::string_view text);

    std::span<const Digit> digits() const { return digits_; }
    std::size_t size() const { return digits_.size(); }
    Digit operator[](std::size_t i) const { return digits_[i]; }
    Digit max_digit() const;
    std::string to_string() const;  // "1,2,3"

    friend bool operator==(const Pattern&, const Pattern&) = default;
    friend auto operator<=>(const Pattern&, const Pattern&) = default;

private:
    DigitString digits_;
};

/// Cylinder C_s as the interval between <d_1..d_k> and <d_1..d_k + 1>,
/// normalized so that lower < upper. The convergents are those of s.
struct CylinderGeometry {
    Fraction lower;
    Fraction upper;
    Int pn = 0;
    Int qn = 1;
    Int pn1 = 0;
    Int qn1 = 1;
};

CylinderGeometry cylinder_geometry(const Pattern& s);

// Gauss measure of C_s. Exact convergents feed a single log1p, so deep
// cylinders keep full relative precision.
double gauss_measure(const Pattern& s);
double gauss_measure(std::span<const Digit> s);

// Membership of a rational in C_s: its Long expansion begins with s. Each
// boundary rational lands in exactly one of two adjacent cylinders.
bool in_cylinder(const Pattern& s, const Rational& x);

// 1 / (q_n (q_n + q_{n-1})), exact. Throws OverflowError.
Fraction lebesgue_measure(const Pattern& s);

struct Constants {
    double g;      // pi^2 / (12 ln 2), log of the Khinchin-Levy constant
    double G;      // golden ratio
    double log2;   // ln 2
};

Constants constants();

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kKhinchinLevy = kPi * kPi / (12.0 * kLn2);
inline constexpr double kGolden = 1.61803398874989484820;

// Inverse CDF of the Gauss measure: 2^u - 1. Requires 0 < u < 1.
double sample_gauss(double u);

inline constexpr std::size_t kMaxDoubleDigitDepth = 40;

// First `depth` digits of x obtained by iterating the Gauss map in double
// precision. Stops early if the orbit hits 0. depth must be <= 40.
DigitString gauss_digits(double x, std::size_t depth);

/// Draws a Gauss-distributed digit sequence one digit at a time.
///
/// Given a prefix with convergents p_n/q_n, the tail t = T^n x of a
/// Gauss-distributed x has density proportional to
/// 1 / ((1 + rho t)(1 + sigma t)) with rho = q_{n-1}/q_n and
/// sigma = (p_{n-1}+q_{n-1})/(p_n+q_n). Each call inverts that conditional
/// CDF at u and emits floor(1/t), so sequences of any depth are exact up to
/// double rounding of rho and sigma. The gap sigma - rho decays like q_n^-2
/// and is tracked by its own recurrence.
class GaussDigitSampler {
public:
    // u must lie in (0, 1].
    Digit next(double u);

    double log_q() const;   // ln q_n of the digits drawn so far
    std::size_t count() const { return count_; }
    void reset() { *this = GaussDigitSampler{}; }

private:
    double rho_ = 0.0;
    double sigma_ = 1.0;
    double gap_ = 1.0;  // sigma - rho
    double log_q_ = 0.0;
    double product_ = 1.0;
    std::size_t count_ = 0;
};

} // namespace cfn
