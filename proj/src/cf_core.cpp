#include "cfnormal/cf_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfn {

std::string to_string(Int value) {
    if (value == 0) return "0";
    const bool negative = value < 0;
    // Work in the negative range so the minimum value needs no special case.
    std::string out;
    Int v = negative ? value : -value;
    while (v != 0) {
        out.push_back(static_cast<char>('0' - static_cast<int>(v % 10)));
        v /= 10;
    }
    if (negative) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

Int parse_int(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i == text.size()) throw std::invalid_argument("empty integer literal");
    Int v = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            throw std::invalid_argument("invalid integer literal: " + std::string(text));
        }
        try {
            v = checked_add(checked_mul(v, 10), c - '0');
        } catch (const OverflowError&) {
            throw std::invalid_argument("integer literal out of range: " + std::string(text));
        }
    }
    if (negative) v = -v;
    return v;
}

std::string_view to_string(Convention conv) {
    return conv == Convention::Short ? "short" : "long";
}

Convention parse_convention(std::string_view text) {
    if (text == "short") return Convention::Short;
    if (text == "long") return Convention::Long;
    throw std::invalid_argument("unknown convention: " + std::string(text));
}

Fraction Fraction::reduced(Int num, Int den) {
    if (den <= 0 || num < 0) throw std::invalid_argument("fraction must be nonnegative with positive denominator");
    const Int g = gcd(num, den);
    if (g == 0) return Fraction{0, 1};
    return Fraction{num / g, den / g};
}

std::string Fraction::to_string() const { return cfn::to_string(num) + "/" + cfn::to_string(den); }

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    const Int lhs = checked_mul(a.num, b.den);
    const Int rhs = checked_mul(b.num, a.den);
    return lhs <=> rhs;
}

Fraction operator-(const Fraction& a, const Fraction& b) {
    const Int num = checked_sub(checked_mul(a.num, b.den), checked_mul(b.num, a.den));
    const Int den = checked_mul(a.den, b.den);
    if (num < 0) throw std::domain_error("fraction difference is negative");
    return Fraction::reduced(num, den);
}

Rational Rational::make(Int num, Int den) {
    if (den <= 0) throw std::invalid_argument("rational denominator must be positive");
    if (num <= 0 || num >= den) {
        throw std::invalid_argument("rational " + cfn::to_string(num) + "/" + cfn::to_string(den) +
                                    " is outside the open interval (0,1)");
    }
    if (gcd(num, den) != 1) {
        throw std::invalid_argument("rational " + cfn::to_string(num) + "/" + cfn::to_string(den) +
                                    " is not in lowest terms");
    }
    return Rational(num, den);
}

Rational Rational::reduced(Int num, Int den) {
    if (den <= 0 || num <= 0) throw std::invalid_argument("rational must have positive parts");
    const Int g = gcd(num, den);
    return make(num / g, den / g);
}

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw std::invalid_argument("expected p/q, got " + std::string(text));
    return make(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Rational::to_string() const { return cfn::to_string(num_) + "/" + cfn::to_string(den_); }

CFExpansion::CFExpansion(DigitString digits, Convention conv) : digits_(std::move(digits)), conv_(conv) {
    if (digits_.empty()) throw std::invalid_argument("continued fraction expansion must be nonempty");
    for (Digit d : digits_) {
        if (d == 0) throw std::invalid_argument("continued fraction digits must be >= 1");
    }
    if (conv_ == Convention::Short && digits_.back() < 2) {
        throw std::invalid_argument("short expansion must end in a digit >= 2");
    }
    if (conv_ == Convention::Long && (digits_.back() != 1 || digits_.size() < 2)) {
        throw std::invalid_argument("long expansion must end in 1 and have length >= 2");
    }
}

CFExpansion expand(Rational r, Convention conv) {
    DigitString digits;
    Int p = r.num();
    Int q = r.den();
    while (p != 0) {
        // p/q < 1 at every step, so the quotient q/p is the next digit.
        digits.push_back(static_cast<Digit>(q / p));
        const Int rem = q % p;
        q = p;
        p = rem;
    }
    if (conv == Convention::Long) {
        digits.back() -= 1;
        digits.push_back(1);
    }
    return CFExpansion(std::move(digits), conv);
}

Fraction evaluate_digits(std::span<const Digit> digits) {
    if (digits.empty()) throw std::invalid_argument("cannot evaluate an empty digit string");
    // Backward recurrence: x = 1 / (a_k + x_{k+1}), carried as num/den.
    Int num = 1;
    Int den = static_cast<Int>(digits.back());
    if (digits.back() == 0) throw std::invalid_argument("continued fraction digits must be >= 1");
    for (std::size_t i = digits.size() - 1; i-- > 0;) {
        if (digits[i] == 0) throw std::invalid_argument("continued fraction digits must be >= 1");
        const Int next_den = checked_add(checked_mul(static_cast<Int>(digits[i]), den), num);
        num = den;
        den = next_den;
    }
    return Fraction{num, den};
}

Rational evaluate(const CFExpansion& e) {
    const Fraction f = evaluate_digits(e.digits());
    return Rational::make(f.num, f.den);
}

std::vector<Convergent> convergents(std::span<const Digit> digits) {
    std::vector<Convergent> out;
    out.reserve(digits.size());
    // (p_{-1}, q_{-1}) = (1, 0), (p_0, q_0) = (0, 1)
    Int p_prev = 1, q_prev = 0;
    Int p = 0, q = 1;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        const Int a = static_cast<Int>(digits[k]);
        const Int p_next = checked_add(checked_mul(a, p), p_prev);
        const Int q_next = checked_add(checked_mul(a, q), q_prev);
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        out.push_back(Convergent{p, q, k + 1});
    }
    return out;
}

std::vector<Convergent> convergents(const CFExpansion& e) { return convergents(e.digits()); }

Rational concat_rationals(Rational r, Rational rprime, Convention conv) {
    const CFExpansion head = expand(r, conv);
    const auto conv_r = convergents(head);
    const Int p = conv_r.back().p;
    const Int q = conv_r.back().q;
    // p'/q' is r with its last digit removed, i.e. the (n-1)-st convergent.
    const Int p1 = conv_r.size() >= 2 ? conv_r[conv_r.size() - 2].p : 0;
    const Int q1 = conv_r.size() >= 2 ? conv_r[conv_r.size() - 2].q : 1;
    const Int v = rprime.num();
    const Int u = rprime.den();
    const Int num = checked_add(checked_mul(u, p), checked_mul(v, p1));
    const Int den = checked_add(checked_mul(u, q), checked_mul(v, q1));
    return Rational::make(num, den);
}

std::optional<CFExpansion> gauss_shift(const CFExpansion& e) {
    const auto d = e.digits();
    if (d.size() < 2) return std::nullopt;
    // <a, 1> is the Long form of 1/(a+1); the shifted tail <1> is 1 = 0 mod 1.
    if (e.convention() == Convention::Long && d.size() == 2) return std::nullopt;
    return CFExpansion(DigitString(d.begin() + 1, d.end()), e.convention());
}

double gauss_map(double x) {
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("gauss_map requires 0 <= x < 1");
    if (x == 0.0) return 0.0;
    const double inv = 1.0 / x;
    return inv - std::floor(inv);
}

DigitString mirror(std::span<const Digit> digits) { return DigitString(digits.rbegin(), digits.rend()); }

void append_expansion(std::uint64_t num, std::uint64_t den, Convention conv, DigitString& out) {
    if (num == 0 || num >= den) throw std::invalid_argument("append_expansion requires 0 < num < den");
    std::uint64_t p = num;
    std::uint64_t q = den;
    while (p != 0) {
        out.push_back(q / p);
        const std::uint64_t rem = q % p;
        q = p;
        p = rem;
    }
    if (conv == Convention::Long) {
        out.back() -= 1;
        out.push_back(1);
    }
}

std::string digits_to_string(std::span<const Digit> digits, char sep) {
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i) out.push_back(sep);
        out += std::to_string(digits[i]);
    }
    return out;
}

} // namespace cfn
