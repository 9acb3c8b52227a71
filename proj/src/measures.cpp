#include "cfnormal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfn {

Pattern::Pattern(DigitString digits) : digits_(std::move(digits)) {
    if (digits_.empty()) throw std::invalid_argument("pattern must be nonempty");
    for (Digit d : digits_) {
        if (d == 0) throw std::invalid_argument("pattern digits must be >= 1");
    }
}

Pattern Pattern::parse(std::string_view text) {
    DigitString digits;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ',' || c == ' ' || c == '.' || c == '[' || c == ']') {
            ++i;
            continue;
        }
        if (c < '0' || c > '9') throw std::invalid_argument("invalid pattern: " + std::string(text));
        Digit v = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (v > (~Digit{0} - 9) / 10) throw std::invalid_argument("pattern digit out of range");
            v = v * 10 + static_cast<Digit>(text[i] - '0');
            ++i;
        }
        digits.push_back(v);
    }
    return Pattern(std::move(digits));
}

Digit Pattern::max_digit() const { return *std::max_element(digits_.begin(), digits_.end()); }

std::string Pattern::to_string() const { return digits_to_string(digits_, ','); }

CylinderGeometry cylinder_geometry(const Pattern& s) {
    const auto conv = convergents(s.digits());
    CylinderGeometry geo;
    geo.pn = conv.back().p;
    geo.qn = conv.back().q;
    geo.pn1 = conv.size() >= 2 ? conv[conv.size() - 2].p : 0;
    geo.qn1 = conv.size() >= 2 ? conv[conv.size() - 2].q : 1;

    // <d_1..d_k> = pn/qn and <d_1..d_k + 1> = (pn+pn1)/(qn+qn1).
    const Fraction a = Fraction::reduced(geo.pn, geo.qn);
    const Fraction b = Fraction::reduced(checked_add(geo.pn, geo.pn1), checked_add(geo.qn, geo.qn1));
    if (a < b) {
        geo.lower = a;
        geo.upper = b;
    } else {
        geo.lower = b;
        geo.upper = a;
    }
    return geo;
}

double gauss_measure(std::span<const Digit> s) {
    if (s.empty()) throw std::invalid_argument("pattern must be nonempty");
    // Convergent recurrence in long double, rescaled to stay in range; only
    // ratios and ln q_n are needed.
    long double p_prev = 1, q_prev = 0, p = 0, q = 1;
    long double log_scale = 0;
    for (Digit d : s) {
        if (d == 0) throw std::invalid_argument("pattern digits must be >= 1");
        const long double a = static_cast<long double>(d);
        const long double pn = a * p + p_prev;
        const long double qn = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        if (q > 1e300L) {
            p /= 1e300L;
            q /= 1e300L;
            p_prev /= 1e300L;
            q_prev /= 1e300L;
            log_scale += std::log(1e300L);
        }
    }
    // Width of C_s is 1/(q (q + q_prev)); mu = log1p(width / (1 + lower)) / ln 2.
    // With lower = p/q:              width/(1+lower) = 1/((q + q_prev)(q + p))
    // With lower = (p+p_prev)/(q+q_prev): width/(1+lower) = 1/(q (q+q_prev+p+p_prev))
    const bool p_over_q_is_lower = (s.size() % 2) == 0;
    const long double denom_scaled = p_over_q_is_lower ? (q + q_prev) * (q + p) : q * (q + q_prev + p + p_prev);
    const long double log_arg = -std::log(denom_scaled) - 2 * log_scale;
    if (log_arg < -11000) return 0.0;
    return static_cast<double>(std::log1p(std::exp(log_arg)) / std::log(2.0L));
}

double gauss_measure(const Pattern& s) { return gauss_measure(s.digits()); }

bool in_cylinder(const Pattern& s, const Rational& x) {
    const auto e = expand(x, Convention::Long);
    const auto d = e.digits();
    return d.size() >= s.size() && std::equal(s.digits().begin(), s.digits().end(), d.begin());
}

Fraction lebesgue_measure(const Pattern& s) {
    const auto conv = convergents(s.digits());
    const Int qn = conv.back().q;
    const Int qn1 = conv.size() >= 2 ? conv[conv.size() - 2].q : 1;
    return Fraction{1, checked_mul(qn, checked_add(qn, qn1))};
}

Constants constants() {
    const double log2 = std::log(2.0);
    const double pi = std::acos(-1.0);
    return Constants{pi * pi / (12.0 * log2), (1.0 + std::sqrt(5.0)) / 2.0, log2};
}

double sample_gauss(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("sample_gauss requires 0 < u < 1");
    return std::expm1(u * kLn2);
}

DigitString gauss_digits(double x, std::size_t depth) {
    if (depth > kMaxDoubleDigitDepth) {
        throw std::invalid_argument("double-precision digit extraction is limited to 40 digits");
    }
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("gauss_digits requires 0 <= x < 1");
    DigitString out;
    out.reserve(depth);
    for (std::size_t i = 0; i < depth && x != 0.0; ++i) {
        const double inv = 1.0 / x;
        const double a = std::floor(inv);
        out.push_back(a >= 9.007199254740992e15 ? Digit{1} << 53 : static_cast<Digit>(a));
        x = inv - a;
    }
    return out;
}

Digit GaussDigitSampler::next(double u) {
    if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("GaussDigitSampler requires 0 < u <= 1");
    // Conditional CDF F(t) = H(t)/H(1), H(t) = log1p(gap t / (1 + rho t)) / gap.
    double t;
    if (std::fabs(gap_) < 1e-18) {
        // gap -> 0 limit: density (1 + rho t)^-2, F(t) = (1+rho) t / (1 + rho t)
        t = u / (1.0 + rho_ - rho_ * u);
    } else {
        const double e = std::expm1(u * std::log1p(gap_ / (1.0 + rho_)));
        t = e / (gap_ - rho_ * e);
    }
    double a = std::floor(1.0 / t);
    if (a < 1.0) a = 1.0;
    if (a > 9.007199254740992e15) a = 9.007199254740992e15;
    const Digit digit = static_cast<Digit>(a);

    // Fold logs in batches; the product stays far from overflow because each
    // factor is below 2^54 and we fold once it passes 2^600.
    product_ *= a + rho_;
    if (product_ > 0x1p600) {
        log_q_ += std::log(product_);
        product_ = 1.0;
    }
    gap_ = -gap_ / ((a + sigma_) * (a + rho_));
    rho_ = 1.0 / (a + rho_);
    sigma_ = 1.0 / (a + sigma_);
    ++count_;
    return digit;
}

double GaussDigitSampler::log_q() const { return log_q_ + std::log(product_); }

} // namespace cfn
