#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cfn {

// All exact per-rational arithmetic runs in signed 128-bit integers.
using Int = __int128;

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotMemberError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientDigits : public std::length_error {
public:
    using std::length_error::length_error;
};

inline Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw OverflowError("128-bit integer overflow in addition");
    }
    return r;
}

inline Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) {
        throw OverflowError("128-bit integer overflow in subtraction");
    }
    return r;
}

inline Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw OverflowError("128-bit integer overflow in multiplication");
    }
    return r;
}

inline Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string to_string(Int value);

// Parses an optionally signed decimal literal; throws std::invalid_argument.
Int parse_int(std::string_view text);

inline double to_double(Int value) { return static_cast<double>(value); }
inline long double to_long_double(Int value) { return static_cast<long double>(value); }

} // namespace cfn
