#include "morphic/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace morphic {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    auto r = make(num, den);
    if (!r) throw std::overflow_error("rational out of range");
    *this = *r;
}

std::optional<Rational> Rational::make(__int128 num, __int128 den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < -kMax || den > kMax) return std::nullopt;
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::try_add(const Rational& a, const Rational& b) {
    __int128 num = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return make(num, den);
}

std::optional<Rational> Rational::try_mul(const Rational& a, const Rational& b) {
    // Cross-reduce first so products stay small.
    __int128 g1 = gcd128(a.num_, b.den_);
    __int128 g2 = gcd128(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    __int128 num = (a.num_ / g1) * (b.num_ / g2);
    __int128 den = (a.den_ / g2) * (b.den_ / g1);
    return make(num, den);
}

std::optional<Rational> Rational::try_div(const Rational& a, const Rational& b) {
    if (b.num_ == 0) return std::nullopt;
    Rational inv;
    inv.num_ = b.den_;
    inv.den_ = b.num_;
    if (inv.den_ < 0) {
        inv.num_ = -inv.num_;
        inv.den_ = -inv.den_;
    }
    return try_mul(a, inv);
}

std::optional<Rational> Rational::try_neg(const Rational& a) {
    return make(-static_cast<__int128>(a.num_), a.den_);
}

std::optional<Rational> Rational::try_pow(const Rational& a, int exponent) {
    if (exponent == 0) return Rational(1);
    Rational base = a;
    if (exponent < 0) {
        auto inv = try_div(Rational(1), a);
        if (!inv) return std::nullopt;
        base = *inv;
        exponent = -exponent;
    }
    Rational result(1);
    while (exponent > 0) {
        if (exponent & 1) {
            auto r = try_mul(result, base);
            if (!r) return std::nullopt;
            result = *r;
        }
        exponent >>= 1;
        if (exponent > 0) {
            auto b = try_mul(base, base);
            if (!b) return std::nullopt;
            base = *b;
        }
    }
    return result;
}

std::optional<Rational> Rational::from_double(double value) {
    if (!std::isfinite(value)) return std::nullopt;
    if (value == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(value, &exp);  // value = mant * 2^exp, 0.5 <= |mant| < 1
    // Scale mantissa to an integer (53 bits).
    __int128 m = static_cast<__int128>(std::ldexp(mant, 53));
    exp -= 53;
    while (m % 2 == 0 && exp < 0) {
        m /= 2;
        ++exp;
    }
    if (exp >= 0) {
        if (exp > 62) return std::nullopt;
        return make(m << exp, 1);
    }
    if (-exp > 62) return std::nullopt;
    return make(m, static_cast<__int128>(1) << (-exp));
}

}  // namespace morphic
