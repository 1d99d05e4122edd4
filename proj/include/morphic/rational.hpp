#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace morphic {

/// Exact rational with 64-bit numerator and denominator.
///
/// Always normalized: gcd(num, den) == 1 and den > 0. Arithmetic is checked;
/// the `try_*` functions return nullopt on overflow so callers can fall back
/// to floating point.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;

    static std::optional<Rational> try_add(const Rational& a, const Rational& b);
    static std::optional<Rational> try_mul(const Rational& a, const Rational& b);
    static std::optional<Rational> try_div(const Rational& a, const Rational& b);
    static std::optional<Rational> try_pow(const Rational& a, int exponent);
    static std::optional<Rational> try_neg(const Rational& a);

    /// Exact conversion of a double whose binary expansion fits; nullopt otherwise.
    static std::optional<Rational> from_double(double value);

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    static std::optional<Rational> make(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace morphic
