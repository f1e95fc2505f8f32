#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mmdim {

using BigInt = mpz_class;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Serialized as "p/q".
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value);  // NOLINT(google-explicit-constructor)
    Rational(const BigInt& value);  // NOLINT(google-explicit-constructor)
    Rational(const BigInt& num, const BigInt& den);
    Rational(std::int64_t num, std::int64_t den);

    /// Accepts "p/q", "p" and optional leading sign. Throws std::invalid_argument.
    static Rational parse(std::string_view text);

    BigInt num() const { return value_.get_num(); }
    BigInt den() const { return value_.get_den(); }

    bool is_zero() const { return sgn(value_) == 0; }
    bool is_integer() const { return value_.get_den() == 1; }
    int sign() const { return sgn(value_); }
    double to_double() const { return value_.get_d(); }

    /// Always "p/q", including integers ("2/1").
    std::string str() const;

    Rational abs() const;
    Rational operator-() const;

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
               : c > 0 ? std::strong_ordering::greater
                       : std::strong_ordering::equal;
    }

    const mpq_class& raw() const { return value_; }

private:
    mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& q);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// base^exp for exp >= 0.
BigInt ipow(const BigInt& base, unsigned long exp);
Rational pow(const Rational& base, unsigned long exp);

/// Least common multiple of two positive integers.
BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace mmdim
