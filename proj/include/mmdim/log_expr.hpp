#pragma once

#include "mmdim/rational.hpp"

#include <mpfr.h>

#include <map>
#include <string>

namespace mmdim {

/// Arbitrary-precision binary float (MPFR) sized from a decimal digit count.
class BigFloat {
public:
    explicit BigFloat(int digits = 30);
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    static BigFloat from_int(const BigInt& v, int digits);
    static BigFloat from_rational(const Rational& v, int digits);
    static BigFloat log(const BigInt& v, int digits);

    int digits() const { return digits_; }
    double to_double() const;
    /// Decimal string with `digits` significant digits.
    std::string str() const;
    std::string str(int digits) const;

    bool is_zero() const;
    int sign() const;

    BigFloat& operator+=(const BigFloat& o);
    BigFloat& operator-=(const BigFloat& o);
    BigFloat& operator*=(const BigFloat& o);
    BigFloat& operator/=(const BigFloat& o);
    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    BigFloat abs() const;

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }

private:
    int digits_;
    mpfr_t v_;
};

/// Exact linear combination sum_i c_i log(a_i) with rational c_i and
/// positive integer a_i. Only evaluated numerically on demand.
class LogExpr {
public:
    LogExpr() = default;

    static LogExpr log_of(const BigInt& value);
    static LogExpr log_of(const Rational& value);

    bool is_zero() const { return terms_.empty(); }
    const std::map<BigInt, Rational>& terms() const { return terms_; }

    LogExpr& operator+=(const LogExpr& o);
    LogExpr& operator-=(const LogExpr& o);
    LogExpr& operator*=(const Rational& c);
    friend LogExpr operator+(LogExpr a, const LogExpr& b) { return a += b; }
    friend LogExpr operator-(LogExpr a, const LogExpr& b) { return a -= b; }
    friend LogExpr operator*(LogExpr a, const Rational& c) { return a *= c; }
    friend LogExpr operator*(const Rational& c, LogExpr a) { return a *= c; }
    LogExpr operator-() const { return *this * Rational(-1); }

    BigFloat evaluate(int digits) const;
    /// e.g. "2/1*log(3) - 1/1*log(17)"
    std::string str() const;

    friend bool operator==(const LogExpr&, const LogExpr&) = default;

private:
    void add_term(const BigInt& base, const Rational& coeff);
    std::map<BigInt, Rational> terms_;
};

}  // namespace mmdim
