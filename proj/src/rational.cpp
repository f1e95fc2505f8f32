#include "mmdim/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace mmdim {

namespace {

BigInt parse_int(std::string_view text, std::string_view whole) {
    if (text.empty())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') i = 1;
    if (i == text.size())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    for (std::size_t j = i; j < text.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(text[j])))
            throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
    std::string digits(text[0] == '+' ? text.substr(1) : text);
    return BigInt(digits, 10);
}

}  // namespace

Rational::Rational(std::int64_t value) {
    // mpq_class has no int64 constructor on every platform; go through mpz.
    value_ = mpq_class(BigInt(std::to_string(value), 10));
}

Rational::Rational(const BigInt& value) : value_(value) {}

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational::Rational(std::int64_t num, std::int64_t den)
    : Rational(BigInt(std::to_string(num), 10), BigInt(std::to_string(den), 10)) {}

Rational Rational::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, text));
    const BigInt num = parse_int(text.substr(0, slash), text);
    const auto den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    const BigInt den = parse_int(den_text, text);
    if (den == 0) throw std::invalid_argument("rational with zero denominator '" + std::string(text) + "'");
    return Rational(num, den);
}

std::string Rational::str() const {
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational Rational::abs() const {
    Rational r;
    r.value_ = ::abs(value_);
    return r;
}

Rational Rational::operator-() const {
    Rational r;
    r.value_ = -value_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    value_ += o.value_;
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    value_ -= o.value_;
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    value_ *= o.value_;
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    value_ /= o.value_;
    return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.str(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

BigInt ipow(const BigInt& base, unsigned long exp) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

Rational pow(const Rational& base, unsigned long exp) {
    return Rational(ipow(base.num(), exp), ipow(base.den(), exp));
}

BigInt lcm(const BigInt& a, const BigInt& b) {
    BigInt out;
    mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

}  // namespace mmdim
