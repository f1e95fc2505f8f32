#include "mmdim/log_expr.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace mmdim {

namespace {

mpfr_prec_t bits_for(int digits) {
    // log2(10) ~ 3.3219; 32 guard bits.
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623) + 32);
}

}  // namespace

BigFloat::BigFloat(int digits) : digits_(digits) {
    if (digits_ < 1) throw std::invalid_argument("precision must be at least one digit");
    mpfr_init2(v_, bits_for(digits_));
    mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(const BigFloat& o) : digits_(o.digits_) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept : BigFloat(o.digits_) { mpfr_swap(v_, o.v_); }

BigFloat& BigFloat::operator=(const BigFloat& o) {
    if (this != &o) {
        digits_ = o.digits_;
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
    std::swap(digits_, o.digits_);
    mpfr_swap(v_, o.v_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::from_int(const BigInt& v, int digits) {
    BigFloat out(digits);
    mpfr_set_z(out.v_, v.get_mpz_t(), MPFR_RNDN);
    return out;
}

BigFloat BigFloat::from_rational(const Rational& v, int digits) {
    BigFloat out(digits);
    mpfr_set_q(out.v_, v.raw().get_mpq_t(), MPFR_RNDN);
    return out;
}

BigFloat BigFloat::log(const BigInt& v, int digits) {
    if (v <= 0) throw std::domain_error("log of a non-positive integer");
    // Exact conversion first so the only rounding is in the logarithm.
    BigFloat exact(digits);
    const auto bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(v.get_mpz_t(), 2)) + 2;
    if (bits > mpfr_get_prec(exact.v_)) mpfr_set_prec(exact.v_, bits);
    mpfr_set_z(exact.v_, v.get_mpz_t(), MPFR_RNDN);
    BigFloat out(digits);
    mpfr_log(out.v_, exact.v_, MPFR_RNDN);
    return out;
}

double BigFloat::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string BigFloat::str() const { return str(digits_); }

std::string BigFloat::str(int digits) const {
    if (mpfr_zero_p(v_)) return "0";
    char* buf = nullptr;
    const std::string fmt = "%." + std::to_string(digits) + "Rg";
    if (mpfr_asprintf(&buf, fmt.c_str(), v_) < 0) throw std::runtime_error("mpfr formatting failed");
    std::unique_ptr<char, decltype(&mpfr_free_str)> guard(buf, &mpfr_free_str);
    return std::string(buf);
}

bool BigFloat::is_zero() const { return mpfr_zero_p(v_) != 0; }
int BigFloat::sign() const { return mpfr_sgn(v_); }

BigFloat& BigFloat::operator+=(const BigFloat& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::abs() const {
    BigFloat out(*this);
    mpfr_abs(out.v_, out.v_, MPFR_RNDN);
    return out;
}

LogExpr LogExpr::log_of(const BigInt& value) {
    if (value <= 0) throw std::domain_error("log of a non-positive integer");
    LogExpr e;
    e.add_term(value, Rational(1));
    return e;
}

LogExpr LogExpr::log_of(const Rational& value) {
    if (value.sign() <= 0) throw std::domain_error("log of a non-positive rational");
    LogExpr e;
    e.add_term(value.num(), Rational(1));
    e.add_term(value.den(), Rational(-1));
    return e;
}

void LogExpr::add_term(const BigInt& base, const Rational& coeff) {
    if (base == 1 || coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(base, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

LogExpr& LogExpr::operator+=(const LogExpr& o) {
    for (const auto& [b, c] : o.terms_) add_term(b, c);
    return *this;
}

LogExpr& LogExpr::operator-=(const LogExpr& o) {
    for (const auto& [b, c] : o.terms_) add_term(b, -c);
    return *this;
}

LogExpr& LogExpr::operator*=(const Rational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [b, coeff] : terms_) coeff *= c;
    return *this;
}

BigFloat LogExpr::evaluate(int digits) const {
    BigFloat acc(digits);
    for (const auto& [b, c] : terms_) acc += BigFloat::log(b, digits) * BigFloat::from_rational(c, digits);
    return acc;
}

std::string LogExpr::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [b, c] : terms_) {
        if (!first) os << (c.sign() < 0 ? " - " : " + ");
        else if (c.sign() < 0) os << '-';
        os << c.abs() << "*log(" << b.get_str() << ')';
        first = false;
    }
    return os.str();
}

}  // namespace mmdim
