#include "fastslow/big_real.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fastslow/errors.hpp"

namespace fastslow {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e)));
  return e >= 0 ? Rational(p) : Rational(mpz_class(1), p);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }),
          s.end());
  if (s.empty()) throw InvalidInput("empty number");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw InvalidInput("zero denominator in '" + s + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string body = s.substr(pos);
  long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string::npos) {
    std::string exp_text = body.substr(e + 1);
    std::string exp_digits = exp_text;
    if (!exp_digits.empty() && (exp_digits[0] == '+' || exp_digits[0] == '-')) exp_digits.erase(0, 1);
    if (!all_digits(exp_digits)) throw InvalidInput("bad exponent in '" + s + "'");
    exponent = std::stol(exp_text);
    body = body.substr(0, e);
  }
  std::string int_part = body;
  std::string frac_part;
  if (auto dot = body.find('.'); dot != std::string::npos) {
    int_part = body.substr(0, dot);
    frac_part = body.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw InvalidInput("bad number '" + s + "'");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
    throw InvalidInput("bad number '" + s + "'");
  }
  mpz_class mantissa(int_part + frac_part, 10);
  Rational q(mantissa);
  q *= pow10(exponent - static_cast<long>(frac_part.size()));
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string rational_to_string(const Rational& q) { return q.get_str(10); }

mpfr_prec_t digits_to_bits(unsigned digits) noexcept {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 1;
}

BigReal::BigReal(unsigned digits) : digits_(std::max(digits, 1u)) {
  mpfr_init2(value_, digits_to_bits(digits_));
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(long value, unsigned digits) : BigReal(digits) {
  mpfr_set_si(value_, value, MPFR_RNDN);
}

BigReal::BigReal(double value, unsigned digits) : BigReal(digits) {
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigReal::BigReal(const Rational& value, unsigned digits) : BigReal(digits) {
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

BigReal::BigReal(std::string_view decimal, unsigned digits)
    : BigReal(parse_rational(decimal), digits) {}

BigReal::BigReal(const BigReal& other) : digits_(other.digits_) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept : digits_(other.digits_) {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
    digits_ = other.digits_;
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) {
    mpfr_swap(value_, other.value_);
    std::swap(digits_, other.digits_);
  }
  return *this;
}

BigReal::~BigReal() { mpfr_clear(value_); }

void BigReal::raise_precision(unsigned digits) {
  if (digits > digits_) {
    mpfr_prec_round(value_, digits_to_bits(digits), MPFR_RNDN);
    digits_ = digits;
  }
}

double BigReal::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

std::string BigReal::to_string(unsigned significant) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return mpfr_sgn(value_) > 0 ? "inf" : "-inf";
  significant = std::max(significant, 1u);
  std::vector<char> buf(significant + 64);
  const int n = mpfr_snprintf(buf.data(), buf.size(), "%.*Re", static_cast<int>(significant - 1), value_);
  return std::string(buf.data(), static_cast<std::size_t>(std::max(n, 0)));
}

bool BigReal::is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
bool BigReal::is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
int BigReal::sign() const noexcept { return mpfr_sgn(value_); }

BigReal& BigReal::operator+=(const BigReal& rhs) {
  raise_precision(rhs.digits_);
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  raise_precision(rhs.digits_);
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  raise_precision(rhs.digits_);
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  raise_precision(rhs.digits_);
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal BigReal::operator-() const {
  BigReal r(*this);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigReal abs(const BigReal& v) {
  BigReal r(v);
  mpfr_abs(r.value_, r.value_, MPFR_RNDN);
  return r;
}

BigReal sqrt(const BigReal& v) {
  BigReal r(v);
  mpfr_sqrt(r.value_, r.value_, MPFR_RNDN);
  return r;
}

BigReal exp(const BigReal& v) {
  BigReal r(v);
  mpfr_exp(r.value_, r.value_, MPFR_RNDN);
  return r;
}

BigReal log(const BigReal& v) {
  BigReal r(v);
  mpfr_log(r.value_, r.value_, MPFR_RNDN);
  return r;
}

BigReal pow(const BigReal& v, long n) {
  BigReal r(v);
  mpfr_pow_si(r.value_, v.value_, n, MPFR_RNDN);
  return r;
}

}  // namespace fastslow
