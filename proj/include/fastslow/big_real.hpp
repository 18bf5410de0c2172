#pragma once

// Arbitrary precision reals on top of MPFR. Each value carries its own
// precision, so threads running at different digit counts never share
// global state.

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace fastslow {

using Rational = mpq_class;

/// Parses "1/10", "-3", "0.25", "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);
std::string rational_to_string(const Rational& q);

inline constexpr unsigned kMinDigits = 16;

class BigReal {
 public:
  explicit BigReal(unsigned digits = kMinDigits);
  BigReal(long value, unsigned digits);
  BigReal(double value, unsigned digits);
  BigReal(const Rational& value, unsigned digits);
  BigReal(std::string_view decimal, unsigned digits);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  unsigned digits() const noexcept { return digits_; }

  double to_double() const;
  /// Scientific notation with `significant` digits, "C" locale.
  std::string to_string(unsigned significant) const;
  bool is_finite() const noexcept;
  bool is_zero() const noexcept;
  int sign() const noexcept;

  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);

  friend BigReal operator+(BigReal lhs, const BigReal& rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, const BigReal& rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, const BigReal& rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, const BigReal& rhs) { return lhs /= rhs; }
  BigReal operator-() const;

  friend bool operator==(const BigReal& a, const BigReal& b);
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);

  friend BigReal abs(const BigReal& v);
  friend BigReal sqrt(const BigReal& v);
  friend BigReal exp(const BigReal& v);
  friend BigReal log(const BigReal& v);
  /// v^n for integer n (negative allowed).
  friend BigReal pow(const BigReal& v, long n);

  mpfr_srcptr raw() const noexcept { return value_; }
  mpfr_ptr raw() noexcept { return value_; }

 private:
  void raise_precision(unsigned digits);

  mpfr_t value_;
  unsigned digits_;
};

/// Bits needed to hold `digits` significant decimal digits.
mpfr_prec_t digits_to_bits(unsigned digits) noexcept;

// Scalar adaptors so numeric kernels can be written once for double and
// BigReal. `like` supplies the precision.
inline double make_scalar(const Rational& q, double /*like*/) { return q.get_d(); }
inline BigReal make_scalar(const Rational& q, const BigReal& like) {
  return BigReal(q, like.digits());
}
inline double to_double(double v) { return v; }
inline double to_double(const BigReal& v) { return v.to_double(); }

}  // namespace fastslow
