#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>

#include "fastslow/big_real.hpp"
#include "fastslow/errors.hpp"

namespace fastslow {

enum class Var { X, Y, Eps, H, Lambda };

/// Exponents of x, y, eps, h and the unfolding parameter. The eps exponent is
/// signed: a negative value is the eps^-1 slot, so eps * eps^-1 cancels by
/// construction and a term never carries both.
struct Monomial {
  int x = 0;
  int y = 0;
  int eps = 0;
  int h = 0;
  int lambda = 0;

  int degree(Var v) const;
  int& degree(Var v);
  int eps_degree() const { return eps > 0 ? eps : 0; }
  int eps_inv_degree() const { return eps < 0 ? -eps : 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    return {a.x + b.x, a.y + b.y, a.eps + b.eps, a.h + b.h, a.lambda + b.lambda};
  }
  auto operator<=>(const Monomial&) const = default;
};

/// Values substituted for the symbols when a polynomial is evaluated.
template <class T>
struct Assignment {
  T x;
  T y;
  T eps;
  T h;
  T lambda;
};

/// Polynomial in x, y, eps, eps^-1, h, lambda with exact rational
/// coefficients. Terms are kept sorted and zero coefficients are dropped, so
/// operator== is structural equality.
class RationalPoly {
 public:
  using Terms = std::map<Monomial, Rational>;

  RationalPoly() = default;
  RationalPoly(const Rational& constant);  // NOLINT(google-explicit-constructor)
  RationalPoly(long constant) : RationalPoly(Rational(constant)) {}  // NOLINT

  static RationalPoly term(const Rational& coeff, const Monomial& m);
  static RationalPoly variable(Var v);
  static RationalPoly eps_inverse();

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  bool has_negative_eps_power() const;

  RationalPoly& operator+=(const RationalPoly& rhs);
  RationalPoly& operator-=(const RationalPoly& rhs);
  RationalPoly& operator*=(const RationalPoly& rhs);
  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
  friend RationalPoly operator*(RationalPoly a, const RationalPoly& b) { return a *= b; }
  RationalPoly operator-() const;
  friend bool operator==(const RationalPoly& a, const RationalPoly& b) = default;

  RationalPoly derivative(Var v) const;

  /// Replaces every occurrence of `v` by `value`. Eps may only be replaced
  /// when no term carries a negative eps power.
  RationalPoly substitute(Var v, const RationalPoly& value) const;

  /// Rescales the step symbol, h^d -> h^d eps^-d (fast-time step h/eps).
  RationalPoly step_over_eps() const;

  template <class T>
  T evaluate(const Assignment<T>& a) const;

  /// One term per line: `coeff * x^a y^b eps^c h^d lam^e epsinv^f`.
  std::string to_text() const;
  static RationalPoly from_text(std::string_view text);

 private:
  void add_term(const Monomial& m, const Rational& c);

  Terms terms_;
};

namespace detail {

template <class T>
T integer_power(const T& base, int n, const T& one) {
  T result = one;
  T b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    n >>= 1;
    if (n > 0) b *= b;
  }
  return result;
}

}  // namespace detail

template <class T>
T RationalPoly::evaluate(const Assignment<T>& a) const {
  const T one = make_scalar(Rational(1), a.x);
  T sum = make_scalar(Rational(0), a.x);
  for (const auto& [m, c] : terms_) {
    T v = make_scalar(c, a.x);
    if (m.x) v *= detail::integer_power(a.x, m.x, one);
    if (m.y) v *= detail::integer_power(a.y, m.y, one);
    if (m.h) v *= detail::integer_power(a.h, m.h, one);
    if (m.lambda) v *= detail::integer_power(a.lambda, m.lambda, one);
    if (m.eps > 0) v *= detail::integer_power(a.eps, m.eps, one);
    if (m.eps < 0) {
      if (a.eps == make_scalar(Rational(0), a.x)) {
        throw SingularEvaluation("eps^-1 term evaluated at eps = 0");
      }
      v /= detail::integer_power(a.eps, -m.eps, one);
    }
    sum += v;
  }
  return sum;
}

// Shorthand used when writing equations out by hand.
namespace sym {
inline RationalPoly x() { return RationalPoly::variable(Var::X); }
inline RationalPoly y() { return RationalPoly::variable(Var::Y); }
inline RationalPoly eps() { return RationalPoly::variable(Var::Eps); }
inline RationalPoly h() { return RationalPoly::variable(Var::H); }
inline RationalPoly lam() { return RationalPoly::variable(Var::Lambda); }
inline RationalPoly eps_inv() { return RationalPoly::eps_inverse(); }
inline RationalPoly c(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return RationalPoly(q);
}
}  // namespace sym

}  // namespace fastslow
