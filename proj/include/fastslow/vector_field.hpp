#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fastslow/big_real.hpp"
#include "fastslow/rational_poly.hpp"

namespace fastslow {

enum class TimeScale { Slow, Fast };

enum class CanonicalSystem { FoldSlow, FoldLambda, FoldLambdaFast, Transcritical };

std::string_view to_string(CanonicalSystem s);
/// Accepts "fold", "fold-slow", "fold-lambda", "fold-lambda-fast", "transcritical".
CanonicalSystem parse_system(std::string_view name);

/// Planar field (fx, fy). Immutable value type.
struct PolyVectorField {
  RationalPoly fx;
  RationalPoly fy;
  TimeScale time_scale = TimeScale::Slow;

  /// True when fx carries eps^-1, i.e. a slow-form fold; such fields need h < eps.
  bool is_slow_form_fold() const { return fx.has_negative_eps_power() || fy.has_negative_eps_power(); }

  friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;
};

using Jacobian = std::array<std::array<RationalPoly, 2>, 2>;

struct SystemParams {
  Rational eps{1, 10};
  Rational h{1, 100};
  Rational lambda_p{0};

  /// Checks 0 < eps <= 1, h > 0 and, for slow-form folds, h < eps.
  void validate(bool slow_form_fold) const;
};

struct RationalPoint {
  Rational x;
  Rational y;
};

template <class T>
struct Point {
  T x;
  T y;
};

PolyVectorField canonical(CanonicalSystem name);
Jacobian jacobian(const PolyVectorField& f);

/// Replaces a symbol in both components.
PolyVectorField substitute(const PolyVectorField& f, Var v, const RationalPoly& value);

/// Exact evaluation at working precision.
Point<BigReal> eval(const PolyVectorField& f, const BigReal& x, const BigReal& y, const SystemParams& p);
Point<double> eval(const PolyVectorField& f, double x, double y, const SystemParams& p);

/// Text form: "[fx]" header, its term lines, then "[fy]" and its terms.
std::string to_text(const PolyVectorField& f);
PolyVectorField field_from_text(std::string_view text);

/// A component specialised to fixed (eps, h, lambda): coefficients in T
/// multiplying x^a y^b. Built once per run so map iterations avoid rational
/// arithmetic in the inner loop.
template <class T>
class NumericPoly {
 public:
  struct Term {
    T coeff;
    int ax;
    int ay;
  };

  NumericPoly() = default;
  NumericPoly(const RationalPoly& p, const SystemParams& params, const T& like);

  T operator()(const T& x, const T& y) const;

 private:
  std::vector<Term> terms_;
  int max_x_ = 0;
  int max_y_ = 0;
  T zero_{};
};

template <class T>
struct NumericField {
  NumericPoly<T> fx;
  NumericPoly<T> fy;

  NumericField(const PolyVectorField& f, const SystemParams& p, const T& like)
      : fx(f.fx, p, like), fy(f.fy, p, like) {}
  Point<T> operator()(const T& x, const T& y) const { return {fx(x, y), fy(x, y)}; }
};

template <class T>
struct NumericJacobian {
  std::array<std::array<NumericPoly<T>, 2>, 2> entries;

  NumericJacobian(const PolyVectorField& f, const SystemParams& p, const T& like) {
    const Jacobian j = jacobian(f);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) entries[r][c] = NumericPoly<T>(j[r][c], p, like);
    }
  }
  std::array<std::array<T, 2>, 2> operator()(const T& x, const T& y) const {
    return {{{entries[0][0](x, y), entries[0][1](x, y)}, {entries[1][0](x, y), entries[1][1](x, y)}}};
  }
};

extern template class NumericPoly<double>;
extern template class NumericPoly<BigReal>;

}  // namespace fastslow
