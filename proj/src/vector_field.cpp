#include "fastslow/vector_field.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fastslow {

std::string_view to_string(CanonicalSystem s) {
  switch (s) {
    case CanonicalSystem::FoldSlow: return "fold";
    case CanonicalSystem::FoldLambda: return "fold-lambda";
    case CanonicalSystem::FoldLambdaFast: return "fold-lambda-fast";
    case CanonicalSystem::Transcritical: return "transcritical";
  }
  return "?";
}

CanonicalSystem parse_system(std::string_view name) {
  if (name == "fold" || name == "fold-slow") return CanonicalSystem::FoldSlow;
  if (name == "fold-lambda") return CanonicalSystem::FoldLambda;
  if (name == "fold-lambda-fast") return CanonicalSystem::FoldLambdaFast;
  if (name == "transcritical") return CanonicalSystem::Transcritical;
  throw InvalidInput("unknown system '" + std::string(name) + "'");
}

void SystemParams::validate(bool slow_form_fold) const {
  if (eps <= 0 || eps > 1) throw InvalidInput("eps must satisfy 0 < eps <= 1");
  if (h <= 0) throw InvalidInput("h must be positive");
  if (slow_form_fold && h >= eps) throw InvalidInput("slow-form fold requires h < eps");
}

PolyVectorField canonical(CanonicalSystem name) {
  using namespace sym;
  switch (name) {
    case CanonicalSystem::FoldSlow:
      return {(-y() + x() * x()) * eps_inv(), x(), TimeScale::Slow};
    case CanonicalSystem::FoldLambda:
      return {(-y() + x() * x()) * eps_inv(), x() - lam(), TimeScale::Slow};
    case CanonicalSystem::FoldLambdaFast:
      return {-y() + x() * x(), eps() * (x() - lam()), TimeScale::Fast};
    case CanonicalSystem::Transcritical:
      return {x() * x() - y() * y() + eps(), eps(), TimeScale::Fast};
  }
  throw InvalidInput("unknown canonical system");
}

Jacobian jacobian(const PolyVectorField& f) {
  return {{{f.fx.derivative(Var::X), f.fx.derivative(Var::Y)},
           {f.fy.derivative(Var::X), f.fy.derivative(Var::Y)}}};
}

PolyVectorField substitute(const PolyVectorField& f, Var v, const RationalPoly& value) {
  return {f.fx.substitute(v, value), f.fy.substitute(v, value), f.time_scale};
}

namespace {

template <class T>
Point<T> eval_impl(const PolyVectorField& f, const T& x, const T& y, const SystemParams& p) {
  const Assignment<T> a{x, y, make_scalar(p.eps, x), make_scalar(p.h, x), make_scalar(p.lambda_p, x)};
  return {f.fx.evaluate(a), f.fy.evaluate(a)};
}

}  // namespace

Point<BigReal> eval(const PolyVectorField& f, const BigReal& x, const BigReal& y, const SystemParams& p) {
  if (x.digits() != y.digits()) throw InvalidInput("eval: x and y carry different precision");
  return eval_impl(f, x, y, p);
}

Point<double> eval(const PolyVectorField& f, double x, double y, const SystemParams& p) {
  return eval_impl(f, x, y, p);
}

std::string to_text(const PolyVectorField& f) {
  return "[fx]\n" + f.fx.to_text() + "[fy]\n" + f.fy.to_text();
}

PolyVectorField field_from_text(std::string_view text) {
  const auto fx_pos = text.find("[fx]");
  const auto fy_pos = text.find("[fy]");
  if (fx_pos == std::string_view::npos || fy_pos == std::string_view::npos || fy_pos < fx_pos) {
    throw InvalidInput("field text needs [fx] then [fy] sections");
  }
  PolyVectorField f;
  f.fx = RationalPoly::from_text(text.substr(fx_pos + 4, fy_pos - fx_pos - 4));
  f.fy = RationalPoly::from_text(text.substr(fy_pos + 4));
  return f;
}

template <class T>
NumericPoly<T>::NumericPoly(const RationalPoly& p, const SystemParams& params, const T& like)
    : zero_(make_scalar(Rational(0), like)) {
  const Assignment<T> a{like, like, make_scalar(params.eps, like), make_scalar(params.h, like),
                        make_scalar(params.lambda_p, like)};
  // Collapse the parameter symbols into one coefficient per (x, y) power.
  std::map<std::pair<int, int>, RationalPoly> grouped;
  for (const auto& [m, c] : p.terms()) {
    Monomial rest = m;
    rest.x = 0;
    rest.y = 0;
    grouped[{m.x, m.y}] += RationalPoly::term(c, rest);
  }
  for (const auto& [powers, coeff_poly] : grouped) {
    T coeff = coeff_poly.evaluate(a);
    terms_.push_back({std::move(coeff), powers.first, powers.second});
    max_x_ = std::max(max_x_, powers.first);
    max_y_ = std::max(max_y_, powers.second);
  }
}

template <class T>
T NumericPoly<T>::operator()(const T& x, const T& y) const {
  T sum = zero_;
  if (terms_.empty()) return sum;
  // Small degrees: tabulate powers once per call.
  std::vector<T> xp;
  std::vector<T> yp;
  xp.reserve(static_cast<std::size_t>(max_x_) + 1);
  yp.reserve(static_cast<std::size_t>(max_y_) + 1);
  xp.push_back(make_scalar(Rational(1), x));
  yp.push_back(make_scalar(Rational(1), x));
  for (int i = 1; i <= max_x_; ++i) xp.push_back(xp.back() * x);
  for (int i = 1; i <= max_y_; ++i) yp.push_back(yp.back() * y);
  for (const Term& t : terms_) {
    T v = t.coeff;
    if (t.ax) v *= xp[static_cast<std::size_t>(t.ax)];
    if (t.ay) v *= yp[static_cast<std::size_t>(t.ay)];
    sum += v;
  }
  return sum;
}

template class NumericPoly<double>;
template class NumericPoly<BigReal>;

}  // namespace fastslow
