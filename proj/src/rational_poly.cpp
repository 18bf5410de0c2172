#include "fastslow/rational_poly.hpp"

#include <sstream>
#include <vector>

namespace fastslow {

int Monomial::degree(Var v) const {
  switch (v) {
    case Var::X: return x;
    case Var::Y: return y;
    case Var::Eps: return eps;
    case Var::H: return h;
    case Var::Lambda: return lambda;
  }
  return 0;
}

int& Monomial::degree(Var v) {
  switch (v) {
    case Var::X: return x;
    case Var::Y: return y;
    case Var::Eps: return eps;
    case Var::H: return h;
    case Var::Lambda: break;
  }
  return lambda;
}

RationalPoly::RationalPoly(const Rational& constant) { add_term(Monomial{}, constant); }

RationalPoly RationalPoly::term(const Rational& coeff, const Monomial& m) {
  RationalPoly p;
  p.add_term(m, coeff);
  return p;
}

RationalPoly RationalPoly::variable(Var v) {
  Monomial m;
  m.degree(v) = 1;
  return term(Rational(1), m);
}

RationalPoly RationalPoly::eps_inverse() { return term(Rational(1), Monomial{0, 0, -1, 0, 0}); }

bool RationalPoly::has_negative_eps_power() const {
  for (const auto& [m, c] : terms_) {
    if (m.eps < 0) return true;
  }
  return false;
}

void RationalPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, Rational(-c));
  return *this;
}

RationalPoly& RationalPoly::operator*=(const RationalPoly& rhs) {
  RationalPoly out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) out.add_term(ma * mb, Rational(ca * cb));
  }
  terms_ = std::move(out.terms_);
  return *this;
}

RationalPoly RationalPoly::operator-() const {
  RationalPoly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, Rational(-c));
  return out;
}

RationalPoly RationalPoly::derivative(Var v) const {
  RationalPoly out;
  for (const auto& [m, c] : terms_) {
    const int d = m.degree(v);
    if (d == 0) continue;
    Monomial dm = m;
    dm.degree(v) = d - 1;
    out.add_term(dm, Rational(c * d));
  }
  return out;
}

RationalPoly RationalPoly::substitute(Var v, const RationalPoly& value) const {
  if (v == Var::Eps && has_negative_eps_power()) {
    throw InvalidInput("cannot substitute eps in a polynomial carrying eps^-1");
  }
  RationalPoly out;
  std::vector<RationalPoly> powers{RationalPoly(1)};
  for (const auto& [m, c] : terms_) {
    const int d = m.degree(v);
    while (static_cast<int>(powers.size()) <= d) powers.push_back(powers.back() * value);
    Monomial rest = m;
    rest.degree(v) = 0;
    out += term(c, rest) * powers[static_cast<std::size_t>(d)];
  }
  return out;
}

RationalPoly RationalPoly::step_over_eps() const {
  RationalPoly out;
  for (const auto& [m, c] : terms_) {
    Monomial r = m;
    r.eps -= m.h;
    out.add_term(r, c);
  }
  return out;
}

std::string RationalPoly::to_text() const {
  std::ostringstream os;
  for (const auto& [m, c] : terms_) {
    os << rational_to_string(c) << " * x^" << m.x << " y^" << m.y << " eps^" << m.eps_degree()
       << " h^" << m.h << " lam^" << m.lambda << " epsinv^" << m.eps_inv_degree() << '\n';
  }
  return os.str();
}

RationalPoly RationalPoly::from_text(std::string_view text) {
  RationalPoly out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string coeff, star;
    ls >> coeff >> star;
    if (star != "*") throw InvalidInput("malformed term line: " + line);
    Monomial m;
    int eps_pos = 0;
    int eps_neg = 0;
    std::string factor;
    while (ls >> factor) {
      const auto caret = factor.find('^');
      if (caret == std::string::npos) throw InvalidInput("malformed factor: " + factor);
      const std::string name = factor.substr(0, caret);
      const int e = std::stoi(factor.substr(caret + 1));
      if (name == "x") m.x = e;
      else if (name == "y") m.y = e;
      else if (name == "eps") eps_pos = e;
      else if (name == "h") m.h = e;
      else if (name == "lam") m.lambda = e;
      else if (name == "epsinv") eps_neg = e;
      else throw InvalidInput("unknown symbol: " + name);
    }
    m.eps = eps_pos - eps_neg;
    out.add_term(m, parse_rational(coeff));
  }
  return out;
}

}  // namespace fastslow
