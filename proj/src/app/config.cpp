#include "fastslow/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fastslow/errors.hpp"

namespace fastslow::app {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
    if (kv.has(key)) throw InvalidInput("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.values_[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KeyValues::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
}

bool parse_bool(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw InvalidInput("expected a boolean, got '" + std::string(text) + "'");
}

std::vector<Rational> parse_grid(std::string_view text) {
  const std::string body = trim(text);
  if (body.empty()) return {};
  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) throw InvalidInput("grid range must be start:stop:count");
    const Rational a = parse_rational(parts[0]);
    const Rational b = parse_rational(parts[1]);
    const Rational count = parse_rational(parts[2]);
    if (count.get_den() != 1 || count < 0) throw InvalidInput("grid count must be a non-negative integer");
    const long n = count.get_num().get_si();
    std::vector<Rational> out;
    if (n == 1) out.push_back(a);
    for (long k = 0; n > 1 && k < n; ++k) {
      Rational v = a + (b - a) * Rational(k) / Rational(n - 1);
      v.canonicalize();
      out.push_back(v);
    }
    return out;
  }
  std::vector<Rational> out;
  for (const auto& item : split(body, ',')) {
    if (item.empty()) throw InvalidInput("empty entry in grid list '" + body + "'");
    out.push_back(parse_rational(item));
  }
  return out;
}

std::string_view to_string(SchemeChoice s) {
  switch (s) {
    case SchemeChoice::Euler: return "euler";
    case SchemeChoice::Kahan: return "kahan";
    case SchemeChoice::Reference: return "reference";
    case SchemeChoice::Modified: return "modified";
  }
  return "?";
}

SchemeChoice parse_scheme(std::string_view name) {
  if (name == "euler") return SchemeChoice::Euler;
  if (name == "kahan") return SchemeChoice::Kahan;
  if (name == "reference" || name == "original") return SchemeChoice::Reference;
  if (name == "modified") return SchemeChoice::Modified;
  throw InvalidInput("unknown scheme '" + std::string(name) + "'");
}

unsigned default_digits(CanonicalSystem system) {
  return system == CanonicalSystem::Transcritical ? 100 : 50;
}

Rational default_offset(CanonicalSystem system) {
  return system == CanonicalSystem::Transcritical ? Rational(1, 2000) : Rational(0);
}

RationalPoint default_start(CanonicalSystem system, const Rational& eps, const Rational& x0,
                            const Rational& offset) {
  if (system == CanonicalSystem::Transcritical) return {x0 - offset, x0 + offset};
  Rational y = x0 * x0 - eps / 2 + offset;
  y.canonicalize();
  return {x0, y};
}

namespace {

const std::vector<std::string> kScenarioKeys{"system", "schemes", "eps",    "h",       "lambda",
                                             "x0",     "y0",      "offset", "t_max",   "digits",
                                             "allow_low_digits",  "variant", "threshold", "out"};

}  // namespace

Scenario scenario_from(const KeyValues& kv) {
  kv.require_known(kScenarioKeys);
  Scenario s;
  s.system = parse_system(kv.get("system").value_or("fold"));
  const bool tc = s.system == CanonicalSystem::Transcritical;

  if (auto v = kv.get("schemes")) {
    s.schemes.clear();
    for (const auto& name : split(*v, ',')) s.schemes.push_back(parse_scheme(name));
    if (s.schemes.empty()) throw InvalidInput("schemes list is empty");
  }

  s.params.eps = tc ? Rational(1, 4) : Rational(1, 10);
  s.params.h = tc ? Rational(1, 10) : Rational(1, 100);
  if (auto v = kv.get("eps")) s.params.eps = parse_rational(*v);
  if (auto v = kv.get("h")) s.params.h = parse_rational(*v);
  if (auto v = kv.get("lambda")) s.params.lambda_p = parse_rational(*v);
  s.params.validate(canonical(s.system).is_slow_form_fold());

  const Rational x0 = kv.has("x0") ? parse_rational(*kv.get("x0")) : (tc ? Rational(-2) : Rational(-1, 2));
  const Rational offset = kv.has("offset") ? parse_rational(*kv.get("offset")) : default_offset(s.system);
  s.z0 = default_start(s.system, s.params.eps, x0, offset);
  if (auto v = kv.get("y0")) s.z0.y = parse_rational(*v);

  s.t_max = tc ? Rational(40) : Rational(4);
  if (auto v = kv.get("t_max")) s.t_max = parse_rational(*v);
  if (s.t_max <= 0) throw InvalidInput("t_max must be positive");

  s.digits = default_digits(s.system);
  if (auto v = kv.get("digits")) {
    const Rational d = parse_rational(*v);
    if (d.get_den() != 1 || d < kMinDigits || d > 100000) {
      throw InvalidInput("digits must be an integer in [" + std::to_string(kMinDigits) + ", 100000]");
    }
    s.digits = static_cast<unsigned>(d.get_num().get_ui());
  }
  const bool allow_low = kv.has("allow_low_digits") && parse_bool(*kv.get("allow_low_digits"));
  if (s.digits < default_digits(s.system) && !allow_low) {
    throw InvalidInput("digits " + std::to_string(s.digits) + " is below the default " +
                       std::to_string(default_digits(s.system)) + " for " + std::string(to_string(s.system)) +
                       "; set allow_low_digits = true (--allow-low-digits) to override");
  }

  if (auto v = kv.get("variant")) s.variant = parse_variant(*v);
  if (auto v = kv.get("threshold")) {
    s.threshold = parse_rational(*v).get_d();
    if (!(s.threshold > 0)) throw InvalidInput("threshold must be positive");
  }
  if (auto v = kv.get("out")) s.out = *v;
  return s;
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json schemes = nlohmann::json::array();
  for (auto c : s.schemes) schemes.push_back(std::string(to_string(c)));
  return {{"system", std::string(to_string(s.system))},
          {"schemes", schemes},
          {"eps", rational_to_string(s.params.eps)},
          {"h", rational_to_string(s.params.h)},
          {"lambda", rational_to_string(s.params.lambda_p)},
          {"x0", rational_to_string(s.z0.x)},
          {"y0", rational_to_string(s.z0.y)},
          {"t_max", rational_to_string(s.t_max)},
          {"digits", s.digits},
          {"variant", s.variant == ModifiedVariant::Engine ? "engine" : "paper"},
          {"threshold", s.threshold},
          {"out", s.out.string()}};
}

}  // namespace fastslow::app
