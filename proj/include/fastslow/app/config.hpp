#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastslow/big_real.hpp"
#include "fastslow/modified.hpp"
#include "fastslow/vector_field.hpp"
#include "json.hpp"

namespace fastslow::app {

/// Flat `key = value` configuration. `#` starts a comment; blank lines are
/// ignored; a repeated key is an error.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws InvalidInput naming the first key outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

bool parse_bool(std::string_view text);

/// "a,b,c" as a list, "start:stop:count" as an inclusive linspace in exact
/// arithmetic, "" as an empty list.
std::vector<Rational> parse_grid(std::string_view text);

enum class SchemeChoice { Euler, Kahan, Reference, Modified };

std::string_view to_string(SchemeChoice s);
SchemeChoice parse_scheme(std::string_view name);

unsigned default_digits(CanonicalSystem system);

/// Start point used when y0 is not given. Fold family: on y = x^2 - eps/2,
/// shifted by `offset` in y. Transcritical: (x0 - offset, x0 + offset), off the
/// line y = x in the orthogonal direction so that (x + y)/2 = x0.
RationalPoint default_start(CanonicalSystem system, const Rational& eps, const Rational& x0,
                            const Rational& offset);

Rational default_offset(CanonicalSystem system);

struct Scenario {
  CanonicalSystem system = CanonicalSystem::FoldSlow;
  std::vector<SchemeChoice> schemes{SchemeChoice::Euler};
  SystemParams params;
  RationalPoint z0;
  Rational t_max{4};
  unsigned digits = 50;
  ModifiedVariant variant = ModifiedVariant::Engine;
  double threshold = 0.1;
  std::filesystem::path out{"out"};
};

/// Keys: system, schemes, eps, h, lambda, x0, y0, offset, t_max, digits,
/// allow_low_digits, variant, threshold, out. Digits below the system default
/// need allow_low_digits = true.
Scenario scenario_from(const KeyValues& kv);

nlohmann::json to_json(const Scenario& s);

}  // namespace fastslow::app
