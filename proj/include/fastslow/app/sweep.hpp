#pragma once

#include <vector>

#include "fastslow/app/config.hpp"
#include "json.hpp"

namespace fastslow::app {

/// Cartesian grid eps x h x lambda x x0, enumerated in that order (x0 fastest).
struct SweepConfig {
  CanonicalSystem system = CanonicalSystem::Transcritical;
  std::vector<Rational> eps;
  std::vector<Rational> h;
  std::vector<Rational> lambda;
  std::vector<Rational> x0;
  /// Also iterate the Euler map from each x0 and record its escape.
  bool simulate = false;
  Rational t_max{100};
  unsigned digits = 100;
  Rational offset{1, 2000};
  double threshold = 0.1;
};

/// Keys: system, eps, h, lambda, x0 (grids, see parse_grid), simulate, t_max,
/// digits, allow_low_digits, offset, threshold.
SweepConfig sweep_from(const KeyValues& kv);

std::size_t grid_size(const SweepConfig& c);

/// Per-point classification, psi roots and exit times. A point that throws is
/// recorded with an "error" member and the sweep carries on. Points are
/// evaluated in parallel and reported by grid index.
nlohmann::json run_sweep(const SweepConfig& c, unsigned jobs = 1);

}  // namespace fastslow::app
