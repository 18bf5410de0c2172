#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fastslow/app/config.hpp"
#include "fastslow/integrate.hpp"
#include "json.hpp"

namespace fastslow::app {

struct SchemeRun {
  SchemeChoice scheme = SchemeChoice::Euler;
  Trajectory trajectory;
  /// Set when the run stopped early (divergence, singular step, stall); the
  /// trajectory then holds the samples computed before the failure.
  std::optional<std::string> terminated;
  std::optional<Escape> escape;
};

ManifoldSpec manifold_for(CanonicalSystem system, const Rational& eps);

/// Number of map steps covering [0, t_max]: floor(t_max / h).
std::size_t step_count(const Rational& t_max, const Rational& h);

/// One scheme of a scenario, no files written. Reference runs sample on the
/// map grid n h so that all CSVs of a scenario share time stamps.
SchemeRun run_scheme(const Scenario& s, SchemeChoice scheme);

std::string trajectory_csv(const Trajectory& traj);

nlohmann::json summarize(const SchemeRun& run);

struct RunResult {
  std::vector<SchemeRun> runs;
  std::vector<std::string> files;
  nlohmann::json manifest;
};

/// Runs every scheme of the scenario (in parallel over schemes), then writes
/// <scheme>.csv files and manifest.json into s.out from the calling thread.
RunResult simulate(const Scenario& s, unsigned jobs = 1);

}  // namespace fastslow::app
