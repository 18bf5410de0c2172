#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fastslow/big_real.hpp"
#include "fastslow/errors.hpp"
#include "fastslow/vector_field.hpp"

namespace fastslow {

enum class Scheme { EulerMap, KahanMap, ReferenceODE };

std::string_view to_string(Scheme s);

struct Sample {
  BigReal t;
  BigReal x;
  BigReal y;
};

/// Ordered samples of one run. Map schemes stamp t_n = n h exactly.
struct Trajectory {
  std::vector<Sample> samples;
  Scheme scheme = Scheme::EulerMap;
  SystemParams params;
  unsigned digits = kMinDigits;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  const Sample& back() const { return samples.back(); }
};

/// Failure that still carries everything computed before it happened.
class TrajectoryError : public Error {
 public:
  TrajectoryError(const std::string& what, std::size_t step, Trajectory partial)
      : Error(what), step_(step), partial_(std::move(partial)) {}
  std::size_t step() const noexcept { return step_; }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  Trajectory partial_;
};

/// |z| exceeded the divergence guard.
class DivergenceError : public TrajectoryError {
 public:
  using TrajectoryError::TrajectoryError;
};

/// Kahan step whose linear system is numerically singular.
class SingularStepError : public TrajectoryError {
 public:
  using TrajectoryError::TrajectoryError;
};

/// Adaptive step size underflow.
class SolverStallError : public TrajectoryError {
 public:
  using TrajectoryError::TrajectoryError;
};

inline constexpr double kDivergenceBound = 1e10;

Trajectory euler_iterate(const PolyVectorField& f0, const RationalPoint& z0, const SystemParams& p,
                         std::size_t n_steps, unsigned digits);

/// z + h (Id - h/2 Df(z))^-1 f(z), each 2x2 solve at working precision.
Trajectory kahan_iterate(const PolyVectorField& f0, const RationalPoint& z0, const SystemParams& p,
                         std::size_t n_steps, unsigned digits);

Trajectory iterate_map(Scheme scheme, const PolyVectorField& f0, const RationalPoint& z0,
                       const SystemParams& p, std::size_t n_steps, unsigned digits);

struct ReferenceOptions {
  double abstol = 1e-12;
  double reltol = 1e-12;
  /// Requested sample times inside (t0, t1]; t0 and t1 are always emitted.
  /// Empty: one sample per accepted step.
  std::vector<double> output_times;
  std::size_t max_steps = 5'000'000;
};

/// Dormand-Prince 5(4) with PI step control, initial step 1e-4 * span. Steps are
/// shortened to land exactly on requested output times.
Trajectory reference_solve(const PolyVectorField& f, Point<double> z0, const SystemParams& p, double t0,
                           double t1, const ReferenceOptions& options = {});

/// Output times n*h for n = 1..n_steps, the grid of a map run.
std::vector<double> map_time_grid(const Rational& h, std::size_t n_steps);

enum class ManifoldKind { FoldSlowManifold, TranscriticalLine };

/// Residual r with r = 0 on the manifold: y - x^2 + eps/2 for the fold slow
/// manifold, y - x for the transcritical line.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::FoldSlowManifold;
  Rational eps{1, 10};

  static ManifoldSpec fold(const Rational& eps) { return {ManifoldKind::FoldSlowManifold, eps}; }
  static ManifoldSpec transcritical() { return {ManifoldKind::TranscriticalLine, 0}; }

  BigReal residual(const BigReal& x, const BigReal& y) const;
  double residual(double x, double y) const;
};

struct Escape {
  double t;
  std::size_t index;
};

inline constexpr double kDefaultEscapeThreshold = 0.1;

/// First sample with |residual| > threshold after the run has once been within
/// threshold/10 of the manifold.
std::optional<Escape> escape_time(const Trajectory& traj, const ManifoldSpec& m,
                                  double threshold = kDefaultEscapeThreshold);

struct FirstIntegralValue {
  BigReal value;
  bool clamped = false;
};

/// H(x, y) = exp(-2y/eps) (y - x^2 + eps/2), conserved by the fold ODE. The
/// exponent is clamped at kMaxFirstIntegralExponent.
FirstIntegralValue fold_first_integral(const BigReal& x, const BigReal& y, const Rational& eps);

inline constexpr long kMaxFirstIntegralExponent = 100000;

struct DriftReport {
  double max_drift = 0.0;
  bool clamped = false;
};

/// max |H(sample) - H(first sample)| over the run.
DriftReport first_integral_drift(const Trajectory& traj, const Rational& eps);

/// Header `t,x,y`, one row per sample at min(digits, 30) significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fastslow
