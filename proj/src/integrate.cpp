#include "fastslow/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace fastslow {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::EulerMap: return "euler";
    case Scheme::KahanMap: return "kahan";
    case Scheme::ReferenceODE: return "reference";
  }
  return "?";
}

namespace {

void check_map_inputs(const PolyVectorField& f0, const SystemParams& p, unsigned digits) {
  if (digits < kMinDigits) throw InvalidInput("digits must be at least 16");
  p.validate(f0.is_slow_form_fold());
}

bool escaped(const BigReal& x, const BigReal& y, const BigReal& bound) {
  return !x.is_finite() || !y.is_finite() || abs(x) > bound || abs(y) > bound;
}

std::string step_message(const char* what, std::size_t n) {
  std::ostringstream os;
  os << what << " at step " << n;
  return os.str();
}

}  // namespace

Trajectory euler_iterate(const PolyVectorField& f0, const RationalPoint& z0, const SystemParams& p,
                         std::size_t n_steps, unsigned digits) {
  check_map_inputs(f0, p, digits);
  const BigReal like(0L, digits);
  const NumericField<BigReal> field(f0, p, like);
  const BigReal h(p.h, digits);
  const BigReal bound(kDivergenceBound, digits);

  Trajectory traj{{}, Scheme::EulerMap, p, digits};
  traj.samples.reserve(n_steps + 1);
  BigReal x(z0.x, digits);
  BigReal y(z0.y, digits);
  traj.samples.push_back({like, x, y});
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const Point<BigReal> v = field(x, y);
    x += h * v.x;
    y += h * v.y;
    if (escaped(x, y, bound)) {
      throw DivergenceError(step_message("euler map diverged", n), n, std::move(traj));
    }
    traj.samples.push_back({BigReal(Rational(static_cast<long>(n)) * p.h, digits), x, y});
  }
  return traj;
}

Trajectory kahan_iterate(const PolyVectorField& f0, const RationalPoint& z0, const SystemParams& p,
                         std::size_t n_steps, unsigned digits) {
  check_map_inputs(f0, p, digits);
  const BigReal like(0L, digits);
  const NumericField<BigReal> field(f0, p, like);
  const NumericJacobian<BigReal> jac(f0, p, like);
  const BigReal h(p.h, digits);
  const BigReal half_h = h / BigReal(2L, digits);
  const BigReal one(1L, digits);
  const BigReal bound(kDivergenceBound, digits);
  const BigReal det_floor = pow(BigReal(10L, digits), -static_cast<long>(digits) + 4);

  Trajectory traj{{}, Scheme::KahanMap, p, digits};
  traj.samples.reserve(n_steps + 1);
  BigReal x(z0.x, digits);
  BigReal y(z0.y, digits);
  traj.samples.push_back({like, x, y});
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const Point<BigReal> v = field(x, y);
    const auto J = jac(x, y);
    const BigReal a = one - half_h * J[0][0];
    const BigReal b = -(half_h * J[0][1]);
    const BigReal c = -(half_h * J[1][0]);
    const BigReal d = one - half_h * J[1][1];
    const BigReal det = a * d - b * c;
    if (abs(det) < det_floor) {
      throw SingularStepError(step_message("kahan step singular", n), n, std::move(traj));
    }
    const BigReal dx = (d * v.x - b * v.y) / det;
    const BigReal dy = (a * v.y - c * v.x) / det;
    x += h * dx;
    y += h * dy;
    if (escaped(x, y, bound)) {
      throw DivergenceError(step_message("kahan map diverged", n), n, std::move(traj));
    }
    traj.samples.push_back({BigReal(Rational(static_cast<long>(n)) * p.h, digits), x, y});
  }
  return traj;
}

Trajectory iterate_map(Scheme scheme, const PolyVectorField& f0, const RationalPoint& z0,
                       const SystemParams& p, std::size_t n_steps, unsigned digits) {
  switch (scheme) {
    case Scheme::EulerMap: return euler_iterate(f0, z0, p, n_steps, digits);
    case Scheme::KahanMap: return kahan_iterate(f0, z0, p, n_steps, digits);
    case Scheme::ReferenceODE: break;
  }
  throw InvalidInput("iterate_map needs a map scheme");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::array<double, 2>;

}  // namespace

Trajectory reference_solve(const PolyVectorField& f, Point<double> z0, const SystemParams& p, double t0,
                           double t1, const ReferenceOptions& options) {
  if (options.abstol < 1e-14 || options.reltol < 1e-14) throw InvalidInput("tolerances must be >= 1e-14");
  if (!(t1 > t0)) throw InvalidInput("reference_solve needs t1 > t0");

  const NumericField<double> field(f, p, 0.0);
  auto rhs = [&](const State& z) {
    const Point<double> v = field(z[0], z[1]);
    return State{v.x, v.y};
  };

  constexpr unsigned kDigits = 17;
  Trajectory traj{{}, Scheme::ReferenceODE, p, kDigits};
  auto emit = [&](double t, const State& z) {
    traj.samples.push_back({BigReal(t, kDigits), BigReal(z[0], kDigits), BigReal(z[1], kDigits)});
  };

  // Output times closer than `snap` are merged; the last one is always t1.
  const double snap = 1e-12 * std::max(1.0, std::max(std::abs(t0), std::abs(t1)));
  std::vector<double> requested;
  for (double t : options.output_times) {
    if (t > t0 + snap && t < t1 - snap) requested.push_back(t);
  }
  std::sort(requested.begin(), requested.end());
  std::vector<double> outputs;
  for (double t : requested) {
    if (outputs.empty() || t - outputs.back() > snap) outputs.push_back(t);
  }
  outputs.push_back(t1);
  const bool every_step = options.output_times.empty();

  State z{z0.x, z0.y};
  double t = t0;
  emit(t, z);
  std::size_t next_out = 0;

  const double span = t1 - t0;
  double h = 1e-4 * span;
  double err_prev = 1e-4;
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kBeta = 0.04, kAlpha = 0.2 - kBeta * 0.75;

  State k1 = rhs(z);
  bool rejected = false;
  for (std::size_t step = 0; step < options.max_steps; ++step) {
    const double target = outputs[next_out];
    bool lands = false;
    double h_try = h;
    if (t + h_try >= target) {
      h_try = target - t;
      lands = true;
    }
    if (h_try < 1e-14 * std::max(1.0, std::abs(t))) {
      throw SolverStallError("reference solver step size underflow at t=" + std::to_string(t), step,
                             std::move(traj));
    }

    State tmp, k2, k3, k4, k5, k6, k7, znew;
    for (int i = 0; i < 2; ++i) tmp[i] = z[i] + h_try * a21 * k1[i];
    k2 = rhs(tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = z[i] + h_try * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = z[i] + h_try * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(tmp);
    for (int i = 0; i < 2; ++i)
      tmp[i] = z[i] + h_try * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(tmp);
    for (int i = 0; i < 2; ++i)
      tmp[i] = z[i] + h_try * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(tmp);
    for (int i = 0; i < 2; ++i)
      znew[i] = z[i] + h_try * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(znew);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e =
          h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = options.abstol + options.reltol * std::max(std::abs(z[i]), std::abs(znew[i]));
      err += (e / scale) * (e / scale);
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err)) {
      // Blow-up inside the stage evaluations: shrink hard and retry.
      h = h_try * kMinFactor;
      rejected = true;
      continue;
    }

    if (err <= 1.0) {
      t = lands ? target : t + h_try;
      z = znew;
      k1 = k7;
      if (!std::isfinite(z[0]) || !std::isfinite(z[1]) || std::abs(z[0]) > kDivergenceBound ||
          std::abs(z[1]) > kDivergenceBound) {
        throw DivergenceError("reference solution diverged at t=" + std::to_string(t), step, std::move(traj));
      }
      if (lands) {
        emit(t, z);
        ++next_out;
        if (next_out == outputs.size()) return traj;
      } else if (every_step) {
        emit(t, z);
      }
      double factor = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      if (rejected) factor = std::min(factor, 1.0);
      // A landing step may be artificially short; do not let it shrink the next one.
      h = lands ? std::max(h, h_try * factor) : h_try * factor;
      err_prev = std::max(err, 1e-4);
      rejected = false;
    } else {
      h = h_try * std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
      rejected = true;
    }
  }
  throw SolverStallError("reference solver exceeded max_steps", options.max_steps, std::move(traj));
}

std::vector<double> map_time_grid(const Rational& h, std::size_t n_steps) {
  std::vector<double> out;
  out.reserve(n_steps);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    out.push_back(Rational(Rational(static_cast<long>(n)) * h).get_d());
  }
  return out;
}

BigReal ManifoldSpec::residual(const BigReal& x, const BigReal& y) const {
  if (kind == ManifoldKind::TranscriticalLine) return y - x;
  return y - x * x + BigReal(Rational(eps / 2), x.digits());
}

double ManifoldSpec::residual(double x, double y) const {
  if (kind == ManifoldKind::TranscriticalLine) return y - x;
  return y - x * x + Rational(eps / 2).get_d();
}

std::optional<Escape> escape_time(const Trajectory& traj, const ManifoldSpec& m, double threshold) {
  if (!(threshold > 0)) throw InvalidInput("escape threshold must be positive");
  bool armed = false;
  const double arm_level = threshold / 10.0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const Sample& s = traj.samples[i];
    const double r = std::abs(m.residual(s.x, s.y).to_double());
    if (!armed) {
      armed = r <= arm_level;
    } else if (r > threshold) {
      return Escape{s.t.to_double(), i};
    }
  }
  return std::nullopt;
}

FirstIntegralValue fold_first_integral(const BigReal& x, const BigReal& y, const Rational& eps) {
  const unsigned digits = std::max(x.digits(), y.digits());
  const BigReal e(eps, digits);
  BigReal exponent = BigReal(-2L, digits) * y / e;
  const BigReal cap(kMaxFirstIntegralExponent, digits);
  bool clamped = false;
  if (exponent > cap) {
    exponent = cap;
    clamped = true;
  }
  BigReal factor = y - x * x + e / BigReal(2L, digits);
  return {exp(exponent) * factor, clamped};
}

DriftReport first_integral_drift(const Trajectory& traj, const Rational& eps) {
  DriftReport report;
  if (traj.empty()) return report;
  const FirstIntegralValue h0 = fold_first_integral(traj.samples[0].x, traj.samples[0].y, eps);
  report.clamped = h0.clamped;
  for (const Sample& s : traj.samples) {
    const FirstIntegralValue hv = fold_first_integral(s.x, s.y, eps);
    report.clamped = report.clamped || hv.clamped;
    report.max_drift = std::max(report.max_drift, abs(hv.value - h0.value).to_double());
  }
  return report;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const unsigned sig = std::min(traj.digits, 30u);
  os << "t,x,y\n";
  for (const Sample& s : traj.samples) {
    os << s.t.to_string(sig) << ',' << s.x.to_string(sig) << ',' << s.y.to_string(sig) << '\n';
  }
}

}  // namespace fastslow
