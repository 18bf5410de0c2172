#include "fastslow/canard.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "fastslow/errors.hpp"
#include "fastslow/integrate.hpp"

namespace fastslow {

namespace {

// eps x - h x^2 + h eps/4: eps^2 times the common real part.
double half_trace_scaled(double x, double eps, double h) { return eps * x - h * x * x + h * eps / 4.0; }

// Orders (a, b) so that a has the larger modulus; ties go to Im >= 0.
void order_by_modulus(std::complex<double>& a, std::complex<double>& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (mb > ma || (mb == ma && b.imag() > a.imag())) std::swap(a, b);
}

}  // namespace

SpectrumSample fold_spectrum(double x, double eps, double h) {
  if (!(eps > 0)) throw InvalidInput("fold_spectrum needs eps > 0");
  const double eps2 = eps * eps;
  const double b = half_trace_scaled(x, eps, h);
  const double disc = b * b - eps2 * (eps - h * x);

  SpectrumSample s;
  s.x = x;
  s.trace = 2.0 * b / eps2;
  s.det = (eps - h * x) / eps2;
  s.discriminant = disc / (eps2 * eps2);
  if (disc >= 0) {
    const double r = std::sqrt(disc);
    const double q = b + std::copysign(r, b);
    const double big = q / eps2;
    // Product of the roots is det; avoids cancellation in the small one.
    const double small = (q != 0.0) ? s.det / big : 0.0;
    s.mu1 = big;
    s.mu2 = small;
  } else {
    const double im = std::sqrt(-disc) / eps2;
    s.mu1 = {b / eps2, im};
    s.mu2 = {b / eps2, -im};
  }
  return s;
}

SpectrumSample fold_spectrum_numeric(double x, double eps, double h) {
  static const Jacobian J = jacobian(derive_modified(canonical(CanonicalSystem::FoldSlow)).fh);
  const double y = x * x - eps / 2.0;
  const Assignment<double> a{x, y, eps, h, 0.0};
  Eigen::Matrix2d m;
  m << J[0][0].evaluate(a), J[0][1].evaluate(a), J[1][0].evaluate(a), J[1][1].evaluate(a);
  Eigen::EigenSolver<Eigen::Matrix2d> solver(m, false);
  std::complex<double> e0 = solver.eigenvalues()(0);
  std::complex<double> e1 = solver.eigenvalues()(1);
  order_by_modulus(e0, e1);

  SpectrumSample s;
  s.x = x;
  s.mu1 = e0;
  s.mu2 = e1;
  s.trace = m.trace();
  s.det = m.determinant();
  s.discriminant = s.trace * s.trace / 4.0 - s.det;
  return s;
}

double fold_growth_rate(double x, double eps, double h) { return fold_spectrum(x, eps, h).mu1.real(); }

double window_condition(double x, double eps, double h) {
  const double u = h / eps * x * x - h / 4.0 - x;
  return u * u - eps + h * x;
}

namespace {

double bisect(const std::function<double(double)>& g, double lo, double hi, double tol) {
  double glo = g(lo);
  for (int i = 0; i < 300 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Walks outward from `guess` (direction `dir`) until the condition turns
// positive; returns that outer point.
double outer_bracket(const std::function<double(double)>& g, double guess, double dir, double scale) {
  double d = 0.05 * scale;
  for (int i = 0; i < 60; ++i) {
    const double x = guess + dir * d;
    if (g(x) > 0) return x;
    d *= 2.0;
    if (d > 100.0 * scale) break;
  }
  throw BracketError("complex window: no sign change found; parameters outside the asymptotic regime");
}

}  // namespace

ComplexWindow complex_window(double eps, double h) {
  if (!(eps > 0) || h < 0 || !(h < eps)) throw InvalidInput("complex_window needs 0 <= h < eps");
  auto g = [&](double x) { return window_condition(x, eps, h); };
  if (!(g(0.0) < 0)) throw BracketError("complex window: eigenvalues are real at x = 0");
  const double root_eps = std::sqrt(eps);
  constexpr double kTol = 1e-13;

  const double left_guess = -root_eps + h / 4.0;
  const double right_guess = root_eps + h / 4.0;
  const double left_outer = outer_bracket(g, std::min(left_guess, 0.0), -1.0, root_eps);
  const double right_outer = outer_bracket(g, std::max(right_guess, 0.0), 1.0, root_eps);
  // Inner end: the guess itself when it is still inside, otherwise the origin.
  const double left_inner = (left_guess < 0 && g(left_guess) < 0) ? left_guess : 0.0;
  const double right_inner = (right_guess > 0 && g(right_guess) < 0) ? right_guess : 0.0;

  ComplexWindow w;
  w.x1 = bisect(g, left_outer, left_inner, kTol);
  w.x2 = bisect(g, right_inner, right_outer, kTol);
  return w;
}

TraceZero trace_zero(double eps, double h) {
  if (!(eps > 0) || h < 0 || !(h < eps)) throw InvalidInput("trace_zero needs 0 <= h < eps");
  const ComplexWindow w = complex_window(eps, h);
  auto b = [&](double x) { return half_trace_scaled(x, eps, h); };

  TraceZero r;
  r.x_star = bisect(b, w.x1, w.x2, 1e-14);
  r.closed_form = (h == 0.0) ? 0.0 : (eps - std::sqrt(eps * eps + h * h * eps)) / (2.0 * h);
  r.gap_to_minus_half_h = r.x_star + h / 2.0;
  r.gap_to_minus_quarter_h = r.x_star + h / 4.0;
  return r;
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth = 50;

  double run(double a, double b, double tol) const {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol, 0);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double mass = (b - a) / 12.0 * (std::abs(fa) + 4.0 * std::abs(flm) + 2.0 * std::abs(fm) +
                                          4.0 * std::abs(frm) + std::abs(fb));
    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= 1e-14 * mass || !(a < lm && rm < b)) {
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      throw QuadratureError("adaptive Simpson did not converge", left + right + delta / 15.0);
    }
    return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
  }
};

// Integral over [a, b] with mandatory panel breaks.
double integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                             const std::vector<double>& breaks, double tol) {
  if (b <= a) return 0.0;
  std::vector<double> pts{a};
  for (double s : breaks) {
    if (s > a && s < b) pts.push_back(s);
  }
  pts.push_back(b);
  // Breaks are square-root points of the integrand; s = lo + len (1 - cos(pi v)) / 2 makes
  // each segment smooth in v.
  const double pi = std::acos(-1.0);
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1], len = pts[i] - lo;
    const std::function<double(double)> g = [&f, lo, len, pi](double v) {
      return f(lo + len * (1.0 - std::cos(pi * v)) / 2.0) * len * pi * std::sin(pi * v) / 2.0;
    };
    const Simpson simpson{g};
    sum += simpson.run(0.0, 1.0, tol * len / (b - a));
  }
  return sum;
}

struct FoldPsiSetup {
  std::function<double(double)> integrand;
  std::vector<double> breaks;
};

FoldPsiSetup fold_psi_setup(double x0, double eps, double h) {
  const ComplexWindow w = complex_window(eps, h);
  if (!(x0 < w.x1)) throw InvalidInput("psi_fold needs x0 left of the complex window (attracting branch)");
  FoldPsiSetup s;
  s.integrand = [=](double t) { return fold_growth_rate(x0 + t / 2.0, eps, h); };
  s.breaks = {2.0 * (w.x1 - x0), 2.0 * (w.x2 - x0)};
  return s;
}

}  // namespace

double psi_fold_value(double x0, double eps, double h, double t, double tol) {
  const FoldPsiSetup s = fold_psi_setup(x0, eps, h);
  return integrate_with_breaks(s.integrand, 0.0, t, s.breaks, tol);
}

WayInOutResult psi_fold(double x0, double eps, double h, double t_max, const PsiFoldOptions& options) {
  if (!(t_max > 0)) throw InvalidInput("psi_fold needs t_max > 0");
  if (options.grid_points < 2) throw InvalidInput("psi_fold needs at least two grid points");
  const FoldPsiSetup s = fold_psi_setup(x0, eps, h);

  WayInOutResult r;
  r.x0 = x0;
  r.t0 = 0.0;
  const std::size_t n = options.grid_points;
  const double dt = t_max / static_cast<double>(n);
  r.psi_curve.reserve(n + 1);
  r.psi_curve.emplace_back(0.0, 0.0);
  double psi = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double a = dt * static_cast<double>(k - 1);
    const double b = (k == n) ? t_max : dt * static_cast<double>(k);
    psi += integrate_with_breaks(s.integrand, a, b, s.breaks, options.quadrature_tol * (b - a) / t_max);
    r.psi_curve.emplace_back(b, psi);
  }

  const auto& c = r.psi_curve;
  for (std::size_t k = 2; k <= n; ++k) {
    const double pa = c[k - 1].second, pb = c[k].second;
    const bool up = pa < 0 && pb > 0;
    const bool down = pa > 0 && pb < 0;
    double root = 0.0;
    if (up || down) {
      const double ta = c[k - 1].first;
      auto psi_at = [&](double t) {
        return pa + integrate_with_breaks(s.integrand, ta, t, s.breaks, options.quadrature_tol);
      };
      root = bisect(psi_at, ta, c[k].first, options.root_tol);
    } else if (pb == 0.0 && k < n) {
      // Grid point sits on a root: crossing or tangency.
      r.roots.push_back(c[k].first);
      if (pa < 0 && c[k + 1].second > 0 && !r.exit_time) r.exit_time = c[k].first;
      continue;
    } else {
      continue;
    }
    r.roots.push_back(root);
    if (up && !r.exit_time) r.exit_time = root;
  }
  return r;
}

double transcritical_eigenvalue(double x, double h) { return 2.0 * x * (1.0 - h * x); }

std::string_view to_string(TranscriticalCase c) {
  switch (c) {
    case TranscriticalCase::TwoRoots: return "TwoRoots";
    case TranscriticalCase::Tangency: return "Tangency";
    case TranscriticalCase::NoEscape: return "NoEscape";
  }
  return "?";
}

TranscriticalClassification classify_transcritical(const Rational& x0, const Rational& eps, const Rational& h) {
  if (eps <= 0 || h <= 0) throw InvalidInput("classify_transcritical needs eps, h > 0");
  if (x0 >= 0) throw InvalidInput("classify_transcritical needs x0 < 0 (attracting branch)");

  TranscriticalClassification c;
  c.x0 = x0;
  c.eps = eps;
  c.h = h;
  const Rational boundary = Rational(-1) / (2 * h);
  if (x0 < boundary) {
    c.kind = TranscriticalCase::NoEscape;
    return c;
  }
  if (x0 == boundary) {
    c.kind = TranscriticalCase::Tangency;
    Rational ts = Rational(3) / (2 * h * eps);
    ts.canonicalize();
    c.t_star = ts;
    c.t1 = c.t2 = ts.get_d();
    return c;
  }
  // -f(t) = A t^2 - B t - C with C < 0: two positive roots.
  const Rational A = Rational(2, 3) * eps * eps * h;
  const Rational B = eps * (1 - 2 * h * x0);
  const Rational C = 2 * x0 * (1 - h * x0);
  const Rational D = B * B + 4 * A * C;
  constexpr unsigned kDigits = 40;
  const BigReal sqrt_d = sqrt(BigReal(D, kDigits));
  const BigReal a(A, kDigits);
  const BigReal t2 = (BigReal(B, kDigits) + sqrt_d) / (BigReal(2L, kDigits) * a);
  const BigReal t1 = BigReal(Rational(-C), kDigits) / (a * t2);
  c.kind = TranscriticalCase::TwoRoots;
  c.t1 = t1.to_double();
  c.t2 = t2.to_double();
  return c;
}

NormalFormReport normal_form_report(const Rational& eps, const Rational& h) {
  if (h <= 0 || eps <= 0 || h >= eps) throw InvalidInput("normal_form_report needs 0 < h < eps");
  NormalFormReport r;
  r.h_tilde = h / eps;
  r.h_tilde.canonicalize();
  const Rational half = r.h_tilde / 2;
  r.a = {half, Rational(-r.h_tilde), Rational(-r.h_tilde), Rational(-half), half};
  for (auto& v : r.a) v.canonicalize();
  r.A = 0;
  r.lambda_H = -h / 2;
  r.lambda_H.canonicalize();
  r.lambda_C = r.lambda_H;
  return r;
}

std::array<RationalPoly, 6> normal_form_factors() {
  using namespace sym;
  return {c(1) - h() * x(),         c(1) - h() * x(), c(1, 2) * h() * (x() - lam()),
          c(1) - c(1, 2) * h() * x(), c(1),             c(1, 2) * h()};
}

HopfProbeResult hopf_probe(const Rational& eps, const Rational& h, const Rational& lambda_p, double horizon,
                           const HopfProbeOptions& options) {
  if (!(horizon > 0)) throw InvalidInput("hopf_probe needs horizon > 0");
  SystemParams p{eps, h, lambda_p};
  const PolyVectorField f = canonical(CanonicalSystem::FoldLambda);
  p.validate(f.is_slow_form_fold());

  const Rational x_eq = lambda_p;
  const Rational y_eq = lambda_p * lambda_p;
  const RationalPoint z0{x_eq + options.offset, y_eq};
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / h.get_d()));

  Trajectory traj;
  bool diverged = false;
  try {
    traj = euler_iterate(f, z0, p, n_steps, options.digits);
  } catch (const DivergenceError& e) {
    traj = e.partial();
    diverged = true;
  }

  HopfProbeResult r;
  const double xe = x_eq.get_d(), ye = y_eq.get_d();
  auto dist = [&](const Sample& s) { return std::hypot(s.x.to_double() - xe, s.y.to_double() - ye); };
  r.initial_distance = dist(traj.samples.front());
  for (const Sample& s : traj.samples) {
    const double d = dist(s);
    r.max_distance = std::max(r.max_distance, d);
    if (d > options.radius) {
      r.outcome = HopfOutcome::Escaped;
      r.escape_time = s.t.to_double();
      r.final_distance = d;
      return r;
    }
  }
  r.final_distance = dist(traj.back());
  if (diverged) {
    r.outcome = HopfOutcome::Escaped;
    r.escape_time = traj.back().t.to_double() + h.get_d();
  }
  return r;
}

}  // namespace fastslow
