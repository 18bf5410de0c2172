#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fastslow/big_real.hpp"
#include "fastslow/modified.hpp"
#include "fastslow/rational_poly.hpp"

namespace fastslow {

// ---------------------------------------------------------------------------
// Fold: spectrum of the modified Euler field along S_eps = {y = x^2 - eps/2}
// ---------------------------------------------------------------------------

/// Eigenvalues at (x, x^2 - eps/2). mu1 has the larger modulus; for a complex
/// pair mu1 is the one with non-negative imaginary part.
struct SpectrumSample {
  double x = 0.0;
  std::complex<double> mu1;
  std::complex<double> mu2;
  double trace = 0.0;
  double det = 0.0;
  /// tr^2/4 - det; negative strictly inside the complex window.
  double discriminant = 0.0;
};

/// Closed-form eigenvalues of the linearised modified fold field on S_eps.
SpectrumSample fold_spectrum(double x, double eps, double h);

/// Same quantity by a different route: the symbolic Jacobian of the derived
/// modified field, evaluated at the point and handed to a dense eigensolver.
SpectrumSample fold_spectrum_numeric(double x, double eps, double h);

/// Real part of the max-modulus eigenvalue, the way-in/way-out integrand.
double fold_growth_rate(double x, double eps, double h);

/// Residual of the window boundary condition
/// (h x^2/eps - h/4 - x)^2 - eps + h x.
double window_condition(double x, double eps, double h);

struct ComplexWindow {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Roots of window_condition bracketing x = 0, refined by bisection from the
/// first-order guesses +-sqrt(eps) + h/4. Requires 0 <= h < eps.
ComplexWindow complex_window(double eps, double h);

struct TraceZero {
  double x_star = 0.0;
  /// (eps - sqrt(eps^2 + h^2 eps)) / (2h), 0 at h = 0.
  double closed_form = 0.0;
  double gap_to_minus_half_h = 0.0;
  double gap_to_minus_quarter_h = 0.0;
};

/// Root of Re mu1 inside the complex window, bisected to 1e-14.
TraceZero trace_zero(double eps, double h);

struct WayInOutResult {
  double x0 = 0.0;
  double t0 = 0.0;
  std::vector<std::pair<double, double>> psi_curve;
  std::vector<double> roots;
  std::optional<double> exit_time;
};

struct PsiFoldOptions {
  std::size_t grid_points = 10000;
  double quadrature_tol = 1e-10;
  double root_tol = 1e-12;
};

/// Psi(t) = int_0^t Re mu1(x0 + s/2) ds by adaptive Simpson, with panel
/// breaks where x(s) crosses the window boundaries.
WayInOutResult psi_fold(double x0, double eps, double h, double t_max, const PsiFoldOptions& options = {});

/// Psi at a single time (same quadrature, no root search).
double psi_fold_value(double x0, double eps, double h, double t, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Transcritical
// ---------------------------------------------------------------------------

/// 2x(1 - hx): transverse eigenvalue of the printed modified equation on y = x.
double transcritical_eigenvalue(double x, double h);

/// Psi along y = x = x0 + eps t. Printed form:
/// 2 x0 (1 - h x0) t + eps t^2 - 2 eps h x0 t^2 - 2/3 eps^2 h t^3. The engine
/// form of the modified equation has eigenvalue 2x(1-hx) - h eps, which
/// subtracts h eps t.
template <class T>
T psi_transcritical(const T& x0, const T& eps, const T& h, const T& t,
                    ModifiedVariant variant = ModifiedVariant::Printed) {
  const T one(1), two(2), three(3);
  T psi = two * x0 * (one - h * x0) * t + eps * t * t - two * eps * h * x0 * t * t -
          two / three * eps * eps * h * t * t * t;
  if (variant == ModifiedVariant::Engine) psi -= h * eps * t;
  return psi;
}

/// f(t) with Psi(t) = t f(t) (printed form).
template <class T>
T psi_transcritical_quotient(const T& x0, const T& eps, const T& h, const T& t) {
  const T one(1), two(2), three(3);
  return two * x0 * (one - h * x0) + (eps - two * eps * h * x0) * t - two / three * eps * eps * h * t * t;
}

enum class TranscriticalCase { TwoRoots, Tangency, NoEscape };

std::string_view to_string(TranscriticalCase c);

struct TranscriticalClassification {
  TranscriticalCase kind = TranscriticalCase::NoEscape;
  double t1 = 0.0;
  double t2 = 0.0;
  /// Exact tangency time 3/(2 h eps), set for Tangency.
  std::optional<Rational> t_star;
  Rational x0;
  Rational h;
  Rational eps;
};

/// Exact case split of x0 against -1/(2h). Requires eps, h > 0 and x0 < 0.
TranscriticalClassification classify_transcritical(const Rational& x0, const Rational& eps, const Rational& h);

// ---------------------------------------------------------------------------
// Fold with unfolding parameter: normal form and Hopf probe
// ---------------------------------------------------------------------------

struct NormalFormReport {
  Rational h_tilde;
  std::array<Rational, 5> a;
  Rational A;
  Rational lambda_H;
  Rational lambda_C;
};

/// Leading-order constants of the modified fast-time fold in canard-point
/// normal form. Requires 0 < h < eps.
NormalFormReport normal_form_report(const Rational& eps, const Rational& h);

/// Factors h1..h6 of the normal form as polynomials in x, y, lambda with the
/// step symbol h standing for h/eps.
std::array<RationalPoly, 6> normal_form_factors();

enum class HopfOutcome { Bounded, Escaped };

struct HopfProbeResult {
  HopfOutcome outcome = HopfOutcome::Bounded;
  std::optional<double> escape_time;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double max_distance = 0.0;
};

struct HopfProbeOptions {
  double radius = 0.5;
  /// Start at (lambda + offset, lambda^2).
  Rational offset{1, 20};
  unsigned digits = 50;
};

/// Euler map of the lambda-unfolded slow fold started near (lambda, lambda^2).
/// Bounded when the orbit stays within `radius` of the equilibrium until
/// `horizon`.
HopfProbeResult hopf_probe(const Rational& eps, const Rational& h, const Rational& lambda_p, double horizon,
                           const HopfProbeOptions& options = {});

}  // namespace fastslow
