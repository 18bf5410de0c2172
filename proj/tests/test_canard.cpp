#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "fastslow/canard.hpp"

using namespace fastslow;
using namespace fastslow::sym;
using cd = std::complex<double>;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// Jacobian of the modified fold field differentiated by hand, at (x, x^2 - eps/2).
struct Eig {
  cd big, small;
};

Eig hand_eigenvalues(double x, double eps, double h) {
  const double y = x * x - eps / 2;
  const double a = 2 * x / eps + h * (-(3 * x * x - y) / (eps * eps) + 1 / (2 * eps));
  const double b = -1 / eps + h * x / (eps * eps);
  const double c = 1 - h * x / eps;
  const double d = h / (2 * eps);
  const double tr = a + d, det = a * d - b * c;
  const cd root = std::sqrt(cd(tr * tr / 4 - det, 0));
  cd m1 = tr / 2 + root, m2 = tr / 2 - root;
  if (std::abs(m2) > std::abs(m1)) std::swap(m1, m2);
  return {m1, m2};
}

double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Composite 5-point Gauss-Legendre on [a, b] with n panels.
template <class F>
double gauss_legendre(F f, double a, double b, int n) {
  static const double xs[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double ws[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  double sum = 0;
  const double w = (b - a) / n;
  for (int k = 0; k < n; ++k) {
    const double lo = a + k * w, mid = lo + w / 2;
    for (int i = 0; i < 5; ++i) sum += ws[i] * f(mid + xs[i] * w / 2) * w / 2;
  }
  return sum;
}

// Psi of the fold by Gauss-Legendre, split at the window crossings.
double fold_psi_oracle(double x0, double eps, double h, double t) {
  const auto w = complex_window(eps, h);
  std::vector<double> pts{0.0};
  for (double s : {2 * (w.x1 - x0), 2 * (w.x2 - x0)}) {
    if (s > 0 && s < t) pts.push_back(s);
  }
  pts.push_back(t);
  // s = a + (b - a)(1 - cos(pi v)) / 2 smooths the square-root behaviour at the window edges.
  const double pi = std::acos(-1.0);
  double sum = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1], len = pts[i] - a;
    sum += gauss_legendre(
        [&](double v) {
          const double s = a + len * (1 - std::cos(pi * v)) / 2;
          return hand_eigenvalues(x0 + s / 2, eps, h).big.real() * len * pi * std::sin(pi * v) / 2;
        },
        0.0, 1.0, 400);
  }
  return sum;
}

}  // namespace

TEST_CASE("spectrum invariants and hand-derived eigenvalues") {
  for (int i = 0; i <= 200; ++i) {
    const double x = -0.5 + i / 200.0;
    const auto s = fold_spectrum(x, 0.1, 0.01);
    CHECK(rel(s.mu1 + s.mu2, cd(s.trace, 0)) <= 1e-12);
    CHECK(rel(s.mu1 * s.mu2, cd(s.det, 0)) <= 1e-12);
    CHECK(std::abs(s.mu1) >= std::abs(s.mu2) * (1 - 1e-14));
    CHECK(s.trace == doctest::Approx((2 * 0.1 * x - 2 * 0.01 * x * x + 0.01 * 0.1 / 2) / 0.01).epsilon(1e-12));
    CHECK(s.det == doctest::Approx((0.1 - 0.01 * x) / 0.01).epsilon(1e-12));
    const Eig e = hand_eigenvalues(x, 0.1, 0.01);
    CHECK(rel(s.mu1, e.big) <= 1e-9);
    CHECK(rel(s.mu2, e.small) <= 1e-9);
    if (s.mu1.imag() != 0) CHECK(s.mu1.imag() > 0);
  }
}

TEST_CASE("closed-form spectrum agrees with the eigensolver") {
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -0.5 + i / 999.0;
    const auto a = fold_spectrum(x, 0.1, 0.01);
    const auto b = fold_spectrum_numeric(x, 0.1, 0.01);
    worst = std::max({worst, rel(a.mu1, b.mu1), rel(a.mu2, b.mu2)});
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("spectrum examples") {
  const auto w = complex_window(0.1, 0.01);
  for (int i = 0; i <= 1000; ++i) {
    const double x = -0.5 + i / 1000.0;
    const auto s = fold_spectrum(x, 0.1, 0.01);
    if (x > w.x1 + 1e-9 && x < w.x2 - 1e-9) {
      CHECK(s.mu1.imag() != 0);
      CHECK(s.discriminant < 0);
    }
    if (x < w.x1 - 1e-9 || x > w.x2 + 1e-9) {
      CHECK(s.mu1.imag() == 0);
      CHECK(s.discriminant > 0);
    }
  }
  const auto at = fold_spectrum(-0.4, 0.1, 0.01);
  CHECK(at.mu1.imag() == 0);
  CHECK(at.mu2.imag() == 0);
  CHECK(at.mu1.real() < 0);
  CHECK(at.mu2.real() < 0);

  // h = 0: purely imaginary at x = 0 and real part x/eps inside the window.
  const auto zero = fold_spectrum(0.0, 0.1, 0.0);
  CHECK(std::abs(zero.mu1.real()) < 1e-14);
  CHECK(zero.mu1.imag() == doctest::Approx(1 / std::sqrt(0.1)));
  const auto inside = fold_spectrum(0.2, 0.1, 0.0);
  CHECK(inside.mu1.real() == doctest::Approx(2.0));
  CHECK(inside.mu2.real() == doctest::Approx(2.0));

  CHECK_THROWS_AS(fold_spectrum(0.0, 0.0, 0.01), InvalidInput);
  CHECK(fold_growth_rate(-0.4, 0.1, 0.01) == doctest::Approx(at.mu1.real()));
}

TEST_CASE("complex window") {
  const auto w = complex_window(0.1, 0.01);
  CHECK(w.x1 == doctest::Approx(-0.314).epsilon(0.005 / 0.314));
  CHECK(std::abs(w.x1 + 0.314) <= 5e-3);
  CHECK(std::abs(w.x2 - 0.319) <= 5e-3);
  CHECK(std::abs(window_condition(w.x1, 0.1, 0.01)) <= 1e-10);
  CHECK(std::abs(window_condition(w.x2, 0.1, 0.01)) <= 1e-10);
  CHECK(std::abs(w.x1 + w.x2) > 1e-3);

  const auto w0 = complex_window(0.1, 0.0);
  CHECK(std::abs(w0.x1 + std::sqrt(0.1)) <= 1e-12);
  CHECK(std::abs(w0.x2 - std::sqrt(0.1)) <= 1e-12);
  CHECK(std::abs(w0.x1 + w0.x2) <= 1e-12);

  const auto ws = complex_window(0.1, 0.001);
  CHECK(std::abs(ws.x1 - (-std::sqrt(0.1) + 0.00025)) <= 1e-5);
  CHECK(std::abs(ws.x2 - (std::sqrt(0.1) + 0.00025)) <= 1e-5);

  CHECK_THROWS_AS(complex_window(0.1, 0.1), InvalidInput);
  CHECK_THROWS_AS(complex_window(0.1, -0.01), InvalidInput);
}

TEST_CASE("trace zero") {
  const auto tz = trace_zero(0.1, 0.01);
  const double oracle = (0.1 - std::sqrt(0.01 + 0.0001 * 0.1)) / 0.02;
  CHECK(std::abs(tz.x_star - oracle) <= 1e-12);
  CHECK(std::abs(tz.closed_form - oracle) <= 1e-15);
  CHECK(tz.gap_to_minus_half_h == doctest::Approx(tz.x_star + 0.005));
  CHECK(tz.gap_to_minus_quarter_h == doctest::Approx(tz.x_star + 0.0025));
  CHECK(std::abs(tz.gap_to_minus_quarter_h) < std::abs(tz.gap_to_minus_half_h));
  CHECK(fold_growth_rate(tz.x_star, 0.1, 0.01) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(trace_zero(0.1, 1e-8).x_star) < 1e-8);
  CHECK(trace_zero(0.1, 0.0).x_star == doctest::Approx(0.0));
}

TEST_CASE("fold psi against Gauss-Legendre") {
  for (double x0 : {-0.5, -0.45, -0.35}) {
    for (double t : {0.1, 0.5, 1.0, 1.7, 2.3, 3.0}) {
      CHECK(std::abs(psi_fold_value(x0, 0.1, 0.01, t) - fold_psi_oracle(x0, 0.1, 0.01, t)) <= 1e-10);
    }
  }
}

TEST_CASE("fold psi structure") {
  const auto r = psi_fold(-0.5, 0.1, 0.01, 4.0, {2000});
  CHECK(r.t0 == 0.0);
  CHECK(r.psi_curve.front().second == 0.0);
  REQUIRE(r.exit_time);
  CHECK(*r.exit_time == r.roots.front());
  CHECK(r.exit_time.value() == doctest::Approx(2.0272).epsilon(1e-3));
  CHECK(std::abs(psi_fold_value(-0.5, 0.1, 0.01, *r.exit_time)) < 1e-9);

  // Strictly decreasing while x(s) is left of the window.
  const auto w = complex_window(0.1, 0.01);
  for (std::size_t k = 1; k < r.psi_curve.size(); ++k) {
    if (-0.5 + r.psi_curve[k].first / 2 < w.x1) CHECK(r.psi_curve[k].second < r.psi_curve[k - 1].second);
  }
}

TEST_CASE("fold psi is symmetric at h = 0") {
  const auto w = complex_window(0.1, 0.0);
  const double x0 = w.x1 - 0.1;
  const auto r = psi_fold(x0, 0.1, 0.0, 4 * std::abs(x0) + 0.5, {4000});
  REQUIRE(r.exit_time);
  CHECK(x0 + *r.exit_time / 2 == doctest::Approx(-x0).epsilon(1e-9));
}

TEST_CASE("fold psi panel halving") {
  const auto a = psi_fold(-0.5, 0.1, 0.01, 3.0, {5000});
  const auto b = psi_fold(-0.5, 0.1, 0.01, 3.0, {10000});
  CHECK(std::abs(a.psi_curve.back().second - b.psi_curve.back().second) <= 1e-8);
}

TEST_CASE("fold psi preconditions") {
  CHECK_THROWS_AS(psi_fold(-0.2, 0.1, 0.01, 3.0), InvalidInput);
  CHECK_THROWS_AS(psi_fold(-0.5, 0.1, 0.01, 0.0), InvalidInput);
  CHECK_THROWS_AS(psi_fold(-0.5, 0.1, 0.01, 3.0, {1}), InvalidInput);
}

TEST_CASE("transcritical eigenvalue") {
  CHECK(transcritical_eigenvalue(0, 0.1) == 0);
  CHECK(transcritical_eigenvalue(10, 0.1) == doctest::Approx(0.0));
  CHECK(transcritical_eigenvalue(5, 0.1) == doctest::Approx(5.0));
  for (double x : {4.0, 4.9, 5.1, 6.0}) CHECK(transcritical_eigenvalue(x, 0.1) < 5.0);
}

TEST_CASE("transcritical psi closed form") {
  CHECK(psi_transcritical<double>(-2, 0.25, 0.1, 0) == 0);
  CHECK(psi_transcritical<Rational>(q(-5), q(1, 4), q(1, 10), q(60)) == 0);
  CHECK(std::abs(psi_transcritical<double>(-2, 0.25, 0.1, 17.26)) <= 1e-2);
  // Engine form subtracts h eps t.
  CHECK(psi_transcritical<double>(-2, 0.25, 0.1, 3, ModifiedVariant::Engine) ==
        doctest::Approx(psi_transcritical<double>(-2, 0.25, 0.1, 3) - 0.1 * 0.25 * 3));
}

TEST_CASE("transcritical psi is t times the parabola, exactly") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<long> num(1, 99);
  for (int i = 0; i < 100; ++i) {
    const Rational x0 = q(-num(rng), 10), eps = q(num(rng), 100), h = q(num(rng), 200), t = q(num(rng), 3);
    CHECK(psi_transcritical<Rational>(x0, eps, h, t) - t * psi_transcritical_quotient<Rational>(x0, eps, h, t) == 0);
  }
}

TEST_CASE("transcritical psi against quadrature") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ux(-8.0, -0.05), ue(0.01, 1.0), uh(0.005, 0.3);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double x0 = ux(rng), eps = ue(rng), h = uh(rng);
    for (double t = 0; t <= 100; t += 12.5) {
      const double oracle = gauss_legendre(
          [&](double s) { return transcritical_eigenvalue(x0 + eps * s, h); }, 0.0, t, 64);
      const double scale = std::max(1.0, std::abs(oracle));
      worst = std::max(worst, std::abs(psi_transcritical<double>(x0, eps, h, t) - oracle) / scale);
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("transcritical classification examples") {
  const auto two = classify_transcritical(q(-2), q(1, 4), q(1, 10));
  CHECK(two.kind == TranscriticalCase::TwoRoots);
  const double a = 2.0 / 3.0 * 0.0625 * 0.1, b = -0.25 * 1.4, c0 = -2 * -2 * 1.2;
  const double disc = std::sqrt(b * b - 4 * a * c0);
  CHECK(std::abs(two.t1 - (-b - disc) / (2 * a)) <= 1e-6);
  CHECK(std::abs(two.t2 - (-b + disc) / (2 * a)) <= 1e-6);
  CHECK(two.t1 == doctest::Approx(17.26).epsilon(1e-3));
  CHECK(two.t2 == doctest::Approx(66.74).epsilon(1e-3));
  CHECK(!two.t_star);

  for (long den : {4L, 10L, 3L, 7L}) {
    const Rational eps = q(1, den);
    const auto t = classify_transcritical(q(-5), eps, q(1, 10));
    CHECK(t.kind == TranscriticalCase::Tangency);
    REQUIRE(t.t_star);
    CHECK(*t.t_star == Rational(3) / (2 * q(1, 10) * eps));
  }
  CHECK(*classify_transcritical(q(-5), q(1, 4), q(1, 10)).t_star == 60);

  CHECK(classify_transcritical(q(-6), q(1, 4), q(1, 10)).kind == TranscriticalCase::NoEscape);
  CHECK(classify_transcritical(q(-5000001, 1000000), q(1, 4), q(1, 10)).kind == TranscriticalCase::NoEscape);
  CHECK(classify_transcritical(q(-4999999, 1000000), q(1, 4), q(1, 10)).kind == TranscriticalCase::TwoRoots);

  CHECK_THROWS_AS(classify_transcritical(q(0), q(1, 4), q(1, 10)), InvalidInput);
  CHECK_THROWS_AS(classify_transcritical(q(1), q(1, 4), q(1, 10)), InvalidInput);
  CHECK_THROWS_AS(classify_transcritical(q(-1), q(0), q(1, 10)), InvalidInput);
  CHECK(to_string(TranscriticalCase::Tangency) == "Tangency");
}

TEST_CASE("transcritical classification agrees with a sign scan") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<long> ux(1, 1000), ue(1, 100), uh(1, 60);
  for (int i = 0; i < 100; ++i) {
    const Rational h = q(uh(rng), 200), eps = q(ue(rng), 100);
    const Rational x0 = -Rational(ux(rng)) / (Rational(500) * h);  // spans both sides of -1/(2h)
    const auto cls = classify_transcritical(x0, eps, h);
    const double xd = x0.get_d(), ed = eps.get_d(), hd = h.get_d();
    const double a = 2.0 / 3.0 * ed * ed * hd, b = ed * (1 - 2 * hd * xd);
    const double t_end = 2 * b / a + 10;
    const int n = 20000;
    int changes = 0;
    double first_up = -1;
    double prev = psi_transcritical<double>(xd, ed, hd, t_end / n);
    for (int k = 2; k <= n; ++k) {
      const double t = t_end * k / n;
      const double v = psi_transcritical<double>(xd, ed, hd, t);
      if ((prev < 0) != (v < 0)) {
        ++changes;
        if (first_up < 0 && v >= 0) first_up = t;
      }
      prev = v;
    }
    if (cls.kind == TranscriticalCase::TwoRoots) {
      CHECK(changes == 2);
      CHECK(std::abs(first_up - cls.t1) <= 2 * t_end / n);
    } else if (cls.kind == TranscriticalCase::Tangency) {
      CHECK(x0 == -1 / (2 * h));
      CHECK(changes == 0);
    } else {
      CHECK(cls.kind == TranscriticalCase::NoEscape);
      CHECK(changes == 0);
    }
  }
}

TEST_CASE("normal form report") {
  const auto r = normal_form_report(q(1, 10), q(1, 100));
  CHECK(r.h_tilde == q(1, 10));
  CHECK(r.a[0] == q(1, 20));
  CHECK(r.a[1] == q(-1, 10));
  CHECK(r.a[2] == q(-1, 10));
  CHECK(r.a[3] == q(-1, 20));
  CHECK(r.a[4] == q(1, 20));
  CHECK(r.A == 0);
  CHECK(r.lambda_H == q(-1, 200));
  CHECK(r.lambda_C == q(-1, 200));

  const auto tiny = normal_form_report(q(1, 10), q(1, 1000000000));
  for (const auto& a : tiny.a) CHECK(std::abs(a.get_d()) < 1e-7);
  CHECK(std::abs(tiny.lambda_H.get_d()) < 1e-9);

  CHECK_THROWS_AS(normal_form_report(q(1, 10), q(1, 10)), InvalidInput);
  CHECK_THROWS_AS(normal_form_report(q(1, 10), q(0)), InvalidInput);
}

TEST_CASE("normal form factors") {
  const auto f = normal_form_factors();
  auto at_origin = [](const RationalPoly& p) { return p.substitute(Var::X, c(0)).substitute(Var::Y, c(0)); };
  CHECK(at_origin(f[0]) == c(1));
  CHECK(at_origin(f[1]) == c(1));
  CHECK(at_origin(f[2]) == c(-1, 2) * h() * lam());
  CHECK(at_origin(f[3]) == c(1));
  CHECK(at_origin(f[4]) == c(1));
  CHECK(at_origin(f[5]) == c(1, 2) * h());

  // x' = -y h1 + x^2 h2 + eps h3,  y' = eps (x h4 - lambda h5 + y h6).
  const PolyVectorField rebuilt{c(-1) * y() * f[0] + x() * x() * f[1] + eps() * f[2],
                                eps() * (x() * f[3] - lam() * f[4] + y() * f[5]), TimeScale::Fast};
  const auto fh = derive_modified(canonical(CanonicalSystem::FoldLambdaFast)).fh;
  CHECK(rebuilt.fx == fh.fx);
  CHECK(rebuilt.fy == fh.fy);
}

TEST_CASE("hopf probe") {
  const auto hopf = hopf_probe(q(1, 10), q(1, 100), q(-1, 200), 200);
  CHECK(hopf.outcome == HopfOutcome::Bounded);
  CHECK(!hopf.escape_time);

  const auto zero = hopf_probe(q(1, 10), q(1, 100), q(0), 200);
  CHECK(zero.outcome == HopfOutcome::Escaped);
  REQUIRE(zero.escape_time);
  CHECK(*zero.escape_time > 0);

  const auto below = hopf_probe(q(1, 10), q(1, 100), q(-1, 100), 200);
  CHECK(below.outcome == HopfOutcome::Bounded);
  CHECK(below.final_distance < 0.1 * below.initial_distance);

  CHECK_THROWS_AS(hopf_probe(q(1, 10), q(1, 100), q(0), 0), InvalidInput);
  CHECK_THROWS_AS(hopf_probe(q(1, 10), q(1, 10), q(0), 10), InvalidInput);
}
