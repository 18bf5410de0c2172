#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fastslow/integrate.hpp"

using namespace fastslow;
using namespace fastslow::sym;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

const SystemParams kFold{q(1, 10), q(1, 100), 0};
const SystemParams kTrans{q(1, 4), q(1, 10), 0};

RationalPoint on_fold_manifold(const Rational& x0, const Rational& eps) { return {x0, x0 * x0 - eps / 2}; }

// First root of Psi(t)/t = 2 x0 (1 - h x0) + eps (1 - 2 h x0) t - (2/3) eps^2 h t^2.
double first_psi_root(double x0, double eps, double h) {
  const double a = -2.0 / 3.0 * eps * eps * h, b = eps * (1 - 2 * h * x0), c0 = 2 * x0 * (1 - h * x0);
  const double disc = b * b - 4 * a * c0;
  return (-b + std::sqrt(disc)) / (2 * a);
}

Trajectory manual(std::vector<std::pair<double, double>> pts) {
  Trajectory t;
  double time = 0;
  for (auto [x, y] : pts) t.samples.push_back({BigReal(time++, 20), BigReal(x, 20), BigReal(y, 20)});
  return t;
}

}  // namespace

TEST_CASE("euler first step by hand") {
  const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {q(-2), q(-2)}, kTrans, 1, 100);
  REQUIRE(t.size() == 2);
  CHECK(t.samples[1].x == BigReal(q(-79, 40), 100));
  CHECK(t.samples[1].y == BigReal(q(-79, 40), 100));
  CHECK(t.scheme == Scheme::EulerMap);
  CHECK(t.digits == 100);
}

TEST_CASE("euler on a constant field is exact") {
  const PolyVectorField f{c(3, 2), c(-1, 4), TimeScale::Slow};
  const std::size_t n = 37;
  const auto t = euler_iterate(f, {q(1, 3), q(2)}, kFold, n, 40);
  REQUIRE(t.size() == n + 1);
  const Rational tn = Rational(static_cast<long>(n)) * kFold.h;
  // Exact up to the rounding of each addition at 40 digits.
  CHECK(abs(t.back().x - BigReal(Rational(q(1, 3) + tn * q(3, 2)), 40)).to_double() < 1e-37);
  CHECK(abs(t.back().y - BigReal(Rational(q(2) - tn * q(1, 4)), 40)).to_double() < 1e-37);

  // Dyadic data stays exact.
  const PolyVectorField g{c(1, 2), c(-3, 4), TimeScale::Slow};
  const SystemParams p{q(1, 4), q(1, 8), 0};
  const auto d = euler_iterate(g, {q(1, 4), q(2)}, p, 64, 20);
  CHECK(d.back().x == BigReal(Rational(q(1, 4) + q(64, 16)), 20));
  CHECK(d.back().y == BigReal(Rational(q(2) - q(64 * 3, 32)), 20));
}

TEST_CASE("map time stamps are exact multiples of h") {
  const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {q(-2), q(-2)}, kTrans, 250, 60);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.samples[i].t == BigReal(Rational(Rational(static_cast<long>(i)) * kTrans.h), 60));
  }
  const auto grid = map_time_grid(kTrans.h, 3);
  REQUIRE(grid.size() == 3);
  CHECK(grid[2] == 0.30000000000000004 - 0.00000000000000004);
}

TEST_CASE("map preconditions") {
  const auto f = canonical(CanonicalSystem::FoldSlow);
  CHECK_THROWS_AS(euler_iterate(f, {q(0), q(0)}, kFold, 3, 15), InvalidInput);
  CHECK_THROWS_AS(euler_iterate(f, {q(0), q(0)}, SystemParams{q(1, 10), q(1, 10), 0}, 3, 30), InvalidInput);
  CHECK_THROWS_AS(iterate_map(Scheme::ReferenceODE, f, {q(0), q(0)}, kFold, 3, 30), InvalidInput);
  CHECK(iterate_map(Scheme::KahanMap, f, {q(0), q(0)}, kFold, 3, 30).scheme == Scheme::KahanMap);
}

TEST_CASE("euler keeps the transcritical line exactly") {
  for (long k = 1; k <= 8; ++k) {
    const Rational x0 = q(-k, 2);
    const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {x0, x0}, kTrans, 300, 50);
    bool on_line = true;
    for (const auto& s : t.samples) on_line = on_line && s.x == s.y;
    CHECK(on_line);
  }
}

TEST_CASE("euler divergence carries the partial run") {
  try {
    euler_iterate(canonical(CanonicalSystem::FoldSlow), on_fold_manifold(q(-1, 2), q(1, 10)), kFold, 1000, 50);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 100);
    CHECK(e.partial().size() == e.step());
    CHECK(std::abs(e.partial().back().x.to_double()) <= kDivergenceBound);
  }
}

TEST_CASE("fold euler leaves the slow manifold before the reference solution") {
  const RationalPoint z0 = on_fold_manifold(q(-1, 2), q(1, 10));
  Trajectory euler;
  try {
    euler = euler_iterate(canonical(CanonicalSystem::FoldSlow), z0, kFold, 400, 50);
  } catch (const DivergenceError& e) {
    euler = e.partial();
  }
  ReferenceOptions opt;
  opt.output_times = map_time_grid(kFold.h, 400);
  Trajectory ref;
  try {
    ref = reference_solve(canonical(CanonicalSystem::FoldSlow), {-0.5, 0.2}, kFold, 0, 4, opt);
  } catch (const TrajectoryError& e) {
    ref = e.partial();
  }
  const auto m = ManifoldSpec::fold(kFold.eps);
  const auto te = escape_time(euler, m);
  const auto tr = escape_time(ref, m);
  REQUIRE(te);
  REQUIRE(tr);
  CHECK(tr->t >= 1.2 * te->t);
}

TEST_CASE("fold euler exit is insensitive to precision beyond 50 digits") {
  const RationalPoint z0 = on_fold_manifold(q(-1, 2), q(1, 10));
  auto exit_at = [&](unsigned digits) {
    try {
      euler_iterate(canonical(CanonicalSystem::FoldSlow), z0, kFold, 400, digits);
    } catch (const DivergenceError& e) {
      return escape_time(e.partial(), ManifoldSpec::fold(kFold.eps))->t;
    }
    FAIL("expected divergence");
    return 0.0;
  };
  CHECK(std::abs(exit_at(50) - exit_at(60)) < kFold.h.get_d());
}

TEST_CASE("kahan on a constant field equals euler") {
  const PolyVectorField f{c(1, 7), c(5), TimeScale::Slow};
  const auto e = euler_iterate(f, {q(1), q(-1)}, kFold, 20, 30);
  const auto k = kahan_iterate(f, {q(1), q(-1)}, kFold, 20, 30);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(e.samples[i].x == k.samples[i].x);
    CHECK(e.samples[i].y == k.samples[i].y);
  }
}

TEST_CASE("kahan step matches the second-order expansion to O(h^3)") {
  // Transcritical: f = (x^2 - y^2 + eps, eps), Df = [[2x, -2y], [0, 0]].
  const double x0 = -1.0, y0 = -0.5, eps = 0.25;
  auto residual = [&](long den) {
    const SystemParams p{q(1, 4), q(1, den), 0};
    const double h = 1.0 / den;
    const auto t = kahan_iterate(canonical(CanonicalSystem::Transcritical), {q(-1), q(-1, 2)}, p, 1, 40);
    const double fx = x0 * x0 - y0 * y0 + eps, fy = eps;
    const double dfx = 2 * x0 * fx - 2 * y0 * fy;
    const double ex = x0 + h * fx + h * h / 2 * dfx, ey = y0 + h * fy;
    return std::hypot(t.back().x.to_double() - ex, t.back().y.to_double() - ey);
  };
  const double r1 = residual(100), r2 = residual(200), r3 = residual(400);
  CHECK(r1 / r2 == doctest::Approx(8.0).epsilon(0.125));
  CHECK(r2 / r3 == doctest::Approx(8.0).epsilon(0.125));
}

TEST_CASE("kahan singular step") {
  // x' = x^2: Id - (h/2) Df = 1 - h x vanishes at x = 1/h.
  const PolyVectorField f{x() * x(), c(0), TimeScale::Slow};
  const SystemParams p{q(1, 4), q(1, 10), 0};
  CHECK_THROWS_AS(kahan_iterate(f, {q(10), q(0)}, p, 3, 30), SingularStepError);
}

TEST_CASE("kahan tracks the repelling branch longer than euler") {
  const RationalPoint z0 = on_fold_manifold(q(-1, 2), q(1, 10));
  auto run = [&](Scheme s) {
    try {
      return iterate_map(s, canonical(CanonicalSystem::FoldSlow), z0, kFold, 400, 50);
    } catch (const TrajectoryError& e) {
      return e.partial();
    }
  };
  const auto m = ManifoldSpec::fold(kFold.eps);
  const auto te = escape_time(run(Scheme::EulerMap), m);
  const auto tk = escape_time(run(Scheme::KahanMap), m);
  REQUIRE(te);
  REQUIRE(tk);
  CHECK(tk->t > te->t);
}

TEST_CASE("reference solve on z' = -z") {
  const PolyVectorField f{c(-1) * x(), c(-1) * y(), TimeScale::Slow};
  const auto t = reference_solve(f, {1.0, 1.0}, kFold, 0.0, 1.0);
  CHECK(t.scheme == Scheme::ReferenceODE);
  CHECK(std::abs(t.back().x.to_double() - std::exp(-1.0)) <= 1e-10);
  CHECK(std::abs(t.back().y.to_double() - std::exp(-1.0)) <= 1e-10);
  CHECK(t.back().t.to_double() == 1.0);
}

TEST_CASE("reference solve on a linear spiral matches the matrix exponential") {
  // A = [[a, -b], [b, a]], exp(At) z0 = e^{at} R(bt) z0.
  const double a = -0.5, b = 2.0;
  const PolyVectorField f{c(-1, 2) * x() - c(2) * y(), c(2) * x() - c(1, 2) * y(), TimeScale::Slow};
  ReferenceOptions opt;
  for (int i = 1; i <= 20; ++i) opt.output_times.push_back(0.1 * i);
  const auto t = reference_solve(f, {1.0, 0.5}, kFold, 0.0, 2.0, opt);
  REQUIRE(t.size() == 21);
  double worst = 0;
  for (const auto& s : t.samples) {
    const double tt = s.t.to_double();
    const double g = std::exp(a * tt), cs = std::cos(b * tt), sn = std::sin(b * tt);
    worst = std::max({worst, std::abs(s.x.to_double() - g * (cs * 1.0 - sn * 0.5)),
                      std::abs(s.y.to_double() - g * (sn * 1.0 + cs * 0.5))});
  }
  CHECK(worst <= 10 * opt.abstol);
}

TEST_CASE("reference solve samples requested times") {
  const PolyVectorField f{c(-1) * x(), c(0), TimeScale::Slow};
  ReferenceOptions opt;
  opt.output_times = {0.25, 0.5, 0.5, 0.75, 1.0, 2.0};
  const auto t = reference_solve(f, {1.0, 0.0}, kFold, 0.0, 1.0, opt);
  std::vector<double> times;
  for (const auto& s : t.samples) times.push_back(s.t.to_double());
  CHECK(times == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
}

TEST_CASE("reference solve preconditions and failures") {
  const PolyVectorField f{c(-1) * x(), c(0), TimeScale::Slow};
  ReferenceOptions tight;
  tight.abstol = 1e-15;
  CHECK_THROWS_AS(reference_solve(f, {1.0, 0.0}, kFold, 0.0, 1.0, tight), InvalidInput);
  CHECK_THROWS_AS(reference_solve(f, {1.0, 0.0}, kFold, 1.0, 1.0), InvalidInput);

  // x' = x^2 blows up at t = 1.
  const PolyVectorField blow{x() * x(), c(0), TimeScale::Slow};
  try {
    reference_solve(blow, {1.0, 0.0}, kFold, 0.0, 2.0);
    FAIL("expected failure");
  } catch (const TrajectoryError& e) {
    CHECK(!e.partial().empty());
    CHECK(e.partial().back().t.to_double() < 1.0);
  }
}

TEST_CASE("transcritical reference solve stays on the line") {
  ReferenceOptions opt;
  for (int i = 1; i <= 300; ++i) opt.output_times.push_back(0.1 * i);
  const auto t = reference_solve(canonical(CanonicalSystem::Transcritical), {-2.0, -2.0}, kTrans, 0.0, 30.0, opt);
  double worst = 0;
  for (const auto& s : t.samples) worst = std::max(worst, std::abs((s.y - s.x).to_double()));
  CHECK(worst <= 1e-9);
}

TEST_CASE("escape_time") {
  const auto line = ManifoldSpec::transcritical();
  CHECK(!escape_time(manual({{0, 0}, {1, 1}, {2, 2}}), line));
  // Armed at the first sample, escapes at the third.
  const auto e = escape_time(manual({{0, 0.001}, {0, 0.05}, {0, 0.2}, {0, 5}}), line);
  REQUIRE(e);
  CHECK(e->index == 2);
  CHECK(e->t == 2.0);
  // Never within threshold/10: never armed.
  CHECK(!escape_time(manual({{0, 0.02}, {0, 0.5}}), line));
  CHECK_THROWS_AS(escape_time(manual({{0, 0}}), line, 0.0), InvalidInput);

  const auto fold = ManifoldSpec::fold(q(1, 10));
  CHECK(fold.residual(0.5, 0.2) == doctest::Approx(0.0));
  CHECK(line.residual(1.0, 3.0) == 2.0);
}

TEST_CASE("transcritical euler exit near the first psi root") {
  const Rational x0 = q(-2), d = q(1, 2000);
  const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {x0 - d, x0 + d}, kTrans, 400, 100);
  const auto e = escape_time(t, ManifoldSpec::transcritical());
  REQUIRE(e);
  const double t1 = first_psi_root(-2.0, 0.25, 0.1);
  CHECK(t1 == doctest::Approx(17.26).epsilon(1e-3));
  CHECK(std::abs(e->t - t1) <= 2.0);
}

TEST_CASE("transcritical euler at x0 = -1/(2h) never escapes before t = 100") {
  const Rational x0 = q(-5), d = q(1, 2000);
  const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {x0 - d, x0 + d}, kTrans, 1000, 100);
  CHECK(!escape_time(t, ManifoldSpec::transcritical()));
  double worst = 0;
  for (const auto& s : t.samples) worst = std::max(worst, std::abs((s.y - s.x).to_double()));
  CHECK(worst <= 1e-2);
}

TEST_CASE("first integral") {
  const BigReal x(q(-3, 10), 50);
  const BigReal y(Rational(q(9, 100) - q(1, 20)), 50);
  const auto on = fold_first_integral(x, y, q(1, 10));
  CHECK(std::abs(on.value.to_double()) < 1e-48);
  CHECK(!on.clamped);

  const auto off = fold_first_integral(BigReal(0L, 50), BigReal(1L, 50), q(1, 10));
  CHECK(off.value.to_double() == doctest::Approx(std::exp(-20.0) * 1.05));

  const auto huge = fold_first_integral(BigReal(0L, 30), BigReal(-1000000L, 30), q(1, 10));
  CHECK(huge.clamped);
  CHECK(huge.value.is_finite());
}

TEST_CASE("first integral drift: reference conserves, euler does not") {
  ReferenceOptions opt;
  opt.output_times = map_time_grid(kFold.h, 300);
  const auto ref = reference_solve(canonical(CanonicalSystem::FoldSlow), {-0.5, 0.2}, kFold, 0.0, 3.0, opt);
  const auto rd = first_integral_drift(ref, kFold.eps);
  CHECK(rd.max_drift <= 1e-9);

  Trajectory euler;
  try {
    euler = euler_iterate(canonical(CanonicalSystem::FoldSlow), on_fold_manifold(q(-1, 2), kFold.eps), kFold, 300, 50);
  } catch (const DivergenceError& e) {
    euler = e.partial();
  }
  const auto ed = first_integral_drift(euler, kFold.eps);
  CHECK(ed.max_drift >= 10 * std::max(rd.max_drift, 1e-300));
  CHECK(first_integral_drift(Trajectory{}, kFold.eps).max_drift == 0.0);
}

TEST_CASE("trajectory csv") {
  const auto t = euler_iterate(canonical(CanonicalSystem::Transcritical), {q(-2), q(-2)}, kTrans, 1, 100);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream in(os.str());
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK(header == "t,x,y");
  CHECK(row1 == "1.00000000000000000000000000000e-01,-1.97500000000000000000000000000e+00,"
                "-1.97500000000000000000000000000e+00");

  const auto low = euler_iterate(canonical(CanonicalSystem::Transcritical), {q(-2), q(-2)}, kTrans, 1, 16);
  std::ostringstream os2;
  write_trajectory_csv(os2, low);
  CHECK(os2.str().find("-1.975000000000000e+00") != std::string::npos);
}
