#include "fastslow/app/figures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fastslow/app/manifest.hpp"
#include "fastslow/app/parallel.hpp"
#include "fastslow/app/simulate.hpp"
#include "fastslow/app/svg.hpp"
#include "fastslow/canard.hpp"

namespace fastslow::app {

namespace {

const char* const kEuler = "#d62728";
const char* const kReference = "#1f77b4";
const char* const kModified = "#2ca02c";
const char* const kManifold = "#555555";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::pair<double, double>> phase_points(const Trajectory& t) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t.size());
  for (const auto& s : t.samples) out.emplace_back(s.x.to_double(), s.y.to_double());
  return out;
}

std::vector<std::pair<double, double>> time_points(const Trajectory& t) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t.size());
  for (const auto& s : t.samples) out.emplace_back(s.t.to_double(), s.x.to_double());
  return out;
}

std::vector<std::pair<double, double>> curve(double a, double b, int n, double (*f)(double, double), double p) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i <= n; ++i) {
    const double x = a + (b - a) * i / n;
    out.emplace_back(x, f(x, p));
  }
  return out;
}

double fold_manifold(double x, double eps) { return x * x - eps / 2; }
double line_up(double x, double) { return x; }
double line_down(double x, double) { return -x; }

/// Accumulates files in order and writes the manifest at the end.
struct Collector {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content) {
    write_file(dir, name, content);
    files.push_back(name);
  }
};

Scenario base(CanonicalSystem system, const Rational& eps, const Rational& h, const RationalPoint& z0,
              const Rational& t_max) {
  Scenario s;
  s.system = system;
  s.params = {eps, h, 0};
  s.z0 = z0;
  s.t_max = t_max;
  s.digits = default_digits(system);
  return s;
}

std::vector<SchemeRun> run_all(const Scenario& s, const std::vector<SchemeChoice>& schemes, unsigned jobs) {
  std::vector<SchemeRun> runs(schemes.size());
  parallel_for(schemes.size(), jobs, [&](std::size_t i) { runs[i] = run_scheme(s, schemes[i]); });
  return runs;
}

nlohmann::json fig1(Collector& c) {
  const double eps = 0.1, h = 0.01;
  std::ostringstream csv;
  csv << "x,re_mu1,im_mu1,re_mu2,im_mu2\n";
  Series re1{"Re mu1", {}, kEuler}, re2{"Re mu2", {}, kReference};
  for (int i = 0; i <= 1000; ++i) {
    const double x = -0.5 + i / 1000.0;
    const auto s = fold_spectrum(x, eps, h);
    csv << num(x) << ',' << num(s.mu1.real()) << ',' << num(s.mu1.imag()) << ',' << num(s.mu2.real()) << ','
        << num(s.mu2.imag()) << '\n';
    re1.points.emplace_back(x, s.mu1.real());
    re2.points.emplace_back(x, s.mu2.real());
  }
  c.write("fig1_spectrum.csv", csv.str());

  const auto w = complex_window(eps, h);
  const auto tz = trace_zero(eps, h);
  Plot plot;
  plot.title = "Eigenvalues on S_eps, eps = 0.1, h = 0.01";
  plot.x_label = "x";
  plot.y_label = "real part";
  plot.series = {re1, re2};
  plot.vlines = {{w.x1, "x1 = " + short_num(w.x1)}, {w.x2, "x2 = " + short_num(w.x2)}};
  plot.hlines = {{0.0, ""}};
  c.write("fig1.svg", render_svg(plot));
  return {{"eps", eps},
          {"h", h},
          {"window", {w.x1, w.x2}},
          {"trace_zero", tz.x_star},
          {"trace_zero_gap_to_minus_half_h", tz.gap_to_minus_half_h},
          {"trace_zero_gap_to_minus_quarter_h", tz.gap_to_minus_quarter_h}};
}

nlohmann::json fig2(Collector& c, unsigned jobs) {
  const Rational eps(1, 10), h(1, 100), x0(-1, 2);
  Scenario s = base(CanonicalSystem::FoldSlow, eps, h, default_start(CanonicalSystem::FoldSlow, eps, x0, 0), 4);
  const auto runs = run_all(s, {SchemeChoice::Euler, SchemeChoice::Reference, SchemeChoice::Modified}, jobs);
  const char* names[] = {"fig2_euler.csv", "fig2_reference.csv", "fig2_modified.csv"};
  for (std::size_t i = 0; i < runs.size(); ++i) c.write(names[i], trajectory_csv(runs[i].trajectory));

  PsiFoldOptions opt;
  opt.grid_points = 800;
  const auto psi = psi_fold(x0.get_d(), eps.get_d(), h.get_d(), 4.0, opt);
  std::ostringstream csv;
  csv << "t,psi\n";
  for (auto [t, v] : psi.psi_curve) csv << num(t) << ',' << num(v) << '\n';
  c.write("fig2_psi.csv", csv.str());

  const double tau = psi.exit_time.value_or(std::nan(""));
  const double x_exit = x0.get_d() + tau / 2;
  Plot phase;
  phase.title = "Fold, eps = 0.1, h = 0.01, x0 = -0.5";
  phase.x_label = "x";
  phase.y_label = "y";
  phase.x_range = {{-0.6, 1.0}};
  phase.y_range = {{-0.2, 1.0}};
  phase.series = {{"Euler map", phase_points(runs[0].trajectory), kEuler},
                  {"original ODE", phase_points(runs[1].trajectory), kReference},
                  {"modified ODE", phase_points(runs[2].trajectory), kModified},
                  {"S_eps", curve(-0.6, 1.0, 200, fold_manifold, eps.get_d()), kManifold, true}};
  c.write("fig2_phase.svg", render_svg(phase));

  Plot time;
  time.title = "x(t), vertical line at t = tau";
  time.x_label = "t";
  time.y_label = "x";
  time.x_range = {{0.0, 4.0}};
  time.y_range = {{-0.6, 1.2}};
  time.series = {{"Euler map", time_points(runs[0].trajectory), kEuler},
                 {"original ODE", time_points(runs[1].trajectory), kReference},
                 {"modified ODE", time_points(runs[2].trajectory), kModified}};
  time.vlines = {{tau, "tau"}};
  time.hlines = {{x_exit, "x0 + tau/2"}};
  c.write("fig2_time.svg", render_svg(time));

  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs) runs_json.push_back(summarize(r));
  return {{"eps", "1/10"},   {"h", "1/100"}, {"x0", "-1/2"}, {"x0_note", "configuration default, not stated with the figure"},
          {"tau", tau},      {"predicted_exit_x", x_exit}, {"psi_roots", psi.roots}, {"runs", runs_json}};
}

nlohmann::json fig3(Collector& c, unsigned jobs) {
  const Rational eps(1, 10), h(1, 100);
  const RationalPoint z0 = default_start(CanonicalSystem::FoldSlow, eps, Rational(-1, 2), 0);
  const Rational lambdas[] = {Rational(0), -h / 2};
  std::vector<SchemeRun> runs(2);
  parallel_for(2, jobs, [&](std::size_t i) {
    Scenario s = base(CanonicalSystem::FoldLambda, eps, h, z0, i == 0 ? Rational(4) : Rational(30));
    s.params.lambda_p = lambdas[i];
    runs[i] = run_scheme(s, SchemeChoice::Euler);
  });
  c.write("fig3_lambda0.csv", trajectory_csv(runs[0].trajectory));
  c.write("fig3_lambda_hopf.csv", trajectory_csv(runs[1].trajectory));
  std::ostringstream csv;
  csv << "x,y\n";
  const auto manifold = curve(-0.6, 1.0, 320, fold_manifold, eps.get_d());
  for (auto [x, y] : manifold) csv << num(x) << ',' << num(y) << '\n';
  c.write("fig3_manifold.csv", csv.str());

  Plot phase;
  phase.title = "Fold with lambda, eps = 0.1, h = 0.01";
  phase.x_label = "x";
  phase.y_label = "y";
  phase.x_range = {{-0.6, 1.0}};
  phase.y_range = {{-0.2, 1.0}};
  phase.series = {{"lambda = 0", phase_points(runs[0].trajectory), kEuler},
                  {"lambda = -h/2", phase_points(runs[1].trajectory), kReference},
                  {"S_eps", manifold, kManifold, true}};
  c.write("fig3.svg", render_svg(phase));

  double late_min = 1e300, late_max = -1e300;
  const auto& tr = runs[1].trajectory;
  for (std::size_t i = tr.size() / 2; i < tr.size(); ++i) {
    late_min = std::min(late_min, tr.samples[i].x.to_double());
    late_max = std::max(late_max, tr.samples[i].x.to_double());
  }
  return {{"eps", "1/10"},
          {"h", "1/100"},
          {"lambda0", summarize(runs[0])},
          {"lambda_hopf", summarize(runs[1])},
          {"lambda_hopf_late_x_range", {late_min, late_max}}};
}

nlohmann::json fig4(Collector& c, unsigned jobs) {
  const Rational eps(1, 4), h(1, 10), x0(-2);
  const CanonicalSystem sys = CanonicalSystem::Transcritical;
  Scenario s = base(sys, eps, h, default_start(sys, eps, x0, default_offset(sys)), 40);
  const auto runs = run_all(s, {SchemeChoice::Euler, SchemeChoice::Reference, SchemeChoice::Modified}, jobs);
  const char* names[] = {"fig4_euler.csv", "fig4_reference.csv", "fig4_modified.csv"};
  for (std::size_t i = 0; i < runs.size(); ++i) c.write(names[i], trajectory_csv(runs[i].trajectory));

  const auto cls = classify_transcritical(x0, eps, h);
  Plot phase;
  phase.title = "Transcritical, eps = 0.25, h = 0.1, x0 = -2";
  phase.x_label = "x";
  phase.y_label = "y";
  phase.x_range = {{-8.5, 3.0}};
  phase.y_range = {{-2.5, 8.5}};
  phase.series = {{"Euler map", phase_points(runs[0].trajectory), kEuler},
                  {"original ODE", phase_points(runs[1].trajectory), kReference},
                  {"modified ODE", phase_points(runs[2].trajectory), kModified},
                  {"y = x", curve(-8.5, 3.0, 2, line_up, 0), kManifold, true},
                  {"y = -x", curve(-8.5, 3.0, 2, line_down, 0), kManifold, true}};
  c.write("fig4_phase.svg", render_svg(phase));

  Plot time;
  time.title = "x(t), vertical line at t = tau";
  time.x_label = "t";
  time.y_label = "x";
  time.x_range = {{0.0, 40.0}};
  time.y_range = {{-8.5, 3.0}};
  time.series = {{"Euler map", time_points(runs[0].trajectory), kEuler},
                 {"original ODE", time_points(runs[1].trajectory), kReference},
                 {"modified ODE", time_points(runs[2].trajectory), kModified}};
  time.vlines = {{cls.t1, "tau"}};
  c.write("fig4_time.svg", render_svg(time));

  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs) runs_json.push_back(summarize(r));
  return {{"eps", "1/4"},
          {"h", "1/10"},
          {"x0", "-2"},
          {"offset", rational_to_string(default_offset(sys))},
          {"classification", std::string(to_string(cls.kind))},
          {"tau", cls.t1},
          {"t2", cls.t2},
          {"runs", runs_json}};
}

nlohmann::json fig5(Collector& c, unsigned jobs) {
  const Rational eps(1, 4), h(1, 10);
  const CanonicalSystem sys = CanonicalSystem::Transcritical;
  const Rational starts[] = {Rational(-2), Rational(-1) / (2 * h)};
  std::vector<SchemeRun> runs(2);
  parallel_for(2, jobs, [&](std::size_t i) {
    Scenario s = base(sys, eps, h, default_start(sys, eps, starts[i], default_offset(sys)), 100);
    runs[i] = run_scheme(s, SchemeChoice::Euler);
  });
  c.write("fig5_x0_m2.csv", trajectory_csv(runs[0].trajectory));
  c.write("fig5_x0_m5.csv", trajectory_csv(runs[1].trajectory));

  double max_gap = 0;
  for (const auto& smp : runs[1].trajectory.samples) {
    max_gap = std::max(max_gap, std::abs(smp.y.to_double() - smp.x.to_double()));
  }
  Plot time;
  time.title = "Euler map, eps = 0.25, h = 0.1";
  time.x_label = "t";
  time.y_label = "x";
  time.x_range = {{0.0, 100.0}};
  time.y_range = {{-6.0, 21.0}};
  time.series = {{"x0 = -2", time_points(runs[0].trajectory), kEuler},
                 {"x0 = -1/(2h) = -5", time_points(runs[1].trajectory), kReference}};
  time.vlines = {{60.0, "t* = 60"}};
  c.write("fig5.svg", render_svg(time));

  const auto tangency = classify_transcritical(starts[1], eps, h);
  return {{"eps", "1/4"},
          {"h", "1/10"},
          {"x0_m2", summarize(runs[0])},
          {"x0_m5", summarize(runs[1])},
          {"t_star", tangency.t_star ? rational_to_string(*tangency.t_star) : ""},
          {"x0_m5_max_abs_y_minus_x", max_gap}};
}

}  // namespace

FigureResult figure(int n, const std::filesystem::path& outdir, unsigned jobs) {
  if (n < 1 || n > 5) throw InvalidInput("figure number must be 1..5, got " + std::to_string(n));
  const auto start = std::chrono::steady_clock::now();
  Collector c{outdir, {}};
  nlohmann::json summary;
  try {
    switch (n) {
      case 1: summary = fig1(c); break;
      case 2: summary = fig2(c, jobs); break;
      case 3: summary = fig3(c, jobs); break;
      case 4: summary = fig4(c, jobs); break;
      case 5: summary = fig5(c, jobs); break;
    }
  } catch (const InvalidInput& e) {
    throw InvalidInput("figure " + std::to_string(n) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error("figure " + std::to_string(n) + ": " + e.what());
  }
  const std::string prefix = "fig" + std::to_string(n);
  c.write(prefix + "_summary.json", summary.dump(2) + "\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const nlohmann::json scenario{{"figure", n}};
  const auto manifest = make_manifest(scenario, wall, outdir, c.files, summary);
  write_file(outdir, prefix + "_manifest.json", manifest.dump(2) + "\n");
  FigureResult r{n, c.files, summary};
  r.files.push_back(prefix + "_manifest.json");
  return r;
}

}  // namespace fastslow::app
