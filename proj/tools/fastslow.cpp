#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fastslow/app/config.hpp"
#include "fastslow/app/figures.hpp"
#include "fastslow/app/manifest.hpp"
#include "fastslow/app/simulate.hpp"
#include "fastslow/app/sweep.hpp"
#include "fastslow/app/validate.hpp"
#include "fastslow/canard.hpp"
#include "fastslow/modified.hpp"
#include "json.hpp"

using namespace fastslow;
using namespace fastslow::app;
using nlohmann::json;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitValidation = 3;

struct Globals {
  std::optional<std::string> eps;
  std::optional<std::string> h;
  std::optional<unsigned> digits;
  std::optional<std::string> out;
  unsigned jobs = 1;
  bool allow_low_digits = false;
};

SystemParams params_for(const Globals& g, CanonicalSystem system) {
  const bool tc = system == CanonicalSystem::Transcritical;
  SystemParams p;
  p.eps = g.eps ? parse_rational(*g.eps) : (tc ? Rational(1, 4) : Rational(1, 10));
  p.h = g.h ? parse_rational(*g.h) : (tc ? Rational(1, 10) : Rational(1, 100));
  return p;
}

unsigned digits_for(const Globals& g, CanonicalSystem system) {
  const unsigned d = g.digits.value_or(default_digits(system));
  if (d < kMinDigits) throw InvalidInput("digits must be at least " + std::to_string(kMinDigits));
  if (d < default_digits(system) && !g.allow_low_digits) {
    throw InvalidInput("digits " + std::to_string(d) + " is below the default " +
                       std::to_string(default_digits(system)) + "; pass --allow-low-digits to override");
  }
  return d;
}

/// Writes to --out/name when --out is set, else to stdout.
void emit(const Globals& g, const std::string& name, const std::string& content) {
  if (g.out) {
    write_file(*g.out, name, content);
    std::cerr << "wrote " << (std::filesystem::path(*g.out) / name).string() << "\n";
  } else {
    std::cout << content;
  }
}

json lines(const std::string& text) {
  json arr = json::array();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) arr.push_back(line);
  }
  return arr;
}

json field_json(const PolyVectorField& f) { return {{"fx", lines(f.fx.to_text())}, {"fy", lines(f.fy.to_text())}}; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified equations and canard diagnostics for discretized fast-slow systems"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  Globals g;
  app.add_option("--eps", g.eps, "time-scale ratio eps (rational or decimal)");
  app.add_option("--h", g.h, "step size h (rational or decimal)");
  app.add_option("--digits", g.digits, "working precision in decimal digits");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_flag("--allow-low-digits", g.allow_low_digits, "accept digits below the system default");

  // derive
  auto* derive = app.add_subcommand("derive", "print the first-order modified vector field");
  std::string d_system, d_variant = "engine", d_format = "text";
  int d_order = 1;
  derive->add_option("--system", d_system, "fold | fold-lambda | fold-lambda-fast | transcritical")->required();
  derive->add_option("--variant", d_variant, "engine | paper");
  derive->add_option("--format", d_format, "text | json")->check(CLI::IsMember({"text", "json"}));
  derive->add_option("--order", d_order, "modified equation order");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario and write trajectory CSVs with a manifest");
  std::optional<std::string> s_config, s_system, s_schemes, s_x0, s_y0, s_offset, s_tmax, s_lambda, s_variant,
      s_threshold;
  simulate_cmd->add_option("--config", s_config, "key = value scenario file");
  simulate_cmd->add_option("--system", s_system);
  simulate_cmd->add_option("--schemes", s_schemes, "comma list of euler, kahan, reference, modified");
  simulate_cmd->add_option("--x0", s_x0);
  simulate_cmd->add_option("--y0", s_y0);
  simulate_cmd->add_option("--offset", s_offset, "start offset from the manifold");
  simulate_cmd->add_option("--t-max", s_tmax);
  simulate_cmd->add_option("--lambda", s_lambda);
  simulate_cmd->add_option("--variant", s_variant, "engine | paper");
  simulate_cmd->add_option("--threshold", s_threshold, "escape threshold");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the modified fold on S_eps (CSV)");
  double sp_min = -0.5, sp_max = 0.5;
  int sp_points = 1001;
  bool sp_numeric = false;
  spectrum->add_option("--x-min", sp_min);
  spectrum->add_option("--x-max", sp_max);
  spectrum->add_option("--points", sp_points)->check(CLI::Range(2, 10000000));
  spectrum->add_flag("--numeric", sp_numeric, "use the eigensolver instead of the closed form");

  // window
  auto* window = app.add_subcommand("window", "complex-eigenvalue window and trace-zero point (JSON)");

  // wayinout
  auto* wayinout = app.add_subcommand("wayinout", "way-in/way-out function, roots and exit time");
  std::string w_system = "fold", w_variant = "paper", w_x0;
  double w_tmax = 0;
  int w_points = 1000;
  wayinout->add_option("--system", w_system, "fold | transcritical");
  wayinout->add_option("--x0", w_x0)->required();
  wayinout->add_option("--t-max", w_tmax, "horizon (default 4 fold, 100 transcritical)");
  wayinout->add_option("--points", w_points, "curve samples")->check(CLI::Range(2, 10000000));
  wayinout->add_option("--variant", w_variant, "transcritical form: paper | engine");

  // classify
  auto* classify = app.add_subcommand("classify", "transcritical escape case for x0 (JSON)");
  std::string c_x0;
  classify->add_option("--x0", c_x0)->required();

  // normalform
  auto* normalform = app.add_subcommand("normalform", "normal-form constants of the modified fold (JSON)");

  // hopf-probe
  auto* hopf = app.add_subcommand("hopf-probe", "Euler orbit near the equilibrium of the unfolded fold (JSON)");
  std::string hp_lambda, hp_offset = "1/20";
  double hp_horizon = 200, hp_radius = 0.5;
  hopf->add_option("--lambda", hp_lambda)->required();
  hopf->add_option("--horizon", hp_horizon);
  hopf->add_option("--offset", hp_offset, "start at (lambda + offset, lambda^2)");
  hopf->add_option("--radius", hp_radius, "escape radius");

  // figure
  auto* figure_cmd = app.add_subcommand("figure", "reproduce a figure (1..5 or all)");
  std::string f_which;
  figure_cmd->add_option("n", f_which, "1..5 or all")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter grid of exit times and classifications (JSON)");
  std::optional<std::string> sw_config, sw_system, sw_x0, sw_lambda, sw_tmax;
  bool sw_simulate = false;
  sweep->add_option("--config", sw_config, "key = value grid file");
  sweep->add_option("--system", sw_system);
  sweep->add_option("--x0", sw_x0, "grid: a,b,c or start:stop:count");
  sweep->add_option("--lambda", sw_lambda, "grid");
  sweep->add_option("--t-max", sw_tmax);
  sweep->add_flag("--simulate", sw_simulate, "also run the Euler map at each point");

  // validate
  auto* validate = app.add_subcommand("validate", "symbolic goldens and numeric cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*derive) {
      const CanonicalSystem sys = parse_system(d_system);
      const ModifiedVariant variant = parse_variant(d_variant);
      const ModifiedSystem m = d_order == 1 && sys == CanonicalSystem::Transcritical
                                   ? modified_for(sys, variant)
                                   : derive_modified(canonical(sys), d_order);
      if (d_format == "text") {
        emit(g, "derive_" + d_system + ".txt", to_text(m.fh));
      } else {
        const json j{{"system", std::string(to_string(sys))},
                     {"variant", d_variant},
                     {"order", d_order},
                     {"time_scale", m.fh.time_scale == TimeScale::Slow ? "slow" : "fast"},
                     {"provenance", m.provenance},
                     {"f0", field_json(m.f0)},
                     {"f1", field_json(m.f1)},
                     {"fh", field_json(m.fh)}};
        emit(g, "derive_" + d_system + ".json", j.dump(2) + "\n");
      }
    } else if (*simulate_cmd) {
      KeyValues kv = s_config ? KeyValues::load(*s_config) : KeyValues{};
      auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v) kv.set(key, *v);
      };
      put("system", s_system);
      put("schemes", s_schemes);
      put("x0", s_x0);
      put("y0", s_y0);
      put("offset", s_offset);
      put("t_max", s_tmax);
      put("lambda", s_lambda);
      put("variant", s_variant);
      put("threshold", s_threshold);
      put("eps", g.eps);
      put("h", g.h);
      put("out", g.out);
      if (g.digits) kv.set("digits", std::to_string(*g.digits));
      if (g.allow_low_digits) kv.set("allow_low_digits", "true");
      const Scenario s = scenario_from(kv);
      const RunResult r = simulate(s, g.jobs);
      std::cout << r.manifest.dump(2) << "\n";
    } else if (*spectrum) {
      const SystemParams p = params_for(g, CanonicalSystem::FoldSlow);
      p.validate(true);
      const double eps = p.eps.get_d(), h = p.h.get_d();
      std::ostringstream csv;
      csv << "x,re_mu1,im_mu1,re_mu2,im_mu2\n";
      for (int i = 0; i < sp_points; ++i) {
        const double x = sp_min + (sp_max - sp_min) * i / (sp_points - 1);
        const auto s = sp_numeric ? fold_spectrum_numeric(x, eps, h) : fold_spectrum(x, eps, h);
        csv << num(x) << ',' << num(s.mu1.real()) << ',' << num(s.mu1.imag()) << ',' << num(s.mu2.real()) << ','
            << num(s.mu2.imag()) << '\n';
      }
      emit(g, "spectrum.csv", csv.str());
    } else if (*window) {
      const SystemParams p = params_for(g, CanonicalSystem::FoldSlow);
      p.validate(true);
      const double eps = p.eps.get_d(), h = p.h.get_d();
      const auto w = complex_window(eps, h);
      const auto tz = trace_zero(eps, h);
      const json j{{"eps", rational_to_string(p.eps)},
                   {"h", rational_to_string(p.h)},
                   {"x1", w.x1},
                   {"x2", w.x2},
                   {"first_order", {-std::sqrt(eps) + h / 4, std::sqrt(eps) + h / 4}},
                   {"trace_zero",
                    {{"x_star", tz.x_star},
                     {"closed_form", tz.closed_form},
                     {"gap_to_minus_half_h", tz.gap_to_minus_half_h},
                     {"gap_to_minus_quarter_h", tz.gap_to_minus_quarter_h}}}};
      emit(g, "window.json", j.dump(2) + "\n");
    } else if (*wayinout) {
      const CanonicalSystem sys = parse_system(w_system);
      const SystemParams p = params_for(g, sys);
      const Rational x0 = parse_rational(w_x0);
      json j{{"system", std::string(to_string(sys))},
             {"eps", rational_to_string(p.eps)},
             {"h", rational_to_string(p.h)},
             {"x0", rational_to_string(x0)}};
      std::ostringstream csv;
      csv << "t,psi\n";
      if (sys == CanonicalSystem::Transcritical) {
        p.validate(false);
        const double t_max = w_tmax > 0 ? w_tmax : 100.0;
        const ModifiedVariant variant = parse_variant(w_variant);
        const double e = p.eps.get_d(), hh = p.h.get_d(), xx = x0.get_d();
        for (int i = 0; i < w_points; ++i) {
          const double t = t_max * i / (w_points - 1);
          csv << num(t) << ',' << num(psi_transcritical<double>(xx, e, hh, t, variant)) << '\n';
        }
        if (x0 < 0) {
          const auto cls = classify_transcritical(x0, p.eps, p.h);
          j["classification"] = std::string(to_string(cls.kind));
          if (cls.kind == TranscriticalCase::TwoRoots) j["roots"] = {cls.t1, cls.t2};
          if (cls.kind == TranscriticalCase::Tangency) j["roots"] = {cls.t_star->get_d()};
          if (cls.kind == TranscriticalCase::NoEscape) j["roots"] = json::array();
          j["exit_time"] = j["roots"].empty() ? json(nullptr) : j["roots"][0];
        }
      } else if (sys == CanonicalSystem::FoldSlow) {
        p.validate(true);
        PsiFoldOptions opt;
        opt.grid_points = static_cast<std::size_t>(w_points);
        const auto r = psi_fold(x0.get_d(), p.eps.get_d(), p.h.get_d(), w_tmax > 0 ? w_tmax : 4.0, opt);
        for (auto [t, v] : r.psi_curve) csv << num(t) << ',' << num(v) << '\n';
        j["roots"] = r.roots;
        j["exit_time"] = r.exit_time ? json(*r.exit_time) : json(nullptr);
        j["predicted_exit_x"] = r.exit_time ? json(x0.get_d() + *r.exit_time / 2) : json(nullptr);
      } else {
        throw InvalidInput("wayinout supports fold and transcritical");
      }
      if (g.out) {
        write_file(*g.out, "psi.csv", csv.str());
        write_file(*g.out, "wayinout.json", j.dump(2) + "\n");
      }
      std::cout << j.dump(2) << "\n";
    } else if (*classify) {
      const SystemParams p = params_for(g, CanonicalSystem::Transcritical);
      const auto c = classify_transcritical(parse_rational(c_x0), p.eps, p.h);
      json j{{"x0", rational_to_string(c.x0)},
             {"eps", rational_to_string(c.eps)},
             {"h", rational_to_string(c.h)},
             {"classification", std::string(to_string(c.kind))},
             {"boundary_x0", rational_to_string(Rational(-1) / (2 * c.h))}};
      if (c.kind == TranscriticalCase::TwoRoots) {
        j["t1"] = c.t1;
        j["t2"] = c.t2;
      }
      if (c.t_star) {
        j["t_star"] = rational_to_string(*c.t_star);
        j["t_star_value"] = c.t_star->get_d();
      }
      emit(g, "classify.json", j.dump(2) + "\n");
    } else if (*normalform) {
      const SystemParams p = params_for(g, CanonicalSystem::FoldLambda);
      const auto r = normal_form_report(p.eps, p.h);
      json a = json::array();
      for (const auto& v : r.a) a.push_back(rational_to_string(v));
      json factors = json::array();
      for (const auto& f : normal_form_factors()) factors.push_back(lines(f.to_text()));
      const json j{{"eps", rational_to_string(p.eps)},
                   {"h", rational_to_string(p.h)},
                   {"h_tilde", rational_to_string(r.h_tilde)},
                   {"a", a},
                   {"A", rational_to_string(r.A)},
                   {"lambda_H", rational_to_string(r.lambda_H)},
                   {"lambda_C", rational_to_string(r.lambda_C)},
                   {"factors_h_is_h_tilde", factors}};
      emit(g, "normalform.json", j.dump(2) + "\n");
    } else if (*hopf) {
      const SystemParams p = params_for(g, CanonicalSystem::FoldLambda);
      HopfProbeOptions opt;
      opt.offset = parse_rational(hp_offset);
      opt.radius = hp_radius;
      opt.digits = digits_for(g, CanonicalSystem::FoldLambda);
      const Rational lambda = parse_rational(hp_lambda);
      const auto r = hopf_probe(p.eps, p.h, lambda, hp_horizon, opt);
      const json j{{"eps", rational_to_string(p.eps)},
                   {"h", rational_to_string(p.h)},
                   {"lambda", rational_to_string(lambda)},
                   {"horizon", hp_horizon},
                   {"outcome", r.outcome == HopfOutcome::Bounded ? "Bounded" : "Escaped"},
                   {"escape_time", r.escape_time ? json(*r.escape_time) : json(nullptr)},
                   {"initial_distance", r.initial_distance},
                   {"final_distance", r.final_distance},
                   {"max_distance", r.max_distance}};
      emit(g, "hopf_probe.json", j.dump(2) + "\n");
    } else if (*figure_cmd) {
      const std::filesystem::path out = g.out.value_or("figures");
      std::vector<int> which;
      if (f_which == "all") {
        which = {1, 2, 3, 4, 5};
      } else {
        const Rational n = parse_rational(f_which);
        if (n.get_den() != 1) throw InvalidInput("figure number must be an integer");
        which = {static_cast<int>(n.get_num().get_si())};
      }
      json all = json::array();
      for (int n : which) {
        const auto r = figure(n, out, g.jobs);
        all.push_back({{"figure", n}, {"files", r.files}, {"summary", r.summary}});
      }
      std::cout << (which.size() == 1 ? all[0] : all).dump(2) << "\n";
    } else if (*sweep) {
      KeyValues kv = sw_config ? KeyValues::load(*sw_config) : KeyValues{};
      if (sw_system) kv.set("system", *sw_system);
      if (sw_x0) kv.set("x0", *sw_x0);
      if (sw_lambda) kv.set("lambda", *sw_lambda);
      if (sw_tmax) kv.set("t_max", *sw_tmax);
      if (sw_simulate) kv.set("simulate", "true");
      if (g.eps) kv.set("eps", *g.eps);
      if (g.h) kv.set("h", *g.h);
      if (g.digits) kv.set("digits", std::to_string(*g.digits));
      if (g.allow_low_digits) kv.set("allow_low_digits", "true");
      const json result = run_sweep(sweep_from(kv), g.jobs);
      emit(g, "sweep.json", result.dump(2) + "\n");
    } else if (*validate) {
      const auto checks = run_validation();
      for (const auto& c : checks) {
        std::cout << "[" << to_string(c.status) << "] " << c.name;
        if (!c.detail.empty()) std::cout << ": " << c.detail;
        std::cout << "\n";
      }
      if (g.out) write_file(*g.out, "validate.json", to_json(checks).dump(2) + "\n");
      if (!all_passed(checks)) return kExitValidation;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return 0;
}
