#include "fastslow/app/sweep.hpp"

#include "fastslow/app/parallel.hpp"
#include "fastslow/app/simulate.hpp"
#include "fastslow/canard.hpp"

namespace fastslow::app {

namespace {

const std::vector<std::string> kSweepKeys{"system", "eps",    "h",    "lambda",           "x0",    "simulate",
                                          "t_max",  "digits", "offset", "allow_low_digits", "threshold"};

struct GridPoint {
  Rational eps, h, lambda, x0;
};

GridPoint point_at(const SweepConfig& c, std::size_t i) {
  GridPoint g;
  g.x0 = c.x0[i % c.x0.size()];
  i /= c.x0.size();
  g.lambda = c.lambda[i % c.lambda.size()];
  i /= c.lambda.size();
  g.h = c.h[i % c.h.size()];
  i /= c.h.size();
  g.eps = c.eps[i];
  return g;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void add_euler_escape(nlohmann::json& j, const SweepConfig& c, const GridPoint& g) {
  Scenario s;
  s.system = c.system;
  s.params = {g.eps, g.h, g.lambda};
  s.z0 = default_start(c.system, g.eps, g.x0, c.offset);
  s.t_max = c.t_max;
  s.digits = c.digits;
  s.threshold = c.threshold;
  const SchemeRun run = run_scheme(s, SchemeChoice::Euler);
  j["euler_escape_time"] = run.escape ? nlohmann::json(run.escape->t) : nlohmann::json(nullptr);
  if (run.escape) j["euler_escape_x"] = run.trajectory.samples[run.escape->index].x.to_double();
  j["euler_terminated"] = run.terminated ? nlohmann::json(*run.terminated) : nlohmann::json(nullptr);
}

nlohmann::json evaluate(const SweepConfig& c, const GridPoint& g) {
  nlohmann::json j;
  switch (c.system) {
    case CanonicalSystem::Transcritical: {
      const auto cls = classify_transcritical(g.x0, g.eps, g.h);
      j["classification"] = std::string(to_string(cls.kind));
      nlohmann::json roots = nlohmann::json::array();
      if (cls.kind == TranscriticalCase::TwoRoots) roots = {cls.t1, cls.t2};
      if (cls.kind == TranscriticalCase::Tangency) roots = {cls.t_star->get_d()};
      j["psi_roots"] = roots;
      j["exit_time"] = roots.empty() ? nlohmann::json(nullptr) : roots[0];
      if (cls.t_star) j["t_star"] = rational_to_string(*cls.t_star);
      break;
    }
    case CanonicalSystem::FoldSlow:
    case CanonicalSystem::FoldLambda: {
      const double x0 = g.x0.get_d();
      const auto w = psi_fold(x0, g.eps.get_d(), g.h.get_d(), c.t_max.get_d());
      j["psi_roots"] = w.roots;
      j["exit_time"] = optional_number(w.exit_time);
      j["predicted_exit_x"] = w.exit_time ? nlohmann::json(x0 + *w.exit_time / 2) : nlohmann::json(nullptr);
      j["classification"] = w.exit_time ? "Escapes" : "NoEscapeWithinHorizon";
      if (c.system == CanonicalSystem::FoldLambda) {
        HopfProbeOptions opt;
        opt.digits = c.digits;
        const auto probe = hopf_probe(g.eps, g.h, g.lambda, c.t_max.get_d(), opt);
        j["hopf_outcome"] = probe.outcome == HopfOutcome::Bounded ? "Bounded" : "Escaped";
        j["hopf_escape_time"] = optional_number(probe.escape_time);
      }
      break;
    }
    case CanonicalSystem::FoldLambdaFast:
      throw InvalidInput("sweeps support fold, fold-lambda and transcritical");
  }
  if (c.simulate) add_euler_escape(j, c, g);
  return j;
}

}  // namespace

SweepConfig sweep_from(const KeyValues& kv) {
  kv.require_known(kSweepKeys);
  SweepConfig c;
  c.system = parse_system(kv.get("system").value_or("transcritical"));
  const bool tc = c.system == CanonicalSystem::Transcritical;
  c.eps = kv.has("eps") ? parse_grid(*kv.get("eps")) : std::vector<Rational>{tc ? Rational(1, 4) : Rational(1, 10)};
  c.h = kv.has("h") ? parse_grid(*kv.get("h")) : std::vector<Rational>{tc ? Rational(1, 10) : Rational(1, 100)};
  c.lambda = kv.has("lambda") ? parse_grid(*kv.get("lambda")) : std::vector<Rational>{Rational(0)};
  c.x0 = kv.has("x0") ? parse_grid(*kv.get("x0")) : std::vector<Rational>{};
  if (auto v = kv.get("simulate")) c.simulate = parse_bool(*v);
  c.t_max = tc ? Rational(100) : Rational(4);
  if (auto v = kv.get("t_max")) c.t_max = parse_rational(*v);
  if (c.t_max <= 0) throw InvalidInput("t_max must be positive");
  c.digits = default_digits(c.system);
  if (auto v = kv.get("digits")) {
    const Rational d = parse_rational(*v);
    if (d.get_den() != 1 || d < kMinDigits || d > 100000) throw InvalidInput("digits out of range");
    c.digits = static_cast<unsigned>(d.get_num().get_ui());
  }
  const bool allow_low = kv.has("allow_low_digits") && parse_bool(*kv.get("allow_low_digits"));
  if (c.digits < default_digits(c.system) && !allow_low) {
    throw InvalidInput("digits below the system default need allow_low_digits");
  }
  c.offset = kv.has("offset") ? parse_rational(*kv.get("offset")) : default_offset(c.system);
  if (auto v = kv.get("threshold")) c.threshold = parse_rational(*v).get_d();
  return c;
}

std::size_t grid_size(const SweepConfig& c) { return c.eps.size() * c.h.size() * c.lambda.size() * c.x0.size(); }

nlohmann::json run_sweep(const SweepConfig& c, unsigned jobs) {
  const std::size_t n = grid_size(c);
  std::vector<nlohmann::json> rows(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const GridPoint g = point_at(c, i);
    nlohmann::json row{{"index", i},
                       {"eps", rational_to_string(g.eps)},
                       {"h", rational_to_string(g.h)},
                       {"lambda", rational_to_string(g.lambda)},
                       {"x0", rational_to_string(g.x0)}};
    try {
      row.update(evaluate(c, g));
    } catch (const InvalidInput& e) {
      row["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
    } catch (const std::exception& e) {
      row["error"] = {{"kind", "computation"}, {"message", e.what()}};
    }
    rows[i] = std::move(row);
  });
  nlohmann::json points = nlohmann::json::array();
  for (auto& r : rows) points.push_back(std::move(r));
  return {{"system", std::string(to_string(c.system))}, {"count", n}, {"points", points}};
}

}  // namespace fastslow::app
