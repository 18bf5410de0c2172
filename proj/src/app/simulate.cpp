#include "fastslow/app/simulate.hpp"

#include <chrono>
#include <sstream>

#include "fastslow/app/manifest.hpp"
#include "fastslow/app/parallel.hpp"
#include "fastslow/modified.hpp"

namespace fastslow::app {

ManifoldSpec manifold_for(CanonicalSystem system, const Rational& eps) {
  if (system == CanonicalSystem::Transcritical) return ManifoldSpec::transcritical();
  return ManifoldSpec::fold(eps);
}

std::size_t step_count(const Rational& t_max, const Rational& h) {
  const mpz_class n = t_max.get_num() * h.get_den() / (t_max.get_den() * h.get_num());
  if (n < 0) throw InvalidInput("t_max must be non-negative");
  if (n > 100'000'000) throw InvalidInput("too many map steps requested");
  return static_cast<std::size_t>(n.get_ui());
}

SchemeRun run_scheme(const Scenario& s, SchemeChoice scheme) {
  SchemeRun run;
  run.scheme = scheme;
  const PolyVectorField f0 = canonical(s.system);
  const std::size_t n = step_count(s.t_max, s.params.h);
  try {
    switch (scheme) {
      case SchemeChoice::Euler:
        run.trajectory = euler_iterate(f0, s.z0, s.params, n, s.digits);
        break;
      case SchemeChoice::Kahan:
        run.trajectory = kahan_iterate(f0, s.z0, s.params, n, s.digits);
        break;
      case SchemeChoice::Reference:
      case SchemeChoice::Modified: {
        const PolyVectorField f =
            scheme == SchemeChoice::Reference ? f0 : modified_for(s.system, s.variant).fh;
        ReferenceOptions opt;
        opt.output_times = map_time_grid(s.params.h, n);
        const double t1 = opt.output_times.empty() ? s.t_max.get_d() : opt.output_times.back();
        run.trajectory = reference_solve(f, {s.z0.x.get_d(), s.z0.y.get_d()}, s.params, 0.0, t1, opt);
        break;
      }
    }
  } catch (const TrajectoryError& e) {
    run.trajectory = e.partial();
    run.terminated = e.what();
  }
  run.escape = escape_time(run.trajectory, manifold_for(s.system, s.params.eps), s.threshold);
  return run;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

nlohmann::json summarize(const SchemeRun& run) {
  nlohmann::json j{{"scheme", std::string(to_string(run.scheme))}, {"samples", run.trajectory.size()}};
  j["terminated"] = run.terminated ? nlohmann::json(*run.terminated) : nlohmann::json(nullptr);
  if (run.escape) {
    const Sample& at = run.trajectory.samples[run.escape->index];
    j["escape"] = {{"t", run.escape->t}, {"x", at.x.to_double()}, {"y", at.y.to_double()}};
  } else {
    j["escape"] = nullptr;
  }
  if (!run.trajectory.empty()) {
    j["final"] = {{"t", run.trajectory.back().t.to_double()},
                  {"x", run.trajectory.back().x.to_double()},
                  {"y", run.trajectory.back().y.to_double()}};
  }
  return j;
}

RunResult simulate(const Scenario& s, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.runs.resize(s.schemes.size());
  parallel_for(s.schemes.size(), jobs, [&](std::size_t i) { result.runs[i] = run_scheme(s, s.schemes[i]); });

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& run : result.runs) {
    const std::string name = std::string(to_string(run.scheme)) + ".csv";
    write_file(s.out, name, trajectory_csv(run.trajectory));
    result.files.push_back(name);
    summary.push_back(summarize(run));
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.manifest = make_manifest(to_json(s), wall, s.out, result.files, summary);
  write_file(s.out, "manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

}  // namespace fastslow::app
