#include "fastslow/modified.hpp"

#include <cmath>

#include "fastslow/integrate.hpp"

namespace fastslow {

ModifiedVariant parse_variant(std::string_view name) {
  if (name == "engine") return ModifiedVariant::Engine;
  if (name == "paper" || name == "printed") return ModifiedVariant::Printed;
  throw InvalidInput("unknown variant '" + std::string(name) + "'");
}

ModifiedSystem derive_modified(const PolyVectorField& f0, int order) {
  if (order < 1) throw InvalidInput("modified equation order must be >= 1");
  if (order >= 2) throw NotImplemented("modified equations beyond first order are not implemented");

  const Jacobian J = jacobian(f0);
  const RationalPoly minus_half = sym::c(-1, 2);
  PolyVectorField f1{minus_half * (J[0][0] * f0.fx + J[0][1] * f0.fy),
                     minus_half * (J[1][0] * f0.fx + J[1][1] * f0.fy), f0.time_scale};
  const RationalPoly h = sym::h();
  PolyVectorField fh{f0.fx + h * f1.fx, f0.fy + h * f1.fy, f0.time_scale};
  return {f0, std::move(f1), std::move(fh), "euler, order 1: f1 = -1/2 Df0 f0"};
}

ModifiedSystem modified_for(CanonicalSystem system, ModifiedVariant variant) {
  ModifiedSystem m = derive_modified(canonical(system));
  if (variant == ModifiedVariant::Printed && system == CanonicalSystem::Transcritical) {
    using namespace sym;
    // Printed correction: -x(x^2 - y^2 + eps) + eps x instead of + eps y.
    m.f1.fx = -x() * (x() * x() - y() * y() + eps()) + eps() * x();
    m.fh.fx = m.f0.fx + h() * m.f1.fx;
    m.provenance = "euler, order 1, printed transcritical form (+eps h x)";
  }
  return m;
}

PolyVectorField fast_to_slow(const PolyVectorField& fast) {
  const RationalPoly inv = sym::eps_inv();
  return {fast.fx.step_over_eps() * inv, fast.fy.step_over_eps() * inv, TimeScale::Slow};
}

namespace {

PolyVectorField flow_field(const PolyVectorField& f0, FlowTarget target) {
  if (target == FlowTarget::Original) return f0;
  return derive_modified(f0).fh;
}

}  // namespace

double local_defect(const PolyVectorField& f0, const SystemParams& p, Point<double> z0, double h_step,
                    FlowTarget target) {
  if (!(h_step > 0)) throw InvalidInput("local_defect needs a positive step");
  SystemParams q = p;
  q.h = Rational(h_step);
  const PolyVectorField g = flow_field(f0, target);

  const Point<double> v = eval(f0, z0.x, z0.y, q);
  const double ex = z0.x + h_step * v.x;
  const double ey = z0.y + h_step * v.y;

  ReferenceOptions opt;
  opt.abstol = 1e-14;
  opt.reltol = 1e-14;
  const Trajectory ref = reference_solve(g, z0, q, 0.0, h_step, opt);
  const double rx = ref.back().x.to_double();
  const double ry = ref.back().y.to_double();
  return std::hypot(ex - rx, ey - ry);
}

OrderFit order_slope(const PolyVectorField& f0, const SystemParams& p, const RationalPoint& z0,
                     const Rational& t_end, const std::vector<Rational>& steps, FlowTarget target) {
  if (steps.size() < 3) throw InvalidInput("order_slope needs at least three step sizes");
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (!(steps[i] < steps[i - 1])) throw InvalidInput("order_slope step sizes must decrease");
  }
  if (t_end <= 0) throw InvalidInput("order_slope needs t_end > 0");

  OrderFit fit;
  for (const Rational& h : steps) {
    const Rational n_exact = t_end / h;
    if (n_exact.get_den() != 1) throw InvalidInput("each step size must divide t_end");
    const auto n = static_cast<std::size_t>(n_exact.get_num().get_ui());

    SystemParams q = p;
    q.h = h;
    if (f0.is_slow_form_fold() && !(h < q.eps)) throw InvalidInput("slow-form fold requires h < eps");
    const PolyVectorField g = flow_field(f0, target);

    const Trajectory euler = euler_iterate(f0, z0, q, n, 32);
    ReferenceOptions opt;
    opt.abstol = 1e-14;
    opt.reltol = 1e-14;
    const Trajectory ref = reference_solve(g, {z0.x.get_d(), z0.y.get_d()}, q, 0.0, t_end.get_d(), opt);
    const double err = std::hypot(euler.back().x.to_double() - ref.back().x.to_double(),
                                  euler.back().y.to_double() - ref.back().y.to_double());
    fit.steps.push_back(h.get_d());
    fit.errors.push_back(err);
  }

  for (double e : fit.errors) {
    if (!(e > 1e-13)) throw DegenerateFit("global errors at round-off level; slope undefined");
  }
  double mx = 0, my = 0;
  const double n = static_cast<double>(fit.steps.size());
  for (std::size_t i = 0; i < fit.steps.size(); ++i) {
    mx += std::log(fit.steps[i]);
    my += std::log(fit.errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < fit.steps.size(); ++i) {
    const double dx = std::log(fit.steps[i]) - mx;
    sxy += dx * (std::log(fit.errors[i]) - my);
    sxx += dx * dx;
  }
  fit.slope = sxy / sxx;
  return fit;
}

}  // namespace fastslow
