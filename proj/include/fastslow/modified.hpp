#pragma once

#include <string>
#include <vector>

#include "fastslow/vector_field.hpp"

namespace fastslow {

/// First-order modified field of the Euler scheme: fh = f0 + h f1 with
/// f1 = -1/2 Df0 f0. The symbol h is the step of the scheme applied to f0 in
/// f0's own time scale (for a fast-time field it plays the role of h/eps).
struct ModifiedSystem {
  PolyVectorField f0;
  PolyVectorField f1;
  PolyVectorField fh;
  std::string provenance;
};

/// Form of the transcritical modified equation. `Engine` is the generic
/// -1/2 Df0 f0 correction (+eps h y); `Printed` carries +eps h x instead. Both
/// agree on the invariant line y = x.
enum class ModifiedVariant { Engine, Printed };

ModifiedVariant parse_variant(std::string_view name);

/// Builds the modified system of the requested order. Only order 1 exists.
ModifiedSystem derive_modified(const PolyVectorField& f0, int order = 1);

/// Modified system of a canonical field; `Printed` only differs for the
/// transcritical system.
ModifiedSystem modified_for(CanonicalSystem system, ModifiedVariant variant = ModifiedVariant::Engine);

/// Fast-time field rewritten in slow time: h -> h/eps, then divided by eps.
PolyVectorField fast_to_slow(const PolyVectorField& fast);

enum class FlowTarget { Modified, Original };

/// Distance between one Euler step of f0 of size h_step from z0 and the
/// time-h_step flow of fh (or f0 itself with FlowTarget::Original). The flow
/// comes from the embedded Runge-Kutta reference solver at tolerance 1e-14.
double local_defect(const PolyVectorField& f0, const SystemParams& p, Point<double> z0, double h_step,
                    FlowTarget target = FlowTarget::Modified);

struct OrderFit {
  double slope = 0.0;
  std::vector<double> steps;
  std::vector<double> errors;
};

/// Least-squares slope of log(global error at t_end) against log(h), where the
/// error compares Euler iterates of f0 with the reference flow of fh (or f0).
/// Each h must divide t_end. Throws DegenerateFit when the errors sit at
/// round-off level and DivergenceError when a run escapes before t_end.
OrderFit order_slope(const PolyVectorField& f0, const SystemParams& p, const RationalPoint& z0,
                     const Rational& t_end, const std::vector<Rational>& steps,
                     FlowTarget target = FlowTarget::Modified);

}  // namespace fastslow
