#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bolza/common.hpp"

namespace bolza {

// Radial structure along r -> L(s, y, r u):
//   RadiallyConvex         - convex in r on r > 0
//   PartiallyDifferentiable- the radial derivative exists at r = 1
//   Both                   - both hold
enum class RadialStructure { RadiallyConvex, PartiallyDifferentiable, Both };

// Nonnegative piecewise-constant function of time (used for the gamma term of
// the time-regularity data). Empty nodes = constant value.
struct PiecewiseConstantFn {
  std::vector<double> nodes;   // breakpoints (size k+1) or empty
  std::vector<double> values;  // size k, or size 1 when nodes is empty

  static PiecewiseConstantFn constant(double v) {
    PiecewiseConstantFn f;
    f.values = {v};
    return f;
  }
  double eval(double s) const;
  double l1_norm(double a, double b) const;
  bool is_zero() const;
};

// Data for the time-regularity bound
//   |L(s2,y,u) - L(s1,y,u)| <= (kappa L(s,y,u) + A|u| + gamma(s)) |s2 - s1|
// valid for s1, s2 within eps_star of s. Autonomous integrands carry
// kappa = A = 0, gamma = 0, eps_star = +inf (clamped to the horizon later).
struct ConditionSData {
  double kappa = 0.0;
  double A = 0.0;
  PiecewiseConstantFn gamma = PiecewiseConstantFn::constant(0.0);
  double eps_star = kInf;
  bool autonomous() const { return kappa == 0.0 && A == 0.0 && gamma.is_zero(); }
};

// Linear minorant L >= alpha |u| - d with alpha > 0, d >= 0.
struct LinearGrowth {
  double alpha = 1.0;
  double d = 0.0;
};

// Metric used for distance-to-boundary filters: control-space only (right
// choice for product domains) or the full (s, y, u) graph space.
enum class DistanceMetric { ControlOnly, FullGraph };

// Per-model overrides of sampler budgets (0 = keep caller defaults). State- or
// time-dependent models set these so default estimates stay fast.
struct SamplerHint {
  int s_count = 0;
  int ball_count = 0;
  int dir_count = 0;
  int mag_count = 0;
};

// Extended-valued running cost L(s, y, u) together with the structural
// metadata the estimators and the reparametrization pipeline need.
struct LagrangianModel {
  std::string name;
  int n = 1;  // state dimension
  int m = 1;  // control dimension

  // L; must return +inf outside the domain.
  std::function<double(double, StateView, ControlView)> value;
  // Analytic radial slope dL(s,y,ru)/dr at r=1 (a subgradient selection for
  // radially convex models). Null -> numeric fallback.
  std::function<double(double, StateView, ControlView)> radial_slope;
  // Closed-form radial intercept L - slope; avoids the cancellation of the
  // generic difference at large |u|. Null -> computed from value and slope.
  std::function<double(double, StateView, ControlView)> intercept_fn;
  // Finiteness predicate; null -> value(s,y,u) < inf.
  std::function<bool(double, StateView, ControlView)> in_domain;
  // Distance to the domain boundary (metric per boundary_metric); null -> +inf.
  std::function<double(double, StateView, ControlView)> boundary_distance;
  // Nearest boundary point in control space (optional; lets refinement slide
  // along active distance constraints). Writes m coordinates, returns false
  // when undefined.
  std::function<bool(double, StateView, ControlView, std::span<double>)>
      boundary_nearest;
  // Control cone membership; null -> all of R^m.
  std::function<bool(ControlView)> control_cone;

  RadialStructure structure = RadialStructure::Both;
  ConditionSData condition_s;
  LinearGrowth growth;
  DistanceMetric boundary_metric = DistanceMetric::ControlOnly;

  bool real_valued = true;
  bool time_invariant = true;
  bool state_invariant = true;
  bool domain_is_product = true;
  bool blows_up_at_boundary = false;
  // Bounded on bounded subsets lying well inside the domain (the hypothesis
  // under which a divergent tail implies a spectral gap).
  bool bounded_well_inside = true;
  // Radius of a control ball around 0 contained in the domain (0 = unknown).
  double superlinear_ball_radius = 0.0;

  SamplerHint sampler_hint;

  // Closed-form tail-sup / core-inf values, used by golden tests to check the
  // sampled estimators. Signatures: (nu, T) and (c, rho, T).
  std::function<double(double, double)> analytic_sup_tail;
  std::function<double(double, double, double)> analytic_inf_core;

  bool is_in_domain(double s, StateView y, ControlView u) const;
  bool in_cone(ControlView u) const;
  double boundary_dist(double s, StateView y, ControlView u) const;
};

// Tangent-line intercept of r -> L(s,y,ru) at r=1: L - Q where Q is the
// radial slope (analytic when available, else a robust numeric slope).
// Returns +inf outside the domain; at u = 0 the slope is 0 by convention.
double radial_intercept(const LagrangianModel& model, double s, StateView y,
                        ControlView u);

// Central difference slope of r -> L(s,y,ru) at r=1 with radial step h.
// Throws DomainEdge when a stencil point leaves the domain.
double numeric_radial_slope(const LagrangianModel& model, double s, StateView y,
                            ControlView u, double h);
inline double default_radial_step(ControlView u) {
  return std::min(1e-6 * std::max(1.0, norm2(u)), 0.5);
}
// Retries central -> one-sided with shrinking h before giving up.
double numeric_radial_slope_robust(const LagrangianModel& model, double s,
                                   StateView y, ControlView u);

// Converts a proximal time-regularity modulus |d_s L| <= beta (L + |u| + 1)
// into ConditionSData valid on the whole horizon [0, T].
ConditionSData condition_s_from_proximal(double beta, double T);

struct GrowthSearchConfig {
  int s_count = 9;
  int ball_count = 33;
  int dir_count = 64;
  int mag_count = 33;
  double u_max = 1e6;
  int max_doublings = 40;
};

// Searches a doubling ladder for a radius R such that the sampled slope excess
// Q - L is >= 1 on domain points with |u| >= R, |y| <= K; on success returns
// the implied linear minorant alpha = 1/R, d = 2. Empty optional = exhausted.
std::optional<LinearGrowth> extract_linear_growth(const LagrangianModel& model,
                                                  double K,
                                                  const GrowthSearchConfig& cfg = {});

// Named built-in models. Throws UnknownName.
LagrangianModel builtin_model(const std::string& name);
const std::vector<std::string>& builtin_model_names();

// Samples the time-regularity inequality on random triples (s, s1, s2) and
// control/state points; returns the worst violation (<= 0 means it held).
double condition_s_worst_violation(const LagrangianModel& model, double T,
                                   int samples = 2000, double K = 2.0,
                                   double u_cap = 8.0);

}  // namespace bolza
