#pragma once

#include <optional>

#include "bolza/trajectory.hpp"

namespace bolza {

// Family-level constants for pairs with cost <= B, start times t <= delta,
// and starting points within delta_star of x_star.
struct BoundsContext {
  double T = 1.0;
  double delta = 0.0;
  double delta_star = 0.0;
  std::vector<double> x_star;
  double B = 1.0;
  double eta = 0.0;  // admissible cost increase (0 under a strict gap)
  double alpha = 1.0;
  double d = 0.0;
  double theta = 1.0;
  ConditionSData s_data;

  // Derived:
  double c_delta_B = 0.0;   // sublevel speed threshold at time delta
  double phi_B = 0.0;       // time-regularity budget
  double R = 0.0;           // uniform bound on the control L1 norm
  double K = 0.0;           // uniform bound on |y|
  double eps_star_eff = 0;  // min(eps_star, T)
};

// c_t(B) = (B + d (T - t)) / (alpha (T - t)); increasing in t and B.
double compute_c_t_B(double B, double alpha, double d, double T, double t);

// Phi(B) = kappa B + (A/alpha)(B + d T) + ||gamma||_L1([0,T]).
double compute_phi_B(double B, double alpha, double d, double T,
                     const ConditionSData& s_data);

// Uniform sup-norm bound on trajectories of the family (Gronwall):
// |x*| + delta* + theta T R e^{R theta} (|x*| + delta* + 1).
double gronwall_state_bound(double theta, double T, double R,
                            double x_star_norm, double delta_star);

BoundsContext make_bounds_context(const ProblemSpec& problem, double delta,
                                  double delta_star, std::vector<double> x_star,
                                  double B, double eta = 0.0);

// Deterministic sampling configuration for the sup/inf estimators. A second
// pass doubles every count (and squares the magnitude cap for tail sups) to
// measure refinement stability.
struct SamplerConfig {
  int s_count = 33;
  int ball_count = 257;
  int dir_count = 64;
  int mag_count = 33;
  double u_max = 1e6;
  int refine_iters = 80;
  int passes = 2;
  bool use_model_hint = true;
  std::function<bool(ControlView)> cone;  // extra restriction; null = model cone
};

struct SupInfEstimate {
  double value = 0.0;  // -inf (sup) / +inf (inf) sentinel when empty
  long long samples = 0;
  double max_abs_u = 0.0;
  double refinement_delta = 0.0;  // |last pass - previous pass|
  bool empty = false;
  // Argument of the reported extremum (diagnostics).
  double arg_s = 0.0;
  std::vector<double> arg_y;
  std::vector<double> arg_u;

  bool stable(double rel_tol = 1e-3) const {
    return !empty && std::isfinite(value) &&
           refinement_delta <= rel_tol * (1.0 + std::abs(value));
  }
};

// Sampled sup of the radial intercept over s in [0,T], |y| <= K,
// |u| in [nu, u_max], u in cone, L(s,y,u) < inf.
SupInfEstimate estimate_sup_tail(const LagrangianModel& model, double T,
                                 double K, double nu,
                                 const SamplerConfig& cfg = {});

// Sampled inf of the radial intercept over s in [0,T], |y| <= K, |u| < c,
// u in cone, L(s,y,u) < inf, boundary distance >= rho (rho = 0 disables the
// filter; real-valued models have distance +inf everywhere).
SupInfEstimate estimate_inf_core(const LagrangianModel& model, double T,
                                 double K, double c, double rho,
                                 const SamplerConfig& cfg = {});

// Sampled min of the integrand itself (not the intercept) over s in [0,T],
// |y| <= K and the admissible sphere |u| = r (superlinearity probes).
SupInfEstimate estimate_min_on_sphere(const LagrangianModel& model, double T,
                                      double K, double r,
                                      const SamplerConfig& cfg = {});

enum class UniformBVariant {
  ReachableTarget,   // straight-motion bound toward a target with finite g
  ZeroControl,       // constant state, u = 0 (requires 0 in the cone)
  ConstantControl,   // constant control u*, Gronwall-bounded states
};

struct UniformBRequest {
  UniformBVariant variant = UniformBVariant::ZeroControl;
  double delta = 0.0;
  double delta_star = 0.0;
  std::vector<double> x_star;
  std::vector<double> xi_star;  // ReachableTarget
  std::vector<double> u_star;   // ConstantControl
};

// Uniform cost bound over the family of start points, from one explicit
// admissible competitor per variant. May return +inf when the sampled sup is
// unbounded; throws VariantInapplicable when the variant's prerequisites fail.
double compute_uniform_B(const ProblemSpec& problem, const UniformBRequest& req,
                         const SamplerConfig& cfg = {});

}  // namespace bolza
