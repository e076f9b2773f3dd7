#pragma once

#include "bolza/growth.hpp"

namespace bolza {

// Exact cell unions behind the time change: the slowdown set S (speeds above
// nu), its excess, the speed sublevel set, the well-inside set, and the
// speed-up set Sigma.
struct LevelSets {
  IntervalSet S_nu;      // {s : |u(s)| > nu}
  double excess = 0.0;   // integral over S_nu of (|u|/nu - 1)
  IntervalSet Omega_mu;  // {s : |u(s)| < mu c}
  IntervalSet J_rho;     // {s : dist((s, y(s), u(s)), boundary) >= 2 rho}
  IntervalSet Omega;     // Omega_mu intersect J_rho
  IntervalSet Sigma_nu;  // leftmost-fill subset of Omega \ S_nu
};

// Monotone piecewise-linear time change phi : [t,T] -> [t,T] with its exact
// piecewise-linear inverse psi (same breakpoints, coordinates swapped).
struct ChangeOfVariable {
  std::vector<double> tau;  // original-time breakpoints, strictly increasing
  std::vector<double> s;    // phi(tau), strictly increasing, s.front()=tau.front()

  double phi(double x) const;
  double psi(double x) const;
  double sup_deviation() const;      // max |phi(tau_k) - tau_k| (piecewise linear)
  double inverse_lipschitz() const;  // max cell slope of psi
  void validate() const;
};

// First stage of the level-set construction: the set where the speed exceeds
// nu, with its exact excess integral.
struct ExcessSet {
  IntervalSet set;
  double excess = 0.0;
};

ExcessSet compute_level_set_S(const ControlSignal& u, double nu);

// Midpoint rule output for the slowdown factor and the well-inside margin.
struct MuRhoSelection {
  double mu0 = 0.0;   // (c_delta_B / c + 1) / 2
  double Delta = 0.0; // (c_delta_B / (mu0 c) + 1) / 2
  double rho = 0.0;   // first halving rung with |J_rho| >= Delta (T - t)
  double mu = 0.0;    // max(mu0, c / (rho + c))
  double m = 0.0;     // Delta - c_delta_B / (mu c)
  IntervalSet Omega_mu;
  IntervalSet J_rho;
  IntervalSet Omega;
};

MuRhoSelection select_mu_rho(const BoundsContext& ctx, const AdmissiblePair& pair,
                             double c, double rho_bar, double rho_min = 1e-9);

// Smallest doubling-ladder speed bound nu >= max(nu_bar, c) with
// R/nu <= min{(1-mu) m (T - delta), eps_star/2}, and additionally
// (R/nu)(2 Phi(B) + Xi - Upsilon) <= eta when the certificate is the
// finiteness condition (eta must then be positive). Depends only on
// family-level constants, never on an individual pair.
double select_nu(const BoundsContext& ctx, double mu, double m, double eps_star,
                 const GrowthCertificate& certificate, double eta);

// Deterministic leftmost-fill subset of Omega \ S_nu with measure exactly
// excess / (1 - mu).
IntervalSet select_Sigma(const IntervalSet& Omega, const IntervalSet& S_nu,
                         double excess, double mu, double t, double T);

// Cumulative (compensated) integration of the cell slopes |u|/nu on S_nu, mu
// on Sigma_nu, 1 elsewhere. Every grid cell must lie entirely inside or
// outside each set; phi(T) = T is asserted to 1e-12 and then pinned exactly.
ChangeOfVariable build_phi(const TimeGrid& grid, const IntervalSet& S_nu,
                           const IntervalSet& Sigma_nu, double mu, double nu,
                           const ControlSignal& u);

// Pulls the pair back through the time change: same state values at remapped
// node times, controls rescaled to nu u/|u| on S_nu, u/mu on Sigma_nu.
AdmissiblePair reparametrize_pair(const AdmissiblePair& pair,
                                  const ChangeOfVariable& cov, double nu,
                                  double mu, const IntervalSet& S_nu,
                                  const IntervalSet& Sigma_nu,
                                  int substeps = 16);

// Everything the pipeline chose and measured, enough to re-verify the final
// cost inequality from the record alone.
struct ReparamCertificate {
  BoundsContext ctx;
  double c = 0.0;
  double mu = 0.0;
  double mu0 = 0.0;
  double Delta = 0.0;
  double rho = 0.0;
  double m = 0.0;   // measure margin Delta - c_delta_B / (mu c)
  double nu = 0.0;
  double eta = 0.0;
  SupInfEstimate Xi;       // tail sup at the witness threshold nu_bar
  SupInfEstimate Upsilon;  // well-inside core inf at (c, rho)
  LevelSets level_sets;
  ChangeOfVariable cov;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double bound_u_inf = 0.0;
  double lipschitz_rank_y = 0.0;
};

struct ReparamOptions {
  SamplerConfig sampler;
  QuadConfig quad;
  int substeps = 16;
  double rho_min = 1e-9;
  double cost_slack_rel = 1e-8;  // quadrature slack in the cost comparisons
  double premise_slack_rel = 1e-9;  // slack on the J <= B precondition
  // Test overrides for pinning a hand-checkable configuration; they bypass
  // the corresponding selection rule but none of the certificate checks.
  std::optional<double> force_nu;
  std::optional<double> force_mu;
  std::optional<IntervalSet> force_sigma;
};

struct NicePairResult {
  AdmissiblePair pair;
  ReparamCertificate certificate;
};

// Full pipeline: requires J(pair) <= ctx.B and a Holds certificate for the
// core-gap or finiteness condition; returns the reparametrized pair with
// |u| <= nu, Lipschitz states, and cost increased by at most the certified
// margin (decreased under the core gap). Raises CostRegression when the
// measured costs violate the certified inequality beyond quadrature slack.
NicePairResult nice_pair(const AdmissiblePair& pair, const BoundsContext& ctx,
                         const GrowthCertificate& certificate, double eta = 0.0,
                         const ReparamOptions& options = {});

}  // namespace bolza
