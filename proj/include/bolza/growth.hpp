#pragma once

#include <map>

#include "bolza/constants.hpp"

namespace bolza {

enum class Verdict { Holds, Fails, Inconclusive };
const char* verdict_name(Verdict v);

// One sampled comparison in a verdict ladder. Field use per condition:
//   divergent tail (G):  nu_bar, Xi
//   core gap (H):        c, nu_bar, rho, Xi, Upsilon, margin
//   finite/stable (M):   c, nu_bar, rho, Xi, Upsilon, stable
//   superlinearity:      nu_bar = radius, Xi = sampled min, margin = min/radius
struct LadderRow {
  double c = 0.0;
  double nu_bar = 0.0;
  double rho = 0.0;
  double Xi = 0.0;
  double Upsilon = 0.0;
  double margin = 0.0;
  bool stable = true;
};

// Successful core-gap comparison: the same threshold pair (c, nu_bar) clears
// the margin at rho_bar, rho_bar/2 and rho_bar/4.
struct HWitness {
  double c = 0.0;
  double nu_bar = 0.0;
  double rho_bar = 0.0;
  double margin = 0.0;  // smallest margin across the rho list
  double Xi = 0.0;
  double Upsilon = 0.0;  // at the binding rho
};

struct GrowthCertificate {
  std::string condition;  // "G", "H", "M", "superlinear"
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
  std::vector<LadderRow> rows;
  std::optional<HWitness> witness;
};

struct GrowthCheckConfig {
  SamplerConfig sampler;

  // Divergent-tail ladder nu = 1, 2, ..., g_ladder_max with crossing
  // thresholds; a flat finite tail (last two rungs within the tolerances)
  // above the first threshold reads as Fails.
  double g_ladder_max = 1024.0;
  std::vector<double> g_thresholds = {-1.0, -10.0, -100.0};
  double g_tail_abs_tol = 2e-3;
  double g_tail_rel_tol = 1e-2;

  // Speed-threshold ladder: geometric steps over
  // (c_lo_factor * c_delta_B, c_hi_factor * c_delta_B], with a fixed fallback
  // range when c_delta_B vanishes.
  double c_lo_factor = 1.01;
  double c_hi_factor = 100.0;
  int c_steps = 8;
  double c_fallback_lo = 1e-2;
  double c_fallback_hi = 1e2;

  double nu_bar_max = 65536.0;  // doubling ladder 1, 2, 4, ...
  double margin_tol = 1e-9;
  double rho_start = 1.0;
  double rho_min = 1e-9;

  // Refinement stability and divergence guard for the finiteness condition.
  double stability_rel_tol = 1e-3;
  double divergence_guard = 1e6;

  // Superlinearity probe: radii 10^0 .. 10^(sl_decades-1); holds when the
  // sampled min/|u| ratio at least doubles across the last two decades.
  int sl_decades = 7;
  double sl_ratio = 2.0;
};

// Divergent-tail condition: Xi(nu) -> -inf along the rung ladder.
GrowthCertificate check_G(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg = {});

// Core-gap condition: some (c, nu_bar) satisfies
// Xi(nu_bar) + 2 Phi(B) < Upsilon(rho) for rho in {rho_bar, rho_bar/2,
// rho_bar/4} (single unfiltered comparison for real-valued integrands).
GrowthCertificate check_H(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg = {});

// Finiteness condition: some filtered core inf is finite and refinement-
// stable, and some tail sup is finite and refinement-stable.
GrowthCertificate check_M(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg = {});

// Sampled superlinearity probe (never reports Fails: a sampled min that stops
// growing is not a proof of sublinearity).
GrowthCertificate check_superlinearity(const LagrangianModel& model,
                                       const BoundsContext& ctx,
                                       const GrowthCheckConfig& cfg = {});

// First rho in the halving ladder rho_start, rho_start/2, ... >= rho_min whose
// filtered core sample set at speed threshold c is nonempty; +inf for
// real-valued integrands (distance +inf everywhere, no filter needed).
double find_rho_bar(const LagrangianModel& model, const BoundsContext& ctx,
                    double c, const GrowthCheckConfig& cfg = {});

// Re-evaluates the margins behind a core-gap witness against another bounds
// context (typically a smaller budget B); true when every margin clears the
// tolerance with the same (c, nu_bar, rho_bar).
bool verify_H_witness(const LagrangianModel& model, const BoundsContext& ctx,
                      const HWitness& witness,
                      const GrowthCheckConfig& cfg = {});

struct ImplicationReport {
  std::vector<std::string> violations;  // empty = certificates consistent
  std::vector<std::string> notes;
};

// Structural consistency of a set of verdicts, keyed by certificate
// condition name.
ImplicationReport cross_check_implications(
    const LagrangianModel& model,
    const std::map<std::string, GrowthCertificate>& certs);

}  // namespace bolza
