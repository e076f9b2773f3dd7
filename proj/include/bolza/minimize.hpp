#pragma once

#include "bolza/reparam.hpp"

namespace bolza {

// Budgets for the direct lattice solver.
struct MinimizeConfig {
  std::vector<int> grid_ladder = {16, 32, 64, 128, 256};
  std::vector<double> control_bound_ladder = {1.0, 2.0, 4.0, 8.0, 16.0};
  int inner_iters = 40;     // coordinate sweeps per solve (early-stopped)
  int restarts = 3;         // random starts besides the deterministic ones
  std::uint64_t seed = 1;
  QuadConfig quad;          // reporting quadrature for solved pairs
  double noise_tol = 1e-6;  // solver noise allowed by monotonicity checks
  double gap_rel_tol = 1e-3;  // gap verdict threshold, relative to 1 + |inf|

  void validate() const;
};

// Best admissible pair found by multi-start coordinate descent over
// piecewise-constant controls on the uniform grid with `cells` cells. Each
// control coordinate is line-searched (coarse scan + golden section) inside
// the ball |u_k| <= control_bound; cone, state-set and domain violations read
// as +inf. Starts: the optional warm start (any grid over the same horizon,
// resampled by cell midpoint), the zero control, the constant control aiming
// at problem.terminal_hint, and cfg.restarts seeded random perturbations.
// When terminal_hint is set (and the dynamics are the identity) the endpoint
// is treated as hard: every move pairs with a compensating move on the last
// cell so the reachable endpoint is preserved exactly. Deterministic given
// cfg.seed. Throws NoAdmissiblePoint when every start stays at +inf.
AdmissiblePair minimize_direct(std::shared_ptr<const ProblemSpec> problem,
                               int cells, double control_bound,
                               const MinimizeConfig& cfg = {},
                               const ControlSignal* warm_start = nullptr);

// Solves the grid ladder at the largest control bound, warm-starting each
// rung from the previous one, and pushes every solution through nice_pair.
// All returned certificates share one speed bound nu: rungs whose natural nu
// comes out smaller are re-run with the maximal nu forced (always admissible,
// since every certificate check is monotone in nu).
std::vector<NicePairResult> minimizing_sequence(
    std::shared_ptr<const ProblemSpec> problem, const BoundsContext& ctx,
    const GrowthCertificate& certificate, const MinimizeConfig& cfg = {},
    double eta = 0.0, const ReparamOptions& reparam_options = {});

enum class GapVerdict { NoGapDetected, GapSuspected };
const char* gap_verdict_name(GapVerdict v);

// Best cost found at one (grid, control bound) lattice cell.
struct GapCell {
  int cells = 0;
  double bound = 0.0;
  double cost = 0.0;
};

struct GapReport {
  // Bound-major: all grid rungs at the first bound, then the next bound.
  std::vector<GapCell> lattice;
  double lipschitz_inf = 0.0;      // grid-ladder limit at the largest bound
  double unconstrained_inf = 0.0;  // joint (diagonal) refinement limit
  double gap_estimate = 0.0;       // lipschitz_inf - unconstrained_inf
  double gap_tol = 0.0;            // gap_rel_tol * (1 + |unconstrained_inf|)
  GapVerdict verdict = GapVerdict::GapSuspected;
  std::string caveat;  // the documented lattice-convergence assumption
};

// Best costs over the (grid x control bound) lattice, each cell warm-started
// from its neighbours below in both ladders, so best costs are nonincreasing
// along either axis up to reporting-quadrature noise (cfg.noise_tol). The two
// infima are last-rung Richardson extrapolations: the Lipschitz-class one
// along the grid ladder at the largest bound, the unconstrained one along the
// lattice diagonal.
GapReport lavrentiev_probe(std::shared_ptr<const ProblemSpec> problem,
                           const MinimizeConfig& cfg = {});

}  // namespace bolza
