#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bolza/interval_set.hpp"
#include "bolza/lagrangian.hpp"
#include "bolza/quadrature.hpp"

namespace bolza {

// Strictly increasing time nodes spanning one interval.
struct TimeGrid {
  std::vector<double> nodes;

  static TimeGrid uniform(double a, double b, int cells);
  int cells() const { return static_cast<int>(nodes.size()) - 1; }
  double t0() const { return nodes.front(); }
  double t1() const { return nodes.back(); }
  double cell_len(int k) const { return nodes[k + 1] - nodes[k]; }
  // Index of the cell containing s (clamped to [0, cells-1]).
  int locate(double s) const;
  void validate() const;
};

// Piecewise-constant control: one R^m value per grid cell.
struct ControlSignal {
  TimeGrid grid;
  int m = 1;
  std::vector<double> flat;  // cells * m, row-major by cell

  static ControlSignal constant(TimeGrid grid, std::span<const double> value);
  ControlView cell(int k) const {
    return ControlView(flat.data() + static_cast<size_t>(k) * m,
                       static_cast<size_t>(m));
  }
  std::span<double> cell_mut(int k) {
    return std::span<double>(flat.data() + static_cast<size_t>(k) * m,
                             static_cast<size_t>(m));
  }
  double sup_norm() const;  // max over cells of |u_k|
  double l1_norm() const;   // integral of |u|
  void validate() const;
};

// Piecewise-linear state: one R^n value per grid node.
struct StateTrajectory {
  TimeGrid grid;
  int n = 1;
  std::vector<double> flat;  // (cells+1) * n, row-major by node

  StateView node(int k) const {
    return StateView(flat.data() + static_cast<size_t>(k) * n,
                     static_cast<size_t>(n));
  }
  std::span<double> node_mut(int k) {
    return std::span<double>(flat.data() + static_cast<size_t>(k) * n,
                             static_cast<size_t>(n));
  }
  void eval(double s, std::span<double> out) const;
  double sup_norm() const;
  double lipschitz_rank() const;  // max cell slope magnitude
  void validate() const;
};

// Controlled-linear dynamics y' = b(y) u with |b(y)| <= theta (1 + |y|).
struct Dynamics {
  int n = 1;
  int m = 1;
  bool identity = true;
  double theta = 1.0;
  // Row-major n x m matrix writer; null for identity (requires n == m).
  std::function<void(StateView, std::span<double>)> b;

  static Dynamics make_identity(int n, double theta = 1.0);
  void apply(StateView y, ControlView u, std::span<double> dy) const;
};

struct ProblemSpec {
  double t = 0.0;
  double T = 1.0;
  std::vector<double> x;  // initial state, size n
  LagrangianModel model;
  Dynamics dynamics;
  std::function<double(StateView)> terminal_cost;     // null -> 0
  std::function<bool(StateView)> in_state_set;        // null -> all of R^n
  std::function<bool(ControlView)> in_control_cone;   // null -> model cone
  // Optional: a state where the terminal cost is known finite. Endpoint-
  // constrained problems set this to the endpoint so search can seed a
  // feasible start; empty otherwise.
  std::vector<double> terminal_hint;

  double g(StateView y) const { return terminal_cost ? terminal_cost(y) : 0.0; }
  bool state_ok(StateView y) const { return in_state_set ? in_state_set(y) : true; }
  bool cone_ok(ControlView u) const {
    return in_control_cone ? in_control_cone(u) : model.in_cone(u);
  }
  void validate() const;
};

// Terminal cost encoding a hard endpoint: 0 inside the tolerance ball around
// target, +inf outside.
std::function<double(StateView)> endpoint_terminal(std::vector<double> target,
                                                   double tol = 1e-6);

struct AdmissiblePair {
  std::shared_ptr<const ProblemSpec> problem;
  StateTrajectory y;
  ControlSignal u;
  double dynamics_residual = 0.0;
};

// Integrates y' = b(y) u from problem.x over the control grid: exact for
// identity dynamics, classic RK4 with `substeps` stages per cell otherwise.
StateTrajectory integrate_state(const ProblemSpec& problem,
                                const ControlSignal& u, int substeps = 16);

// Max over cells of |y(node k+1) - one-cell re-integration from node k|,
// relative to 1 + |y|.
double dynamics_defect(const ProblemSpec& problem, const StateTrajectory& y,
                       const ControlSignal& u, int substeps = 16);

struct PairCheckConfig {
  double residual_tol = 1e-9;
  int substeps = 16;
};

// Builds the pair by integration (residual 0 by construction).
AdmissiblePair make_admissible_pair(std::shared_ptr<const ProblemSpec> problem,
                                    ControlSignal u, int substeps = 16);

// Validates an externally supplied pair: matching grids spanning [t, T],
// y(t) = x, cone membership per cell, state-set membership per node, and
// dynamics defect within tolerance.
AdmissiblePair assemble_admissible_pair(std::shared_ptr<const ProblemSpec> problem,
                                        StateTrajectory y, ControlSignal u,
                                        const PairCheckConfig& cfg = {});

struct CostBreakdown {
  double running = 0.0;
  double terminal = 0.0;
  double total = 0.0;
  double quad_error = 0.0;
  bool infinite = false;
};

CostBreakdown evaluate_cost_detail(const AdmissiblePair& pair,
                                   const QuadConfig& cfg = {});
double evaluate_cost(const AdmissiblePair& pair, const QuadConfig& cfg = {});

// Exact cell union {s in [t,T] : |u(s)| < sigma}.
IntervalSet sublevel_cells(const ControlSignal& u, double sigma);

struct MeasureBoundReport {
  double sigma = 0.0;
  double c_delta_B = 0.0;
  double measured = 0.0;
  double required = 0.0;
  bool holds = false;
};

// Checks the sublevel measure bound |{|u| < sigma}| >= (1 - c_t(B)/sigma)(T-t)
// for a pair with cost at most B; sigma must exceed c_t(B).
MeasureBoundReport check_measure_bound(const AdmissiblePair& pair, double B,
                                       double sigma);

// Re-discretizes the pair onto the union of its nodes and the given extra
// breakpoints. New interior states come from partial-cell integration (exact
// linear interpolation for identity dynamics), so per-cell defects stay at
// integrator roundoff.
AdmissiblePair refine_pair(const AdmissiblePair& pair,
                           const std::vector<double>& extra_breakpoints,
                           int substeps = 16);

}  // namespace bolza
