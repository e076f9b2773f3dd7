#include <cmath>
#include <memory>
#include <vector>

#include "bolza/trajectory.hpp"
#include "doctest.h"

using namespace bolza;

namespace {

std::shared_ptr<ProblemSpec> scalar_problem(const std::string& model,
                                            double t = 0.0, double T = 1.0,
                                            double x = 0.0) {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = t;
  spec->T = T;
  spec->x = {x};
  spec->model = builtin_model(model);
  spec->dynamics = Dynamics::make_identity(spec->model.n);
  return spec;
}

// The worked input: speed 3 on the first third, rest at zero.
AdmissiblePair worked_pair(std::shared_ptr<const ProblemSpec> spec) {
  ControlSignal u;
  u.grid.nodes = {0.0, 1.0 / 3.0, 1.0};
  u.m = 1;
  u.flat = {3.0, 0.0};
  return make_admissible_pair(std::move(spec), u);
}

}  // namespace

TEST_SUITE_BEGIN("trajectory");

TEST_CASE("uniform grids locate points and report cell lengths") {
  TimeGrid g = TimeGrid::uniform(0.0, 1.0, 4);
  g.validate();
  CHECK(g.cells() == 4);
  CHECK(g.t0() == 0.0);
  CHECK(g.t1() == 1.0);
  double total = 0.0;
  for (int k = 0; k < g.cells(); ++k) total += g.cell_len(k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.locate(0.0) == 0);
  CHECK(g.locate(0.25) == 1);  // half-open cells
  CHECK(g.locate(0.999) == 3);
  CHECK(g.locate(1.0) == 3);  // right endpoint folds into the last cell
}

TEST_CASE("control signals expose sup and L1 norms exactly") {
  ControlSignal u;
  u.grid.nodes = {0.0, 0.25, 1.0};
  u.m = 2;
  u.flat = {3.0, 4.0, 0.0, -1.0};
  u.validate();
  CHECK(u.sup_norm() == doctest::Approx(5.0).epsilon(1e-15));  // |(3,4)| = 5
  CHECK(u.l1_norm() == doctest::Approx(5.0 * 0.25 + 1.0 * 0.75).epsilon(1e-15));
  CHECK(u.cell(1)[1] == -1.0);

  std::vector<double> level{1.5};
  ControlSignal c = ControlSignal::constant(TimeGrid::uniform(0.0, 2.0, 3), level);
  CHECK(c.sup_norm() == 1.5);
  CHECK(c.l1_norm() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("identity dynamics integrate exactly; trajectories interpolate") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = worked_pair(spec);
  CHECK(pair.dynamics_residual == 0.0);
  CHECK(pair.y.node(1)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pair.y.node(2)[0] == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> out(1);
  pair.y.eval(1.0 / 6.0, out);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pair.y.sup_norm() == doctest::Approx(1.0));
  CHECK(pair.y.lipschitz_rank() == doctest::Approx(3.0));
}

TEST_CASE("state-dependent dynamics integrate with RK4 accuracy") {
  // y' = y u with u = 1: y(1) = e. 32 cells, 16 substeps.
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {1.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics.n = 1;
  spec->dynamics.m = 1;
  spec->dynamics.identity = false;
  spec->dynamics.theta = 1.0;
  spec->dynamics.b = [](StateView y, std::span<double> out) { out[0] = y[0]; };
  std::vector<double> one{1.0};
  ControlSignal u = ControlSignal::constant(TimeGrid::uniform(0.0, 1.0, 32), one);
  StateTrajectory y = integrate_state(*spec, u);
  CHECK(y.node(32)[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(dynamics_defect(*spec, y, u) <= 1e-9);
}

TEST_CASE("cost quadrature matches the closed form of the worked input") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = worked_pair(spec);
  double oracle = std::sqrt(10.0) / 3.0 + 2.0 / 3.0;
  CostBreakdown detail = evaluate_cost_detail(pair);
  CHECK(detail.total == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(detail.terminal == 0.0);
  CHECK_FALSE(detail.infinite);
  CHECK(evaluate_cost(pair) == detail.total);
}

TEST_CASE("terminal costs: endpoint ball and quadratic") {
  auto g = endpoint_terminal({1.0}, 1e-6);
  std::vector<double> hit{1.0 + 5e-7};
  std::vector<double> miss{1.0 + 5e-6};
  CHECK(g(hit) == 0.0);
  CHECK(g(miss) == kInf);

  auto spec = scalar_problem("minimal_length");
  spec->terminal_cost = [](StateView y) { return (y[0] - 2.0) * (y[0] - 2.0); };
  AdmissiblePair pair = worked_pair(spec);
  CHECK(evaluate_cost_detail(pair).terminal == doctest::Approx(1.0));
}

TEST_CASE("external pairs are validated against the declared dynamics") {
  auto spec = scalar_problem("minimal_length");
  ControlSignal u;
  u.grid.nodes = {0.0, 0.5, 1.0};
  u.m = 1;
  u.flat = {1.0, 0.0};
  StateTrajectory y;
  y.grid = u.grid;
  y.n = 1;
  y.flat = {0.0, 0.5, 0.5};
  AdmissiblePair ok = assemble_admissible_pair(spec, y, u);
  CHECK(ok.dynamics_residual <= 1e-9);

  StateTrajectory bad = y;
  bad.flat = {0.0, 0.7, 0.7};  // violates y' = u on the first cell
  CHECK_THROWS_AS((void)assemble_admissible_pair(spec, bad, u), Error);

  StateTrajectory wrong_start = y;
  wrong_start.flat = {0.25, 0.75, 0.75};
  CHECK_THROWS_AS((void)assemble_admissible_pair(spec, wrong_start, u), Error);
}

TEST_CASE("sublevel cells and the measure bound") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = worked_pair(spec);
  double B = evaluate_cost(pair);

  IntervalSet slow = sublevel_cells(pair.u, 1.0);  // cells with |u| < 1
  CHECK(slow.measure() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  // c_0(B) = B here (alpha = 1, d = 0, T - t = 1); any sigma above it obeys
  // |{|u| < sigma}| >= (1 - c/sigma)(T - t).
  for (double sigma : {2.0, 2.5, 10.0}) {
    MeasureBoundReport rep = check_measure_bound(pair, B, sigma);
    CHECK(rep.holds);
    CHECK(rep.c_delta_B == doctest::Approx(B).epsilon(1e-15));
    CHECK(rep.measured >= rep.required - 1e-15);
  }
  // sigma below the threshold is rejected as a precondition.
  CHECK_THROWS_AS((void)check_measure_bound(pair, B, 0.5 * B), Error);
}

TEST_CASE("refinement adds breakpoints without changing the pair") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = worked_pair(spec);
  double before = evaluate_cost(pair);
  AdmissiblePair fine = refine_pair(pair, {0.1, 0.5, 0.9});
  CHECK(fine.u.grid.cells() == 5);
  CHECK(fine.u.sup_norm() == pair.u.sup_norm());
  CHECK(evaluate_cost(fine) == doctest::Approx(before).epsilon(1e-12));
  std::vector<double> a(1), b(1);
  for (double s : {0.05, 0.3, 0.7, 0.95}) {
    pair.y.eval(s, a);
    fine.y.eval(s, b);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
  }
}

TEST_SUITE_END();
