#include <cmath>
#include <memory>
#include <vector>

#include "bolza/minimize.hpp"
#include "doctest.h"

using namespace bolza;

namespace {

// Quadratic running cost with a quadratic terminal pull toward y = 1. The
// closed-form optimum (constant control 1/2, cost 1/2) makes this the
// cross-check problem for the direct solver.
LagrangianModel lq_model() {
  LagrangianModel mdl;
  mdl.name = "lq";
  mdl.n = 1;
  mdl.m = 1;
  mdl.value = [](double, StateView, ControlView u) { return u[0] * u[0]; };
  mdl.radial_slope = [](double, StateView, ControlView u) {
    return 2.0 * u[0] * u[0];
  };
  mdl.growth = {1.0, 0.25};  // u^2 >= |u| - 1/4
  return mdl;
}

std::shared_ptr<ProblemSpec> lq_problem() {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = lq_model();
  spec->dynamics = Dynamics::make_identity(1);
  spec->terminal_cost = [](StateView y) {
    return (y[0] - 1.0) * (y[0] - 1.0);
  };
  return spec;
}

std::shared_ptr<ProblemSpec> geodesic_problem() {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics = Dynamics::make_identity(1);
  spec->terminal_cost = endpoint_terminal({1.0});
  spec->terminal_hint = {1.0};
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("minimize");

TEST_CASE("config validation") {
  MinimizeConfig ok;
  ok.validate();
  MinimizeConfig bad = ok;
  bad.grid_ladder = {16, 8};  // not increasing
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.control_bound_ladder.clear();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.inner_iters = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("quadratic problem hits the closed-form optimum") {
  auto pair = minimize_direct(lq_problem(), 64, 4.0);
  double cost = evaluate_cost(pair);
  CHECK(cost == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(pair.u.sup_norm() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(pair.dynamics_residual <= 1e-9);
  // Deterministic: the same call reproduces the same cost bit for bit.
  auto again = minimize_direct(lq_problem(), 64, 4.0);
  CHECK(evaluate_cost(again) == cost);
}

TEST_CASE("hard endpoint: straight line is found exactly") {
  auto pair = minimize_direct(geodesic_problem(), 32, 1.0);
  CHECK(evaluate_cost(pair) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // Endpoint reached to solver tolerance.
  CHECK(pair.y.node(pair.y.grid.cells())[0] ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("free problem settles at the zero control") {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics = Dynamics::make_identity(1);
  auto pair = minimize_direct(spec, 32, 2.0);
  CHECK(evaluate_cost(pair) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair.u.sup_norm() == 0.0);
}

TEST_CASE("unreachable endpoints raise instead of lying") {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics = Dynamics::make_identity(1);
  spec->terminal_cost = endpoint_terminal({10.0});
  spec->terminal_hint = {10.0};
  MinimizeConfig cfg;
  cfg.restarts = 1;
  try {
    (void)minimize_direct(spec, 8, 1.0, cfg);  // needs |u| = 10 > 1
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoAdmissiblePoint);
  }
}

TEST_CASE("binding control bounds produce the constrained optima") {
  // min integral u^2 + (y(1)-1)^2 with |u| <= b: u = min(b, 1/2) constant,
  // cost b^2 + (b-1)^2 for b < 1/2.
  MinimizeConfig cfg;
  cfg.grid_ladder = {8, 16};
  cfg.control_bound_ladder = {0.25, 0.5, 1.0};
  GapReport rep = lavrentiev_probe(lq_problem(), cfg);
  REQUIRE(rep.lattice.size() == 6);
  // Bound-major layout.
  CHECK(rep.lattice[0].bound == 0.25);
  CHECK(rep.lattice[1].bound == 0.25);
  CHECK(rep.lattice[2].bound == 0.5);
  CHECK(rep.lattice[0].cells == 8);
  CHECK(rep.lattice[1].cells == 16);
  CHECK(rep.lattice[0].cost == doctest::Approx(0.625).epsilon(1e-6));
  CHECK(rep.lattice[2].cost == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.lattice[4].cost == doctest::Approx(0.5).epsilon(1e-6));
  // Costs never increase with the bound at fixed grid.
  CHECK(rep.lattice[2].cost <= rep.lattice[0].cost + cfg.noise_tol);
  CHECK(rep.lipschitz_inf == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.verdict == GapVerdict::NoGapDetected);
  CHECK_FALSE(rep.caveat.empty());
}

TEST_CASE("no gap detected on the geodesic problem") {
  MinimizeConfig cfg;
  cfg.grid_ladder = {8, 16, 32};
  cfg.control_bound_ladder = {1.0, 2.0};
  GapReport rep = lavrentiev_probe(geodesic_problem(), cfg);
  CHECK(rep.verdict == GapVerdict::NoGapDetected);
  CHECK(std::abs(rep.gap_estimate) <= rep.gap_tol);
  CHECK(rep.lipschitz_inf == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(rep.unconstrained_inf ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  // Every lattice cell already sits at the geodesic cost.
  for (const GapCell& cell : rep.lattice) {
    CHECK(cell.cost == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
}

TEST_CASE("bounds too small for the endpoint are empty lattice cells") {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics = Dynamics::make_identity(1);
  spec->terminal_cost = endpoint_terminal({2.0});
  spec->terminal_hint = {2.0};
  MinimizeConfig cfg;
  cfg.grid_ladder = {8, 16};
  cfg.control_bound_ladder = {1.0, 4.0};  // 1.0 cannot reach y(1) = 2
  cfg.restarts = 1;
  GapReport rep = lavrentiev_probe(spec, cfg);
  REQUIRE(rep.lattice.size() == 4);
  CHECK(rep.lattice[0].cost == kInf);
  CHECK(rep.lattice[1].cost == kInf);
  CHECK(rep.lattice[2].cost ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
  CHECK(std::isfinite(rep.lipschitz_inf));
  CHECK(rep.verdict == GapVerdict::NoGapDetected);
}

TEST_CASE("minimizing sequences share one speed bound") {
  auto spec = std::make_shared<ProblemSpec>();
  spec->t = 0.0;
  spec->T = 1.0;
  spec->x = {0.0};
  spec->model = builtin_model("minimal_length");
  spec->dynamics = Dynamics::make_identity(1);

  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, 1.0);
  GrowthCertificate cert = check_H(spec->model, ctx);
  REQUIRE(cert.verdict == Verdict::Holds);

  MinimizeConfig cfg;
  cfg.grid_ladder = {8, 16, 32};
  cfg.control_bound_ladder = {1.0, 2.0};
  std::vector<NicePairResult> seq = minimizing_sequence(spec, ctx, cert, cfg);
  REQUIRE(seq.size() == 3);
  double nu = seq.front().certificate.nu;
  for (const NicePairResult& rung : seq) {
    CHECK(rung.certificate.nu == nu);
    CHECK(rung.pair.u.sup_norm() <= nu + 1e-12);
    CHECK(rung.certificate.cost_after <=
          rung.certificate.cost_before + 1e-8 * (1.0 + rung.certificate.cost_before));
  }
  // Costs along the sequence do not increase (warm-started ladder).
  for (size_t i = 1; i < seq.size(); ++i) {
    CHECK(seq[i].certificate.cost_after <=
          seq[i - 1].certificate.cost_after + cfg.noise_tol);
  }
  // The zero control is optimal here; the ladder finds it immediately.
  CHECK(seq.back().certificate.cost_after == doctest::Approx(1.0));

  GrowthCertificate fails;
  fails.condition = "H";
  fails.verdict = Verdict::Fails;
  CHECK_THROWS_AS((void)minimizing_sequence(spec, ctx, fails, cfg), Error);
}

TEST_SUITE_END();
