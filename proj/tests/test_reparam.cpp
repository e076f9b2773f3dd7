#include <cmath>
#include <memory>
#include <vector>

#include "bolza/reparam.hpp"
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

AdmissiblePair cellwise_pair(std::shared_ptr<const ProblemSpec> spec,
                             std::vector<double> nodes,
                             std::vector<double> controls) {
  ControlSignal u;
  u.grid.nodes = std::move(nodes);
  u.m = 1;
  u.flat = std::move(controls);
  return make_admissible_pair(std::move(spec), u);
}

}  // namespace

TEST_SUITE_BEGIN("reparam");

TEST_CASE("speed level set and its exact excess") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = cellwise_pair(spec, {0.0, 1.0 / 3.0, 1.0}, {3.0, 0.0});
  ExcessSet es = compute_level_set_S(pair.u, 2.0);
  CHECK(es.set.measure() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // integral of (|u|/nu - 1) over the fast cell: (3/2 - 1)/3.
  CHECK(es.excess == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  ExcessSet none = compute_level_set_S(pair.u, 4.0);
  CHECK(none.set.empty());
  CHECK(none.excess == 0.0);
}

TEST_CASE("time change construction balances to the endpoint exactly") {
  TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 4);
  std::vector<double> flat{2.0, 0.0, 0.0, 0.0};
  ControlSignal u;
  u.grid = grid;
  u.m = 1;
  u.flat = flat;
  // Slope 2 on [0,.25), 1/2 on [.25,.75), 1 on [.75,1): deviations cancel.
  ChangeOfVariable cov =
      build_phi(grid, IntervalSet::single(0.0, 0.25),
                IntervalSet::single(0.25, 0.75), 0.5, 1.0, u);
  cov.validate();
  CHECK(cov.s.back() == 1.0);  // pinned exactly
  CHECK(cov.phi(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cov.phi(0.75) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cov.psi(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(cov.sup_deviation() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cov.inverse_lipschitz() == doctest::Approx(2.0).epsilon(1e-12));
  // psi inverts phi everywhere, not just at breakpoints.
  for (double tau : {0.1, 0.3, 0.6, 0.9}) {
    CHECK(cov.psi(cov.phi(tau)) == doctest::Approx(tau).epsilon(1e-14));
  }
}

TEST_CASE("worked example, forced configuration") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = cellwise_pair(spec, {0.0, 1.0 / 3.0, 1.0}, {3.0, 0.0});
  double J = evaluate_cost(pair);
  double oracle_before = std::sqrt(10.0) / 3.0 + 2.0 / 3.0;
  CHECK(J == doctest::Approx(oracle_before).epsilon(1e-12));

  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, J);
  GrowthCertificate cert = check_H(spec->model, ctx);
  REQUIRE(cert.verdict == Verdict::Holds);

  ReparamOptions opt;
  opt.force_nu = 2.0;
  opt.force_mu = 0.5;
  opt.force_sigma = IntervalSet::single(1.0 / 3.0, 2.0 / 3.0);
  NicePairResult res = nice_pair(pair, ctx, cert, 0.0, opt);

  const ReparamCertificate& rc = res.certificate;
  CHECK(rc.nu == 2.0);
  CHECK(rc.mu == 0.5);
  CHECK(rc.cost_before == doctest::Approx(oracle_before).epsilon(1e-12));
  double oracle_after = std::sqrt(5.0) / 2.0 + 0.5;
  CHECK(rc.cost_after == doctest::Approx(oracle_after).epsilon(1e-12));
  CHECK(rc.cost_after < rc.cost_before);

  // phi hits the horizon exactly and stays within twice the excess.
  CHECK(rc.cov.s.back() == 1.0);
  CHECK(rc.level_sets.excess == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(rc.cov.sup_deviation() <= 2.0 * rc.level_sets.excess + 1e-12);

  // The output control is 2 on [0, 1/2] and 0 after.
  CHECK(res.pair.u.sup_norm() == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<double> at(1);
  res.pair.y.eval(0.5, at);
  CHECK(at[0] == doctest::Approx(1.0).epsilon(1e-12));  // still reaches 1
  for (int k = 0; k < res.pair.u.grid.cells(); ++k) {
    double mid = 0.5 * (res.pair.u.grid.nodes[k] + res.pair.u.grid.nodes[k + 1]);
    double expect = mid < 0.5 ? 2.0 : 0.0;
    CHECK(res.pair.u.cell(k)[0] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(res.pair.y.lipschitz_rank() <= 2.0 + 1e-12);
  CHECK(res.pair.dynamics_residual <= 1e-9);
  // Endpoints preserved exactly.
  CHECK(res.pair.y.node(res.pair.y.grid.cells())[0] ==
        pair.y.node(pair.y.grid.cells())[0]);
}

TEST_CASE("natural selection leaves slow pairs untouched") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair =
      cellwise_pair(spec, {0.0, 0.5, 1.0}, {0.5, -0.25});
  double J = evaluate_cost(pair);
  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, J);
  GrowthCertificate cert = check_H(spec->model, ctx);
  REQUIRE(cert.verdict == Verdict::Holds);

  NicePairResult res = nice_pair(pair, ctx, cert);
  CHECK(res.certificate.level_sets.excess == 0.0);
  CHECK(res.certificate.cov.sup_deviation() == 0.0);
  // Bitwise identical pair when the time change is the identity.
  CHECK(res.pair.u.grid.nodes == pair.u.grid.nodes);
  CHECK(res.pair.u.flat == pair.u.flat);
  CHECK(res.pair.y.flat == pair.y.flat);
  CHECK(res.certificate.cost_after == res.certificate.cost_before);
}

TEST_CASE("a narrow spike is slowed down and the cost certified") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = cellwise_pair(spec, {0.0, 0.01, 1.0}, {100.0, 0.0});
  double J = evaluate_cost(pair);
  CHECK(J == doctest::Approx(1.9900499987500564).epsilon(1e-12));

  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, J);
  GrowthCertificate cert = check_H(spec->model, ctx);
  REQUIRE(cert.verdict == Verdict::Holds);

  NicePairResult res = nice_pair(pair, ctx, cert);
  const ReparamCertificate& rc = res.certificate;
  CHECK(rc.nu == 64.0);
  CHECK(rc.mu == doctest::Approx(0.77873326516152441).epsilon(1e-12));
  CHECK(rc.cost_after == doctest::Approx(1.9844970628628227).epsilon(1e-9));
  CHECK(rc.cost_after <=
        rc.cost_before + 1e-8 * (1.0 + rc.cost_before));
  CHECK(res.pair.u.sup_norm() <= rc.nu + 1e-12);
  CHECK(rc.bound_u_inf <= rc.nu + 1e-12);
  // Speed-bound excess obeys the a-priori bound R/nu.
  CHECK(rc.level_sets.excess <= ctx.R / rc.nu + 1e-12);
  CHECK(rc.cov.sup_deviation() <= 2.0 * rc.level_sets.excess + 1e-12);
  // The time change is the identity past the compensating window.
  CHECK(rc.cov.phi(1.0) == 1.0);
}

TEST_CASE("selection rules: forcing bypasses selection but not checks") {
  auto spec = scalar_problem("minimal_length");
  AdmissiblePair pair = cellwise_pair(spec, {0.0, 1.0 / 3.0, 1.0}, {3.0, 0.0});
  double J = evaluate_cost(pair);
  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, J);
  GrowthCertificate cert = check_H(spec->model, ctx);

  // mu outside (0, 1) must be rejected.
  ReparamOptions bad_mu;
  bad_mu.force_mu = 1.5;
  CHECK_THROWS_AS((void)nice_pair(pair, ctx, cert, 0.0, bad_mu), Error);

  // A Sigma that does not live inside Omega \ S_nu must be rejected.
  ReparamOptions bad_sigma;
  bad_sigma.force_nu = 2.0;
  bad_sigma.force_mu = 0.5;
  bad_sigma.force_sigma = IntervalSet::single(0.0, 0.25);  // overlaps S_nu
  CHECK_THROWS_AS((void)nice_pair(pair, ctx, cert, 0.0, bad_sigma), Error);
}

TEST_CASE("certificates are demanded, not assumed") {
  auto spec = scalar_problem("g_not_h");
  // g_not_h is scalar-incompatible; build its natural 2d problem instead.
  auto spec2 = std::make_shared<ProblemSpec>();
  spec2->t = 0.0;
  spec2->T = 1.0;
  spec2->x = {0.0, 0.0};
  spec2->model = builtin_model("g_not_h");
  spec2->dynamics = Dynamics::make_identity(2);
  ControlSignal u;
  u.grid.nodes = {0.0, 1.0};
  u.m = 2;
  u.flat = {0.1, 0.2};
  AdmissiblePair pair = make_admissible_pair(spec2, u);
  double J = evaluate_cost(pair);
  BoundsContext ctx = make_bounds_context(*spec2, 0.0, 0.0, spec2->x, J);
  GrowthCertificate h = check_H(spec2->model, ctx);
  CHECK(h.verdict == Verdict::Fails);
  CHECK_THROWS_AS((void)nice_pair(pair, ctx, h), Error);
}

TEST_CASE("finiteness mode pays at most eta") {
  auto spec = scalar_problem("hnew_1d");
  // Hug the domain boundary on a short window, then coast.
  AdmissiblePair pair = cellwise_pair(spec, {0.0, 0.1, 1.0}, {-0.9, 0.2});
  double J = evaluate_cost(pair);
  CHECK(J == doctest::Approx(1.46231578947368).epsilon(1e-9));
  double eta = 0.1;
  BoundsContext ctx = make_bounds_context(*spec, 0.0, 0.0, spec->x, J, eta);
  GrowthCertificate m = check_M(spec->model, ctx);
  REQUIRE(m.verdict == Verdict::Holds);
  NicePairResult res = nice_pair(pair, ctx, m, eta);
  CHECK(res.certificate.cost_after <=
        res.certificate.cost_before + eta + 1e-8 * (1.0 + J));
  CHECK(res.pair.u.sup_norm() <= res.certificate.nu + 1e-12);
  CHECK(res.certificate.rho > 0.0);
  CHECK(std::isfinite(res.certificate.rho));
}

TEST_SUITE_END();
