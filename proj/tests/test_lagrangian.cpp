#include <cmath>
#include <vector>

#include "bolza/lagrangian.hpp"
#include "doctest.h"

using namespace bolza;

namespace {

double val(const LagrangianModel& mdl, std::vector<double> u,
           std::vector<double> y = {}, double s = 0.0) {
  if (y.empty()) y.assign(static_cast<size_t>(mdl.n), 0.0);
  return mdl.value(s, y, u);
}

double intercept(const LagrangianModel& mdl, std::vector<double> u,
                 std::vector<double> y = {}, double s = 0.0) {
  if (y.empty()) y.assign(static_cast<size_t>(mdl.n), 0.0);
  return radial_intercept(mdl, s, y, u);
}

}  // namespace

TEST_SUITE_BEGIN("lagrangian");

TEST_CASE("builtin catalogue") {
  CHECK(builtin_model_names().size() == 6);
  for (const auto& name : builtin_model_names()) {
    LagrangianModel mdl = builtin_model(name);
    CHECK(mdl.name == name);
    CHECK(mdl.growth.alpha > 0.0);
    CHECK(mdl.growth.d >= 0.0);
  }
  CHECK_THROWS_AS((void)builtin_model("nope"), Error);
}

TEST_CASE("arc-length integrand: values and intercept") {
  LagrangianModel mdl = builtin_model("minimal_length");
  CHECK(val(mdl, {2.0}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(val(mdl, {0.0}) == 1.0);
  // Tangent-line intercept of sqrt(1+u^2) at u is 1/sqrt(1+u^2).
  for (double u : {0.5, 1.0, 3.0, 10.0}) {
    CHECK(intercept(mdl, {u}) ==
          doctest::Approx(1.0 / std::sqrt(1.0 + u * u)).epsilon(1e-12));
  }
  CHECK(mdl.real_valued);
  CHECK(mdl.time_invariant);
}

TEST_CASE("intercept plus radial slope reproduces the integrand") {
  // L = P + Q with P the tangent intercept and Q the radial slope at r = 1.
  for (const auto& name : builtin_model_names()) {
    LagrangianModel mdl = builtin_model(name);
    std::vector<double> y(static_cast<size_t>(mdl.n), 0.25);
    std::vector<std::vector<double>> probes;
    if (mdl.m == 1) {
      probes = {{0.3}, {-0.5}, {0.9}};
    } else {
      probes = {{0.3, 0.1}, {0.2, 0.5}, {-0.4, 0.2}};
    }
    for (auto& u : probes) {
      double L = mdl.value(0.25, y, u);
      if (!std::isfinite(L)) continue;
      double P = radial_intercept(mdl, 0.25, y, u);
      double Q = mdl.radial_slope ? mdl.radial_slope(0.25, y, u)
                                  : numeric_radial_slope_robust(mdl, 0.25, y, u);
      CHECK(P + Q == doctest::Approx(L).epsilon(1e-10));
    }
  }
}

TEST_CASE("numeric radial slope agrees with the analytic one") {
  for (const auto& name : {"minimal_length", "radial_concave", "g_not_h"}) {
    LagrangianModel mdl = builtin_model(name);
    std::vector<double> y(static_cast<size_t>(mdl.n), 0.0);
    std::vector<double> u(static_cast<size_t>(mdl.m), 0.0);
    u[0] = 0.7;
    if (mdl.m > 1) u[1] = 1.2;
    double analytic = mdl.radial_slope(0.0, y, u);
    double numeric = numeric_radial_slope_robust(mdl, 0.0, y, u);
    CHECK(numeric == doctest::Approx(analytic).epsilon(1e-4));
  }
}

TEST_CASE("pole-at-minus-one integrand: branches, domain, boundary distance") {
  LagrangianModel mdl = builtin_model("hnew_1d");
  CHECK(val(mdl, {-2.0}) == kInf);
  CHECK(val(mdl, {-1.0}) == kInf);
  CHECK(val(mdl, {-0.5}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(val(mdl, {0.5}) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(val(mdl, {2.0}) == doctest::Approx(5.0).epsilon(1e-15));
  // Parabola branch intercept: (u^2+1) - u*2u = 1 - u^2.
  CHECK(intercept(mdl, {2.0}) == doctest::Approx(-3.0).epsilon(1e-12));
  std::vector<double> y{0.0};
  std::vector<double> u{-0.5};
  CHECK(mdl.boundary_dist(0.0, y, u) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(mdl.real_valued);
  CHECK(mdl.growth.alpha == 2.0);
  CHECK(mdl.growth.d == 0.0);
}

TEST_CASE("surface integrand: state jump and time factor") {
  LagrangianModel mdl = builtin_model("discont_surface");
  std::vector<double> up{1.0, 0.0};   // y1 > 0: factor 2
  std::vector<double> dn{-1.0, 0.0};  // y1 <= 0: factor 1
  std::vector<double> u{1.0, 0.0};
  double base = std::sqrt(2.0);
  CHECK(mdl.value(0.0, up, u) == doctest::Approx(2.0 * base).epsilon(1e-15));
  CHECK(mdl.value(0.0, dn, u) == doctest::Approx(base).epsilon(1e-15));
  // phi(s) = 1 + 0.001 s multiplies everything.
  CHECK(mdl.value(1.0, dn, u) ==
        doctest::Approx(1.001 * base).epsilon(1e-15));
  CHECK_FALSE(mdl.condition_s.autonomous());
  CHECK(mdl.condition_s.kappa == doctest::Approx(0.001));
  CHECK_FALSE(mdl.time_invariant);
  CHECK_FALSE(mdl.state_invariant);
}

TEST_CASE("sector integrand: ray factor inside, plain quadratic outside") {
  LagrangianModel mdl = builtin_model("g_not_h");
  CHECK(val(mdl, {1.0, 2.0}) == doctest::Approx(10.0));  // 5 * 2/1
  CHECK(val(mdl, {2.0, 1.0}) == doctest::Approx(5.0));   // outside sector
  CHECK(val(mdl, {-1.0, 2.0}) == doctest::Approx(5.0));
  CHECK(intercept(mdl, {1.0, 2.0}) == doctest::Approx(-10.0));
  CHECK_FALSE(mdl.bounded_well_inside);
}

TEST_CASE("concave-radial integrand: slope at r=1 and intercept limit") {
  LagrangianModel mdl = builtin_model("radial_concave");
  CHECK(val(mdl, {1.0}) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));
  CHECK(mdl.structure == RadialStructure::PartiallyDifferentiable);
  // Intercept -1/sqrt(1+u^2): -1 at the origin limit, -1/sqrt(2) at |u|=1.
  CHECK(intercept(mdl, {1.0}) ==
        doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("star-domain integrand: two branches and the barrier") {
  LagrangianModel mdl = builtin_model("extended_star");
  // Disk branch (u2 <= |u1|, |u|^2 < 1): 1/(1-|u|^2).
  CHECK(val(mdl, {0.5, 0.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(val(mdl, {1.2, 0.0}) == kInf);
  // Hyperbola branch (u2 > |u1|, 2|u1|u2 < 1): |u|^2/(1 - 2|u1|u2).
  double w = 0.09 + 0.64, b = 2.0 * 0.3 * 0.8;
  CHECK(val(mdl, {0.3, 0.8}) == doctest::Approx(w / (1.0 - b)).epsilon(1e-15));
  CHECK(val(mdl, {0.8, 0.9}) == kInf);  // 2*0.8*0.9 = 1.44 >= 1
  CHECK(mdl.structure == RadialStructure::RadiallyConvex);
  CHECK_FALSE(mdl.real_valued);
  CHECK(mdl.blows_up_at_boundary);
}

TEST_CASE("proximal modulus conversion") {
  ConditionSData flat = condition_s_from_proximal(0.0, 1.0);
  CHECK(flat.autonomous());
  CHECK(flat.eps_star == 1.0);

  // (e^{2T beta}+1)(e^{2T beta}-1)/(2T) at beta = T = 1 is (e^4-1)/2.
  ConditionSData data = condition_s_from_proximal(1.0, 1.0);
  double ref = (std::exp(4.0) - 1.0) / 2.0;
  CHECK(data.kappa == doctest::Approx(ref).epsilon(1e-12));
  CHECK(data.A == data.kappa);
  CHECK(data.gamma.eval(0.5) == data.kappa);
  CHECK(data.gamma.l1_norm(0.0, 1.0) == doctest::Approx(data.kappa));
  CHECK_THROWS_AS((void)condition_s_from_proximal(-1.0, 1.0), Error);
}

TEST_CASE("time-regularity inequality holds on sampled triples") {
  LagrangianModel mdl = builtin_model("discont_surface");
  CHECK(condition_s_worst_violation(mdl, 1.0, 500) <= 1e-12);
}

TEST_CASE("linear-growth extraction finds superlinear minorants only") {
  LagrangianModel quad = builtin_model("hnew_1d");
  auto found = extract_linear_growth(quad, 2.0);
  REQUIRE(found.has_value());
  CHECK(found->alpha > 0.0);
  // The implied minorant really sits below the integrand on samples.
  std::vector<double> y{0.0};
  for (double u : {0.5, 1.0, 4.0, 16.0}) {
    std::vector<double> uv{u};
    CHECK(quad.value(0.0, y, uv) >= found->alpha * u - found->d - 1e-9);
  }
  LagrangianModel lin = builtin_model("minimal_length");
  CHECK_FALSE(extract_linear_growth(lin, 2.0).has_value());
}

TEST_SUITE_END();
