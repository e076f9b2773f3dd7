#include "bolza/lagrangian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace bolza {

double PiecewiseConstantFn::eval(double s) const {
  if (nodes.empty()) return values.empty() ? 0.0 : values[0];
  if (s <= nodes.front()) return values.front();
  for (size_t k = 0; k + 1 < nodes.size(); ++k) {
    if (s < nodes[k + 1]) return values[k];
  }
  return values.back();
}

double PiecewiseConstantFn::l1_norm(double a, double b) const {
  if (b <= a) return 0.0;
  if (nodes.empty()) return std::abs(values.empty() ? 0.0 : values[0]) * (b - a);
  KahanSum s;
  // Clip each cell to [a, b].
  double lo = a;
  s.add(std::abs(values.front()) * std::max(0.0, std::min(b, nodes.front()) - lo));
  for (size_t k = 0; k + 1 < nodes.size(); ++k) {
    double ca = std::max(a, nodes[k]);
    double cb = std::min(b, nodes[k + 1]);
    if (cb > ca) s.add(std::abs(values[k]) * (cb - ca));
  }
  s.add(std::abs(values.back()) * std::max(0.0, b - std::max(a, nodes.back())));
  return s.value();
}

bool PiecewiseConstantFn::is_zero() const {
  for (double v : values) {
    if (v != 0.0) return false;
  }
  return true;
}

bool LagrangianModel::is_in_domain(double s, StateView y, ControlView u) const {
  if (in_domain) return in_domain(s, y, u);
  return std::isfinite(value(s, y, u));
}

bool LagrangianModel::in_cone(ControlView u) const {
  return control_cone ? control_cone(u) : true;
}

double LagrangianModel::boundary_dist(double s, StateView y, ControlView u) const {
  return boundary_distance ? boundary_distance(s, y, u) : kInf;
}

double numeric_radial_slope(const LagrangianModel& model, double s, StateView y,
                            ControlView u, double h) {
  require(h > 0.0 && h < 1.0, ErrorCode::BadInput, "radial step");
  std::vector<double> up(u.begin(), u.end()), dn(u.begin(), u.end());
  for (size_t i = 0; i < u.size(); ++i) {
    up[i] = (1.0 + h) * u[i];
    dn[i] = (1.0 - h) * u[i];
  }
  double f_up = model.value(s, y, up);
  double f_dn = model.value(s, y, dn);
  if (!std::isfinite(f_up) || !std::isfinite(f_dn)) {
    fail(ErrorCode::DomainEdge, "radial stencil left the domain of " + model.name);
  }
  return (f_up - f_dn) / (2.0 * h);
}

double numeric_radial_slope_robust(const LagrangianModel& model, double s,
                                   StateView y, ControlView u) {
  double h = default_radial_step(u);
  for (int k = 0; k < 3; ++k) {
    try {
      return numeric_radial_slope(model, s, y, u, h);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainEdge) throw;
      h *= 0.1;
    }
  }
  // One-sided fallback: scale down only (star-shaped domains keep r u inside
  // for r <= 1, so the inward stencil is safe).
  double f0 = model.value(s, y, u);
  require(std::isfinite(f0), ErrorCode::DomainEdge,
          "base point outside the domain of " + model.name);
  h = default_radial_step(u);
  std::vector<double> dn(u.begin(), u.end());
  for (int k = 0; k < 8; ++k) {
    for (size_t i = 0; i < u.size(); ++i) dn[i] = (1.0 - h) * u[i];
    double f_dn = model.value(s, y, dn);
    if (std::isfinite(f_dn)) return (f0 - f_dn) / h;
    h *= 0.1;
  }
  fail(ErrorCode::DomainEdge, "no usable radial stencil for " + model.name);
}

double radial_intercept(const LagrangianModel& model, double s, StateView y,
                        ControlView u) {
  double f0 = model.value(s, y, u);
  if (!std::isfinite(f0)) return kInf;
  double nrm = norm2(u);
  if (nrm == 0.0) return f0;  // slope through the origin ray is 0
  if (model.intercept_fn) return model.intercept_fn(s, y, u);
  double slope = model.radial_slope ? model.radial_slope(s, y, u)
                                    : numeric_radial_slope_robust(model, s, y, u);
  return f0 - slope;
}

ConditionSData condition_s_from_proximal(double beta, double T) {
  require(beta >= 0.0, ErrorCode::BadInput, "proximal modulus must be >= 0");
  require(T > 0.0, ErrorCode::BadInput, "horizon must be positive");
  ConditionSData out;
  out.eps_star = T;
  if (beta == 0.0) return out;  // autonomous
  double e2 = std::exp(2.0 * beta * T);
  double beta_prime = (e2 + 1.0) * (e2 - 1.0) / (2.0 * T);
  out.kappa = beta_prime;
  out.A = beta_prime;
  out.gamma = PiecewiseConstantFn::constant(beta_prime);
  return out;
}

std::optional<LinearGrowth> extract_linear_growth(const LagrangianModel& model,
                                                  double K,
                                                  const GrowthSearchConfig& cfg) {
  int s_count = model.time_invariant ? 1 : cfg.s_count;
  int ball_count = model.state_invariant ? 1 : cfg.ball_count;
  int dir_count = model.m == 1 ? 2 : cfg.dir_count;

  std::vector<double> y(static_cast<size_t>(model.n), 0.0);
  std::vector<double> u(static_cast<size_t>(model.m), 0.0);
  std::vector<double> dir(static_cast<size_t>(model.m), 0.0);

  double R = 1.0;
  for (int step = 0; step < cfg.max_doublings; ++step, R *= 2.0) {
    if (R > cfg.u_max) break;
    bool ok = true;
    BallSampler ball(model.n, K);
    for (int bi = 0; bi < ball_count && ok; ++bi) {
      ball.next(y);
      SphereSampler sphere(model.m);
      for (int di = 0; di < dir_count && ok; ++di) {
        sphere.next(dir);
        double log_lo = std::log(R), log_hi = std::log(std::max(cfg.u_max, 2.0 * R));
        for (int mi = 0; mi < cfg.mag_count && ok; ++mi) {
          double r = std::exp(log_lo + (log_hi - log_lo) * mi /
                                           std::max(1, cfg.mag_count - 1));
          for (int j = 0; j < model.m; ++j) u[static_cast<size_t>(j)] = r * dir[j];
          if (!model.in_cone(u)) continue;
          for (int si = 0; si < s_count && ok; ++si) {
            double s = s_count == 1 ? 0.0 : static_cast<double>(si) / (s_count - 1);
            if (!model.is_in_domain(s, y, u)) continue;
            double f = model.value(s, y, u);
            double q;
            try {
              q = model.radial_slope ? model.radial_slope(s, y, u)
                                     : numeric_radial_slope_robust(model, s, y, u);
            } catch (const Error&) {
              continue;
            }
            if (q - f < 1.0) ok = false;
          }
        }
      }
    }
    if (ok) return LinearGrowth{1.0 / R, 2.0};
  }
  return std::nullopt;
}

namespace {

double norm_sq(ControlView u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return s;
}

LagrangianModel make_minimal_length() {
  LagrangianModel mdl;
  mdl.name = "minimal_length";
  mdl.n = 1;
  mdl.m = 1;
  mdl.value = [](double, StateView, ControlView u) {
    return std::sqrt(1.0 + norm_sq(u));
  };
  mdl.radial_slope = [](double, StateView, ControlView u) {
    double w = norm_sq(u);
    return w / std::sqrt(1.0 + w);
  };
  mdl.intercept_fn = [](double, StateView, ControlView u) {
    return 1.0 / std::sqrt(1.0 + norm_sq(u));
  };
  mdl.structure = RadialStructure::Both;
  mdl.growth = {1.0, 0.0};
  mdl.superlinear_ball_radius = 1.0;
  mdl.analytic_sup_tail = [](double nu, double) {
    return 1.0 / std::sqrt(1.0 + nu * nu);
  };
  mdl.analytic_inf_core = [](double c, double, double) {
    return 1.0 / std::sqrt(1.0 + c * c);
  };
  return mdl;
}

LagrangianModel make_discont_surface() {
  // Surface-type cost phi(s) a(y) sqrt(1+|u|^2) with a jumping between 1 and 2
  // across the plane y1 = 0 and a gently increasing time factor.
  constexpr double kSlope = 0.001;
  auto phi = [](double s) { return 1.0 + kSlope * s; };
  auto a = [](StateView y) { return y[0] > 0.0 ? 2.0 : 1.0; };
  LagrangianModel mdl;
  mdl.name = "discont_surface";
  mdl.n = 2;
  mdl.m = 2;
  mdl.value = [phi, a](double s, StateView y, ControlView u) {
    return phi(s) * a(y) * std::sqrt(1.0 + norm_sq(u));
  };
  mdl.radial_slope = [phi, a](double s, StateView y, ControlView u) {
    double w = norm_sq(u);
    return phi(s) * a(y) * w / std::sqrt(1.0 + w);
  };
  mdl.intercept_fn = [phi, a](double s, StateView y, ControlView u) {
    return phi(s) * a(y) / std::sqrt(1.0 + norm_sq(u));
  };
  mdl.structure = RadialStructure::Both;
  mdl.growth = {1.0, 0.0};  // min phi = 1, min a = 1
  mdl.condition_s.kappa = kSlope;  // |phi'|/min phi
  mdl.condition_s.eps_star = kInf;
  mdl.time_invariant = false;
  mdl.state_invariant = false;
  mdl.superlinear_ball_radius = 1.0;
  mdl.sampler_hint = {9, 33, 16, 25};
  mdl.analytic_sup_tail = [phi](double nu, double T) {
    return phi(T) * 2.0 / std::sqrt(1.0 + nu * nu);
  };
  mdl.analytic_inf_core = [](double c, double, double) {
    return 1.0 / std::sqrt(1.0 + c * c);
  };
  return mdl;
}

LagrangianModel make_hnew_1d() {
  // 1d extended-valued cost: +inf for u <= -1, a pole branch 1/(1-u^2) on
  // (-1, 0], and the parabola u^2+1 on u > 0.
  LagrangianModel mdl;
  mdl.name = "hnew_1d";
  mdl.n = 1;
  mdl.m = 1;
  mdl.value = [](double, StateView, ControlView u) {
    double v = u[0];
    if (v <= -1.0) return kInf;
    if (v <= 0.0) return 1.0 / (1.0 - v * v);
    return v * v + 1.0;
  };
  mdl.radial_slope = [](double, StateView, ControlView u) {
    double v = u[0];
    if (v <= -1.0) return kInf;
    if (v <= 0.0) {
      double w = v * v;
      return 2.0 * w / sqr(1.0 - w);
    }
    return 2.0 * v * v;
  };
  mdl.intercept_fn = [](double, StateView, ControlView u) {
    double v = u[0];
    if (v <= -1.0) return kInf;
    if (v <= 0.0) {
      double w = v * v;
      return (1.0 - 3.0 * w) / sqr(1.0 - w);
    }
    return 1.0 - v * v;
  };
  mdl.in_domain = [](double, StateView, ControlView u) { return u[0] > -1.0; };
  mdl.boundary_distance = [](double, StateView, ControlView u) {
    return u[0] + 1.0;
  };
  mdl.boundary_nearest = [](double, StateView, ControlView, std::span<double> p) {
    p[0] = -1.0;
    return true;
  };
  mdl.structure = RadialStructure::Both;
  mdl.growth = {2.0, 0.0};
  mdl.real_valued = false;
  mdl.blows_up_at_boundary = true;
  mdl.superlinear_ball_radius = 0.5;
  mdl.analytic_sup_tail = [](double nu, double) { return 1.0 - nu * nu; };
  mdl.analytic_inf_core = [](double c, double rho, double) {
    double lo = std::max(rho - 1.0, -c);  // left edge of the filtered window
    double neg = kInf;
    if (lo < 0.0) {
      double w = lo * lo;
      neg = (1.0 - 3.0 * w) / sqr(1.0 - w);
    }
    return std::min(neg, 1.0 - c * c);
  };
  return mdl;
}

LagrangianModel make_g_not_h() {
  // Quadratic growth with a ray-dependent factor u2/u1 on the sector
  // 0 < u1 <= u2; slope excess equals L everywhere (Q = 2L, intercept = -L).
  auto lvalue = [](ControlView u) {
    double w = norm_sq(u);
    if (u[0] > 0.0 && u[0] <= u[1]) return w * u[1] / u[0];
    return w;
  };
  LagrangianModel mdl;
  mdl.name = "g_not_h";
  mdl.n = 2;
  mdl.m = 2;
  mdl.value = [lvalue](double, StateView, ControlView u) { return lvalue(u); };
  mdl.radial_slope = [lvalue](double, StateView, ControlView u) {
    return 2.0 * lvalue(u);
  };
  mdl.intercept_fn = [lvalue](double, StateView, ControlView u) {
    return -lvalue(u);
  };
  mdl.structure = RadialStructure::Both;
  mdl.growth = {1.0, 1.0};
  mdl.bounded_well_inside = false;  // blows up along u1 -> 0+ on bounded sets
  mdl.superlinear_ball_radius = 1.0;
  mdl.analytic_sup_tail = [](double nu, double) { return -nu * nu; };
  mdl.analytic_inf_core = [](double, double, double) { return -kInf; };
  return mdl;
}

LagrangianModel make_radial_concave() {
  // 2|u| - sqrt(1+u^2): partially differentiable but radially concave.
  LagrangianModel mdl;
  mdl.name = "radial_concave";
  mdl.n = 1;
  mdl.m = 1;
  mdl.value = [](double, StateView, ControlView u) {
    double v = std::abs(u[0]);
    return 2.0 * v - std::sqrt(1.0 + v * v);
  };
  mdl.radial_slope = [](double, StateView, ControlView u) {
    double v = std::abs(u[0]);
    return 2.0 * v - v * v / std::sqrt(1.0 + v * v);
  };
  mdl.intercept_fn = [](double, StateView, ControlView u) {
    return -1.0 / std::sqrt(1.0 + norm_sq(u));
  };
  mdl.structure = RadialStructure::PartiallyDifferentiable;
  mdl.growth = {1.0, 1.0};
  mdl.superlinear_ball_radius = 1.0;
  mdl.analytic_sup_tail = [](double, double) { return 0.0; };  // supremum (limit)
  mdl.analytic_inf_core = [](double, double, double) { return -1.0; };
  return mdl;
}

// Nearest point on the boundary of the star-shaped extended domain: the unit
// circle arc below the diagonals plus both hyperbola branches u2 = 1/(2|u1|).
struct StarNearest {
  double d = kInf;
  double px = 0.0;
  double py = 0.0;
};

StarNearest star_nearest(double a, double b) {
  // The boundary is symmetric under u1 -> -u1; work in the half plane x >= 0.
  const double sx = a < 0.0 ? -1.0 : 1.0;
  const double x0 = std::abs(a);
  const double y0 = b;
  const double kJ = 1.0 / std::sqrt(2.0);  // junction (1/sqrt2, 1/sqrt2)
  StarNearest best;
  auto upd = [&](double px, double py) {
    double d = std::hypot(x0 - px, y0 - py);
    if (d < best.d) {
      best = {d, px, py};
    }
  };
  // Circle arc: radial projection when it lands below the diagonal.
  double rr = std::hypot(x0, y0);
  if (rr > 0.0) {
    double px = x0 / rr, py = y0 / rr;
    if (py <= px + 1e-15) upd(px, py);
  } else {
    upd(1.0, 0.0);
  }
  upd(kJ, kJ);
  upd(-kJ, kJ);
  // Hyperbola branches y = 1/(2|x|) with |x| in (0, 1/sqrt2], both signs:
  // seed scan in log |x|, then golden-section refine around the best seed.
  for (double side : {1.0, -1.0}) {
    auto f = [&](double t) {
      double ex = std::exp(t);
      return sqr(x0 - side * ex) + sqr(y0 - 1.0 / (2.0 * ex));
    };
    const double tlo = std::log(1e-8), thi = std::log(kJ);
    const int seeds = 65;
    double bt = tlo;
    double bf = f(tlo);
    for (int i = 1; i < seeds; ++i) {
      double t = tlo + (thi - tlo) * i / (seeds - 1);
      double ft = f(t);
      if (ft < bf) {
        bf = ft;
        bt = t;
      }
    }
    double span = (thi - tlo) / (seeds - 1);
    double lo = std::max(tlo, bt - span), hi = std::min(thi, bt + span);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = f(c1), f2 = f(c2);
    for (int i = 0; i < 80; ++i) {
      if (f1 < f2) {
        hi = c2;
        c2 = c1;
        f2 = f1;
        c1 = hi - gr * (hi - lo);
        f1 = f(c1);
      } else {
        lo = c1;
        c1 = c2;
        f1 = f2;
        c2 = lo + gr * (hi - lo);
        f2 = f(c2);
      }
    }
    double ex = std::exp(0.5 * (lo + hi));
    upd(side * ex, 1.0 / (2.0 * ex));
  }
  best.px *= sx;
  return best;
}

LagrangianModel make_extended_star() {
  // Extended-valued, radially convex, discontinuous across u2 = |u1|:
  //   1/(1-|u|^2)                 on u2 <= |u1|, |u| < 1
  //   |u|^2 / (1 - 2|u1| u2)      on u2 >  |u1|, 2|u1| u2 < 1
  //   +inf                        elsewhere
  auto in_dom = [](ControlView u) {
    double w = norm_sq(u);
    if (u[1] <= std::abs(u[0])) return w < 1.0;
    return 2.0 * std::abs(u[0]) * u[1] < 1.0;
  };
  LagrangianModel mdl;
  mdl.name = "extended_star";
  mdl.n = 2;
  mdl.m = 2;
  mdl.value = [in_dom](double, StateView, ControlView u) {
    if (!in_dom(u)) return kInf;
    double w = norm_sq(u);
    if (u[1] <= std::abs(u[0])) return 1.0 / (1.0 - w);
    return w / (1.0 - 2.0 * std::abs(u[0]) * u[1]);
  };
  mdl.radial_slope = [in_dom](double, StateView, ControlView u) {
    if (!in_dom(u)) return kInf;
    double w = norm_sq(u);
    if (u[1] <= std::abs(u[0])) return 2.0 * w / sqr(1.0 - w);
    double b = 2.0 * std::abs(u[0]) * u[1];
    return 2.0 * w / sqr(1.0 - b);
  };
  mdl.intercept_fn = [in_dom](double, StateView, ControlView u) {
    if (!in_dom(u)) return kInf;
    double w = norm_sq(u);
    if (u[1] <= std::abs(u[0])) return (1.0 - 3.0 * w) / sqr(1.0 - w);
    double b = 2.0 * std::abs(u[0]) * u[1];
    return -w * (1.0 + b) / sqr(1.0 - b);
  };
  mdl.in_domain = [in_dom](double, StateView, ControlView u) { return in_dom(u); };
  mdl.boundary_distance = [](double, StateView, ControlView u) {
    return star_nearest(u[0], u[1]).d;
  };
  mdl.boundary_nearest = [](double, StateView, ControlView u,
                            std::span<double> out) {
    StarNearest sn = star_nearest(u[0], u[1]);
    out[0] = sn.px;
    out[1] = sn.py;
    return true;
  };
  mdl.structure = RadialStructure::RadiallyConvex;
  mdl.growth = {1.0, 0.25};
  mdl.real_valued = false;
  mdl.blows_up_at_boundary = true;
  mdl.superlinear_ball_radius = 0.5;
  mdl.analytic_sup_tail = [](double nu, double) {
    double horn = -nu * nu;  // attained on the u2 axis
    if (nu >= 1.0) return horn;
    double w = nu * nu;
    return std::max(horn, (1.0 - 3.0 * w) / sqr(1.0 - w));
  };
  return mdl;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names = {
      "minimal_length", "discont_surface", "hnew_1d",
      "g_not_h",        "radial_concave",  "extended_star"};
  return names;
}

LagrangianModel builtin_model(const std::string& name) {
  if (name == "minimal_length") return make_minimal_length();
  if (name == "discont_surface") return make_discont_surface();
  if (name == "hnew_1d") return make_hnew_1d();
  if (name == "g_not_h") return make_g_not_h();
  if (name == "radial_concave") return make_radial_concave();
  if (name == "extended_star") return make_extended_star();
  fail(ErrorCode::UnknownName, "no built-in model named '" + name + "'");
}

double condition_s_worst_violation(const LagrangianModel& model, double T,
                                   int samples, double K, double u_cap) {
  const ConditionSData& cs = model.condition_s;
  double eps = std::min(cs.eps_star, T);
  std::mt19937_64 rng(20240909u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> y(static_cast<size_t>(model.n));
  std::vector<double> u(static_cast<size_t>(model.m));
  double worst = -kInf;
  for (int it = 0; it < samples; ++it) {
    double s = T * unit(rng);
    double lo = std::max(0.0, s - eps), hi = std::min(T, s + eps);
    double s1 = lo + (hi - lo) * unit(rng);
    double s2 = lo + (hi - lo) * unit(rng);
    for (auto& v : y) v = K * (2.0 * unit(rng) - 1.0);
    for (auto& v : u) v = u_cap * (2.0 * unit(rng) - 1.0);
    if (!model.in_cone(u)) continue;
    if (!model.is_in_domain(s, y, u) || !model.is_in_domain(s1, y, u) ||
        !model.is_in_domain(s2, y, u)) {
      continue;
    }
    double f = model.value(s, y, u);
    double f1 = model.value(s1, y, u);
    double f2 = model.value(s2, y, u);
    double bound = (cs.kappa * f + cs.A * norm2(u) + cs.gamma.eval(s)) *
                   std::abs(s2 - s1);
    worst = std::max(worst, std::abs(f2 - f1) - bound);
  }
  return worst;
}

}  // namespace bolza
