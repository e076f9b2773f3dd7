#include "bolza/constants.hpp"

#include <algorithm>
#include <cmath>

namespace bolza {

double compute_c_t_B(double B, double alpha, double d, double T, double t) {
  require(alpha > 0.0, ErrorCode::BadInput, "compute_c_t_B: alpha must be > 0");
  require(T > t, ErrorCode::BadInput, "compute_c_t_B: need t < T");
  require(B >= 0.0 && d >= 0.0, ErrorCode::BadInput,
          "compute_c_t_B: B and d must be >= 0");
  return (B + d * (T - t)) / (alpha * (T - t));
}

double compute_phi_B(double B, double alpha, double d, double T,
                     const ConditionSData& s_data) {
  require(alpha > 0.0, ErrorCode::BadInput, "compute_phi_B: alpha must be > 0");
  return s_data.kappa * B + (s_data.A / alpha) * (B + d * T) +
         s_data.gamma.l1_norm(0.0, T);
}

double gronwall_state_bound(double theta, double T, double R,
                            double x_star_norm, double delta_star) {
  require(theta >= 0.0 && T > 0.0 && R >= 0.0 && delta_star >= 0.0,
          ErrorCode::BadInput, "gronwall_state_bound: bad arguments");
  return x_star_norm + delta_star +
         theta * T * R * std::exp(R * theta) * (x_star_norm + delta_star + 1.0);
}

BoundsContext make_bounds_context(const ProblemSpec& problem, double delta,
                                  double delta_star, std::vector<double> x_star,
                                  double B, double eta) {
  problem.validate();
  require(static_cast<int>(x_star.size()) == problem.model.n,
          ErrorCode::BadInput, "make_bounds_context: x_star has wrong dimension");
  require(delta >= 0.0 && delta < problem.T, ErrorCode::BadInput,
          "make_bounds_context: need 0 <= delta < T");
  require(delta_star >= 0.0 && eta >= 0.0 && std::isfinite(B) && B >= 0.0,
          ErrorCode::BadInput, "make_bounds_context: bad bounds");

  BoundsContext ctx;
  ctx.T = problem.T;
  ctx.delta = delta;
  ctx.delta_star = delta_star;
  ctx.x_star = std::move(x_star);
  ctx.B = B;
  ctx.eta = eta;
  ctx.alpha = problem.model.growth.alpha;
  ctx.d = problem.model.growth.d;
  ctx.theta = problem.dynamics.theta;
  ctx.s_data = problem.model.condition_s;

  ctx.c_delta_B = compute_c_t_B(B, ctx.alpha, ctx.d, ctx.T, delta);
  ctx.phi_B = compute_phi_B(B, ctx.alpha, ctx.d, ctx.T, ctx.s_data);
  ctx.R = (B + ctx.d * ctx.T) / ctx.alpha;
  ctx.K = gronwall_state_bound(ctx.theta, ctx.T, ctx.R, norm2(ctx.x_star),
                               delta_star);
  ctx.eps_star_eff = std::min(ctx.s_data.eps_star, ctx.T);
  return ctx;
}

namespace {

struct Counts {
  int s = 1;
  int ball = 1;
  int dir = 1;
  int mag = 1;
};

Counts effective_counts(const LagrangianModel& model, const SamplerConfig& cfg) {
  Counts c{cfg.s_count, cfg.ball_count, cfg.dir_count, cfg.mag_count};
  if (cfg.use_model_hint) {
    const SamplerHint& h = model.sampler_hint;
    if (h.s_count > 0) c.s = h.s_count;
    if (h.ball_count > 0) c.ball = h.ball_count;
    if (h.dir_count > 0) c.dir = h.dir_count;
    if (h.mag_count > 0) c.mag = h.mag_count;
  }
  c.s = std::max(1, c.s);
  c.ball = std::max(1, c.ball);
  c.dir = std::max(1, c.dir);
  c.mag = std::max(1, c.mag);
  return c;
}

// What to extremize and over which region.
struct EngineSpec {
  double T = 1.0;
  double K = 1.0;
  bool maximize = true;
  double r_lo = 0.0;
  double r_hi = 1.0;
  bool log_mag = true;        // log-spaced magnitudes (tail sups)
  bool include_zero = false;  // add the u = 0 sample (core infs)
  bool grow_r_hi = false;     // square the magnitude cap on refinement passes
  double rho = 0.0;           // boundary-distance filter, 0 = off
  bool raw_value = false;     // extremize L itself, not the radial intercept
  const std::function<bool(ControlView)>* cone_extra = nullptr;
};

bool point_value(const LagrangianModel& model, const EngineSpec& spec, double s,
                 StateView y, ControlView u, double* out) {
  if (!model.in_cone(u)) return false;
  if (spec.cone_extra && *spec.cone_extra && !(*spec.cone_extra)(u)) return false;
  if (!model.is_in_domain(s, y, u)) return false;
  if (spec.rho > 0.0 && model.boundary_dist(s, y, u) < spec.rho) return false;
  double p;
  try {
    p = spec.raw_value ? model.value(s, y, u) : radial_intercept(model, s, y, u);
  } catch (const Error&) {
    return false;
  }
  if (std::isnan(p) || p == kInf) return false;
  *out = p;
  return true;
}

struct PassOut {
  bool found = false;
  double value = 0.0;
  long long samples = 0;
  double max_abs_u = 0.0;
  double arg_s = 0.0;
  std::vector<double> arg_y;
  std::vector<double> arg_u;
};

bool better(bool maximize, double cand, double best) {
  return maximize ? cand > best : cand < best;
}

// Strictly positive magnitudes; the u = 0 sample is handled once per (s, y)
// by the caller.
std::vector<double> magnitude_list(const EngineSpec& spec, double r_hi, int count) {
  std::vector<double> mags;
  mags.reserve(static_cast<size_t>(count));
  double lo = spec.r_lo;
  double hi = std::max(r_hi, lo);
  if (spec.log_mag) {
    double llo = std::log(std::max(lo, 1e-12));
    double lhi = std::log(std::max(hi, 1e-12));
    if (count == 1 || lhi <= llo) {
      mags.push_back(lo > 0.0 ? lo : std::exp(llo));
    } else {
      for (int j = 0; j < count; ++j) {
        double f = static_cast<double>(j) / (count - 1);
        double r = std::exp(llo + f * (lhi - llo));
        if (j == 0 && lo > 0.0) r = lo;  // keep the cutoff exact
        if (j == count - 1) r = hi;
        mags.push_back(r);
      }
    }
  } else {
    for (int j = 1; j <= count; ++j) {
      mags.push_back(hi * static_cast<double>(j) / count);
    }
  }
  return mags;
}

std::vector<std::vector<double>> direction_list(int m, int count) {
  std::vector<std::vector<double>> dirs;
  if (m == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
  } else if (m == 2) {
    int d = std::max(4, count);
    dirs.reserve(d);
    for (int k = 0; k < d; ++k) {
      double a = 2.0 * kPi * k / d;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  } else {
    SphereSampler sphere(m, 1);
    std::vector<double> v(static_cast<size_t>(m));
    for (int k = 0; k < count; ++k) {
      sphere.next(v);
      dirs.push_back(v);
    }
  }
  return dirs;
}

struct StartPoint {
  double value = 0.0;
  double s = 0.0;
  std::vector<double> y;
  std::vector<double> u;
};

// Greedy pattern search from one grid point, staying inside the sampling
// region and the feasibility filters. Compound (magnitude, direction) probes
// let the iterate slide along active distance constraints.
void pattern_refine(const LagrangianModel& model, const EngineSpec& spec,
                    double r_hi, int iters, StartPoint* pt, double* max_r_seen) {
  if (iters <= 0) return;
  const int n = model.n;
  const int m = model.m;
  const bool vary_s = !model.time_invariant;
  const bool vary_y = !model.state_invariant && spec.K > 0.0;

  double s = pt->s;
  std::vector<double> y = pt->y;
  std::vector<double> dir(static_cast<size_t>(m), 0.0);
  double r = norm2(pt->u);
  if (r > 0.0) {
    for (int i = 0; i < m; ++i) dir[static_cast<size_t>(i)] = pt->u[static_cast<size_t>(i)] / r;
  } else {
    dir[0] = 1.0;
  }
  double best = pt->value;

  const double r_floor = spec.log_mag ? std::max(spec.r_lo, 0.0) : 0.0;
  const double s_step0 = spec.T / 8.0;
  const double y_step0 = spec.K / 4.0;
  double r_step0 = spec.log_mag
                       ? (std::log(std::max(r_hi, 1e-12)) -
                          std::log(std::max(spec.r_lo, 1e-12))) / 16.0
                       : (r_hi - r_floor) / 16.0;
  if (!(r_step0 > 0.0)) r_step0 = 0.5;
  const double dir_step0 = 0.2;
  const double slide_step0 =
      spec.rho > 0.0 ? std::max(spec.rho, (r_hi - r_floor) / 16.0) : 0.0;
  double s_step = s_step0;
  double y_step = y_step0;
  double r_step = r_step0;
  double dir_step = dir_step0;
  double slide_step = slide_step0;
  const bool sliding = spec.rho > 0.0 && static_cast<bool>(model.boundary_nearest);

  std::vector<double> u(static_cast<size_t>(m));
  std::vector<double> y_try(y);
  std::vector<double> dir_try(dir);

  auto r_moved = [&](double r_c, double sg) {
    if (spec.log_mag) {
      double v = std::max(r_c, 1e-12) * std::exp(sg * r_step);
      return std::clamp(v, spec.r_lo, r_hi);
    }
    return std::clamp(r_c + sg * r_step, r_floor, r_hi);
  };
  auto dir_moved = [&](const std::vector<double>& d, int j, double sg,
                       std::vector<double>* out_dir) {
    *out_dir = d;
    (*out_dir)[static_cast<size_t>(j)] += sg * dir_step;
    double nrm = norm2(*out_dir);
    if (nrm < 1e-300) return false;
    for (double& c : *out_dir) c /= nrm;
    return true;
  };

  std::vector<double> near_pt(static_cast<size_t>(m));
  std::vector<double> near_pt2(static_cast<size_t>(m));
  std::vector<double> cand(static_cast<size_t>(m));

  for (int it = 0; it < iters; ++it) {
    bool improved = false;
    auto try_point = [&](double s_c, const std::vector<double>& y_c, double r_c,
                         const std::vector<double>& dir_c) {
      for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = r_c * dir_c[static_cast<size_t>(i)];
      double v;
      if (point_value(model, spec, s_c, StateView(y_c.data(), y_c.size()),
                      ControlView(u.data(), u.size()), &v) &&
          better(spec.maximize, v, best)) {
        best = v;
        s = s_c;
        y = y_c;
        r = r_c;
        dir = dir_c;
        if (max_r_seen) *max_r_seen = std::max(*max_r_seen, r_c);
        improved = true;
      }
    };
    // Raw control probe: accepts any point inside the magnitude cap.
    auto try_u = [&](const std::vector<double>& u_c) {
      double r_c = norm2(u_c);
      if (r_c > r_hi || r_c < spec.r_lo) return;
      double v;
      if (point_value(model, spec, s, StateView(y.data(), y.size()),
                      ControlView(u_c.data(), u_c.size()), &v) &&
          better(spec.maximize, v, best)) {
        best = v;
        r = r_c;
        if (r_c > 0.0) {
          for (int i = 0; i < m; ++i) dir[static_cast<size_t>(i)] = u_c[static_cast<size_t>(i)] / r_c;
        }
        if (max_r_seen) *max_r_seen = std::max(*max_r_seen, r_c);
        improved = true;
      }
    };

    if (vary_s) {
      try_point(std::clamp(s + s_step, 0.0, spec.T), y, r, dir);
      try_point(std::clamp(s - s_step, 0.0, spec.T), y, r, dir);
    }
    if (vary_y) {
      for (int j = 0; j < n; ++j) {
        for (double sg : {1.0, -1.0}) {
          y_try = y;
          y_try[static_cast<size_t>(j)] += sg * y_step;
          double nrm = norm2(y_try);
          if (nrm > spec.K) {
            for (double& c : y_try) c *= spec.K / nrm;
          }
          try_point(s, y_try, r, dir);
        }
      }
    }
    try_point(s, y, r_moved(r, 1.0), dir);
    try_point(s, y, r_moved(r, -1.0), dir);
    if (m == 1) {
      dir_try = dir;
      dir_try[0] = -dir_try[0];
      try_point(s, y, r, dir_try);
      try_point(s, y, r_moved(r, -1.0), dir_try);
    } else {
      for (int j = 0; j < m; ++j) {
        for (double sg : {1.0, -1.0}) {
          if (!dir_moved(dir, j, sg, &dir_try)) continue;
          try_point(s, y, r, dir_try);
          try_point(s, y, r_moved(r, 1.0), dir_try);
          try_point(s, y, r_moved(r, -1.0), dir_try);
        }
      }
    }
    if (sliding) {
      for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = r * dir[static_cast<size_t>(i)];
      if (model.boundary_nearest(s, StateView(y.data(), y.size()),
                                 ControlView(u.data(), u.size()), near_pt)) {
        double dn = dist2(ControlView(u.data(), u.size()),
                          ControlView(near_pt.data(), near_pt.size()));
        if (dn > 0.0) {
          const double shell = spec.rho * (1.0 + 1e-12);
          std::vector<double> nhat(static_cast<size_t>(m));
          for (int i = 0; i < m; ++i) {
            nhat[static_cast<size_t>(i)] = (u[static_cast<size_t>(i)] - near_pt[static_cast<size_t>(i)]) / dn;
          }
          // Pull onto the rho-shell of the active boundary.
          for (int i = 0; i < m; ++i) {
            cand[static_cast<size_t>(i)] = near_pt[static_cast<size_t>(i)] + shell * nhat[static_cast<size_t>(i)];
          }
          try_u(cand);
          // Tangent slides with re-projection onto the shell.
          for (int j = 0; j < m; ++j) {
            double dot = nhat[static_cast<size_t>(j)];
            std::vector<double> tang(static_cast<size_t>(m));
            double tn = 0.0;
            for (int i = 0; i < m; ++i) {
              tang[static_cast<size_t>(i)] = (i == j ? 1.0 : 0.0) - dot * nhat[static_cast<size_t>(i)];
              tn += sqr(tang[static_cast<size_t>(i)]);
            }
            tn = std::sqrt(tn);
            if (tn < 1e-8) continue;
            for (double sg : {1.0, -1.0}) {
              for (int i = 0; i < m; ++i) {
                cand[static_cast<size_t>(i)] =
                    u[static_cast<size_t>(i)] + sg * slide_step * tang[static_cast<size_t>(i)] / tn;
              }
              if (model.boundary_nearest(s, StateView(y.data(), y.size()),
                                         ControlView(cand.data(), cand.size()),
                                         near_pt2)) {
                double d2 = dist2(ControlView(cand.data(), cand.size()),
                                  ControlView(near_pt2.data(), near_pt2.size()));
                if (d2 > 0.0 && d2 < shell) {
                  for (int i = 0; i < m; ++i) {
                    cand[static_cast<size_t>(i)] =
                        near_pt2[static_cast<size_t>(i)] +
                        shell * (cand[static_cast<size_t>(i)] - near_pt2[static_cast<size_t>(i)]) / d2;
                  }
                }
              }
              try_u(cand);
            }
          }
        }
      }
    }

    if (improved) {
      s_step = std::min(s_step * 2.0, s_step0);
      y_step = std::min(y_step * 2.0, y_step0);
      r_step = std::min(r_step * 2.0, r_step0);
      dir_step = std::min(dir_step * 2.0, dir_step0);
      slide_step = std::min(slide_step * 2.0, slide_step0);
    } else {
      s_step *= 0.5;
      y_step *= 0.5;
      r_step *= 0.5;
      dir_step *= 0.5;
      slide_step *= 0.5;
      if (s_step < 1e-18 * spec.T && y_step < 1e-18 * std::max(spec.K, 1.0) &&
          r_step < 1e-18 && dir_step < 1e-18) {
        break;
      }
    }
  }

  pt->value = best;
  pt->s = s;
  pt->y = y;
  pt->u.assign(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) pt->u[static_cast<size_t>(i)] = r * dir[static_cast<size_t>(i)];
}

PassOut run_pass(const LagrangianModel& model, const EngineSpec& spec,
                 const Counts& counts, double r_hi, int refine_iters) {
  PassOut out;
  out.value = spec.maximize ? -kInf : kInf;
  out.arg_y.assign(static_cast<size_t>(model.n), 0.0);
  out.arg_u.assign(static_cast<size_t>(model.m), 0.0);

  std::vector<double> s_list;
  if (model.time_invariant) {
    s_list.push_back(0.0);
  } else if (counts.s == 1) {
    s_list.push_back(0.5 * spec.T);
  } else {
    for (int i = 0; i < counts.s; ++i) {
      s_list.push_back(spec.T * static_cast<double>(i) / (counts.s - 1));
    }
  }

  std::vector<std::vector<double>> y_list;
  y_list.emplace_back(static_cast<size_t>(model.n), 0.0);
  if (!model.state_invariant && spec.K > 0.0) {
    BallSampler ball(model.n, spec.K, 1);
    std::vector<double> y(static_cast<size_t>(model.n));
    for (int i = 1; i < counts.ball; ++i) {
      ball.next(y);
      y_list.push_back(y);
    }
  }

  const auto dirs = direction_list(model.m, counts.dir);
  const auto mags = magnitude_list(spec, r_hi, counts.mag);

  const bool sample_zero = spec.include_zero || spec.r_lo <= 0.0;
  // Best grid point per direction slot (slot 0 = the u = 0 sample); the top
  // few become pattern-search starts so distinct basins all get refined.
  std::vector<StartPoint> slot_best(dirs.size() + 1);
  std::vector<bool> slot_found(dirs.size() + 1, false);

  std::vector<double> u(static_cast<size_t>(model.m));
  auto consider = [&](double s, const std::vector<double>& y, double r,
                      size_t slot) {
    double v;
    if (!point_value(model, spec, s, StateView(y.data(), y.size()),
                     ControlView(u.data(), u.size()), &v)) {
      return;
    }
    ++out.samples;
    out.max_abs_u = std::max(out.max_abs_u, r);
    if (!slot_found[slot] || better(spec.maximize, v, slot_best[slot].value)) {
      slot_found[slot] = true;
      slot_best[slot] = {v, s, y, {u.begin(), u.end()}};
    }
    if (!out.found || better(spec.maximize, v, out.value)) {
      out.found = true;
      out.value = v;
      out.arg_s = s;
      out.arg_y = y;
      out.arg_u.assign(u.begin(), u.end());
    }
  };
  for (double s : s_list) {
    for (const auto& y : y_list) {
      if (sample_zero) {
        std::fill(u.begin(), u.end(), 0.0);
        consider(s, y, 0.0, 0);
      }
      for (size_t di = 0; di < dirs.size(); ++di) {
        for (double r : mags) {
          for (int i = 0; i < model.m; ++i) {
            u[static_cast<size_t>(i)] = r * dirs[di][static_cast<size_t>(i)];
          }
          consider(s, y, r, di + 1);
        }
      }
    }
  }
  if (!out.found) return out;

  std::vector<size_t> order;
  for (size_t i = 0; i < slot_best.size(); ++i) {
    if (slot_found[i]) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return better(spec.maximize, slot_best[a].value, slot_best[b].value);
  });
  const size_t starts = std::min<size_t>(order.size(), 8);
  for (size_t k = 0; k < starts; ++k) {
    StartPoint pt = slot_best[order[k]];
    pattern_refine(model, spec, r_hi, refine_iters, &pt, &out.max_abs_u);
    if (better(spec.maximize, pt.value, out.value)) {
      out.value = pt.value;
      out.arg_s = pt.s;
      out.arg_y = pt.y;
      out.arg_u = pt.u;
    }
  }
  return out;
}

SupInfEstimate run_estimate(const LagrangianModel& model, const EngineSpec& spec,
                            const SamplerConfig& cfg) {
  Counts base = effective_counts(model, cfg);
  const int passes = std::max(1, cfg.passes);

  PassOut prev, last;
  double r_hi = spec.r_hi;
  for (int p = 0; p < passes; ++p) {
    Counts c;
    int scale = 1 << p;
    c.s = model.time_invariant ? 1 : base.s * scale;
    c.ball = model.state_invariant ? 1 : base.ball * scale;
    c.dir = model.m == 1 ? 2 : base.dir * scale;
    c.mag = base.mag * scale;
    if (p > 0 && spec.grow_r_hi && r_hi < 1e150) r_hi = r_hi * r_hi;
    prev = last;
    last = run_pass(model, spec, c, r_hi, cfg.refine_iters);
  }

  SupInfEstimate est;
  est.samples = last.samples;
  est.max_abs_u = last.max_abs_u;
  if (!last.found) {
    est.empty = true;
    est.value = spec.maximize ? -kInf : kInf;
    est.refinement_delta = 0.0;
    return est;
  }
  est.value = last.value;
  est.arg_s = last.arg_s;
  est.arg_y = last.arg_y;
  est.arg_u = last.arg_u;
  if (passes >= 2) {
    if (!prev.found) {
      est.refinement_delta = kInf;
    } else if (prev.value == last.value) {
      est.refinement_delta = 0.0;
    } else {
      est.refinement_delta = std::abs(last.value - prev.value);
    }
  }
  return est;
}

}  // namespace

SupInfEstimate estimate_sup_tail(const LagrangianModel& model, double T,
                                 double K, double nu, const SamplerConfig& cfg) {
  require(T > 0.0 && K >= 0.0 && nu >= 0.0, ErrorCode::BadInput,
          "estimate_sup_tail: bad arguments");
  EngineSpec spec;
  spec.T = T;
  spec.K = K;
  spec.maximize = true;
  spec.r_lo = nu;
  spec.r_hi = std::max(cfg.u_max, nu);
  spec.log_mag = true;
  spec.include_zero = false;
  spec.grow_r_hi = true;
  spec.rho = 0.0;
  spec.cone_extra = &cfg.cone;
  return run_estimate(model, spec, cfg);
}

SupInfEstimate estimate_inf_core(const LagrangianModel& model, double T,
                                 double K, double c, double rho,
                                 const SamplerConfig& cfg) {
  require(T > 0.0 && K >= 0.0 && c > 0.0, ErrorCode::BadInput,
          "estimate_inf_core: bad arguments");
  require(rho >= 0.0, ErrorCode::BadInput, "estimate_inf_core: rho must be >= 0");
  EngineSpec spec;
  spec.T = T;
  spec.K = K;
  spec.maximize = false;
  spec.r_lo = 0.0;
  spec.r_hi = c * (1.0 - 1e-9);  // keep |u| < c strict
  spec.log_mag = false;
  spec.include_zero = true;
  spec.grow_r_hi = false;
  spec.rho = std::isfinite(rho) ? rho : 0.0;
  if (!std::isfinite(rho)) {
    // Distance +inf passes every finite threshold; rho = +inf means the
    // real-valued convention "no filter".
    spec.rho = 0.0;
  }
  spec.cone_extra = &cfg.cone;
  return run_estimate(model, spec, cfg);
}

SupInfEstimate estimate_min_on_sphere(const LagrangianModel& model, double T,
                                      double K, double r,
                                      const SamplerConfig& cfg) {
  require(T > 0.0 && K >= 0.0 && r > 0.0, ErrorCode::BadInput,
          "estimate_min_on_sphere: bad arguments");
  EngineSpec spec;
  spec.T = T;
  spec.K = K;
  spec.maximize = false;
  spec.r_lo = r;
  spec.r_hi = r;
  spec.log_mag = true;
  spec.include_zero = false;
  spec.grow_r_hi = false;
  spec.rho = 0.0;
  spec.raw_value = true;
  spec.cone_extra = &cfg.cone;
  return run_estimate(model, spec, cfg);
}

namespace {

// Shared sampling loop for the uniform-bound variants: sup of a function of
// (s, z) over a time grid and a sampled ball around `center`.
double sup_over_ball(const LagrangianModel& model, double T,
                     const std::vector<double>& center, double radius,
                     int s_count, int ball_count, int stream,
                     const std::function<double(double, StateView)>& f,
                     bool time_invariant) {
  std::vector<double> s_list;
  if (time_invariant) {
    s_list.push_back(0.0);
  } else {
    for (int i = 0; i < std::max(2, s_count); ++i) {
      s_list.push_back(T * static_cast<double>(i) / (std::max(2, s_count) - 1));
    }
  }
  const int n = static_cast<int>(center.size());
  std::vector<std::vector<double>> z_list;
  z_list.push_back(center);
  if (radius > 0.0) {
    BallSampler ball(n, radius, stream);
    std::vector<double> off(static_cast<size_t>(n));
    for (int i = 1; i < ball_count; ++i) {
      ball.next(off);
      std::vector<double> z(center);
      for (int j = 0; j < n; ++j) z[static_cast<size_t>(j)] += off[static_cast<size_t>(j)];
      z_list.push_back(std::move(z));
    }
  }
  double best = -kInf;
  for (double s : s_list) {
    for (const auto& z : z_list) {
      double v = f(s, StateView(z.data(), z.size()));
      if (std::isnan(v)) continue;
      best = std::max(best, v);
    }
  }
  (void)model;
  return best;
}

}  // namespace

double compute_uniform_B(const ProblemSpec& problem, const UniformBRequest& req,
                         const SamplerConfig& cfg) {
  problem.validate();
  const LagrangianModel& model = problem.model;
  const int n = model.n;
  const int m = model.m;
  require(static_cast<int>(req.x_star.size()) == n, ErrorCode::BadInput,
          "compute_uniform_B: x_star has wrong dimension");
  require(req.delta >= 0.0 && req.delta < problem.T && req.delta_star >= 0.0,
          ErrorCode::BadInput, "compute_uniform_B: bad delta / delta_star");
  const double T = problem.T;

  if (req.variant == UniformBVariant::ZeroControl) {
    std::vector<double> zero(static_cast<size_t>(m), 0.0);
    require(problem.cone_ok(ControlView(zero.data(), zero.size())),
            ErrorCode::VariantInapplicable,
            "compute_uniform_B: zero-control variant needs 0 in the cone");
    bool any = false;
    double sup = sup_over_ball(
        model, T, req.x_star, req.delta_star, cfg.s_count, cfg.ball_count, 11,
        [&](double s, StateView z) {
          if (!problem.state_ok(z)) return -kInf;
          double lv = model.value(s, z, ControlView(zero.data(), zero.size()));
          if (lv < kInf) any = true;
          return T * lv + problem.g(z);
        },
        model.time_invariant);
    require(any || sup == kInf, ErrorCode::VariantInapplicable,
            "compute_uniform_B: constant states never admissible");
    return sup;
  }

  if (req.variant == UniformBVariant::ReachableTarget) {
    require(problem.dynamics.identity, ErrorCode::VariantInapplicable,
            "compute_uniform_B: straight-motion variant needs y' = u");
    require(static_cast<int>(req.xi_star.size()) == n, ErrorCode::BadInput,
            "compute_uniform_B: xi_star has wrong dimension");
    double g_target = problem.g(StateView(req.xi_star.data(), req.xi_star.size()));
    require(std::isfinite(g_target), ErrorCode::VariantInapplicable,
            "compute_uniform_B: terminal cost infinite at the target");
    double reach = dist2(StateView(req.xi_star.data(), req.xi_star.size()),
                         StateView(req.x_star.data(), req.x_star.size())) +
                   req.delta_star;
    double speed_cap = reach / (T - req.delta);
    double radius = reach;

    // Straight-motion controls: sampled speeds up to the cap in sampled
    // directions; a cone violation means some start points cannot use the
    // competitor at all.
    const auto dirs = direction_list(m, cfg.dir_count);
    const int mag_count = std::max(1, cfg.mag_count);
    std::vector<double> u(static_cast<size_t>(m));
    double sup_l = -kInf;
    double ball_radius = model.state_invariant ? 0.0 : radius;
    auto sup_at_u = [&]() {
      require(problem.cone_ok(ControlView(u.data(), u.size())),
              ErrorCode::VariantInapplicable,
              "compute_uniform_B: straight-motion control leaves the cone");
      double v = sup_over_ball(
          model, T, req.x_star, ball_radius, cfg.s_count, cfg.ball_count, 13,
          [&](double s, StateView z) {
            return model.value(s, z, ControlView(u.data(), u.size()));
          },
          model.time_invariant);
      sup_l = std::max(sup_l, v);
    };
    std::fill(u.begin(), u.end(), 0.0);
    sup_at_u();
    for (const auto& dir : dirs) {
      for (int j = 1; j <= mag_count; ++j) {
        double r = speed_cap * static_cast<double>(j) / mag_count;
        for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = r * dir[static_cast<size_t>(i)];
        sup_at_u();
      }
    }
    return T * sup_l + g_target;
  }

  // ConstantControl
  require(static_cast<int>(req.u_star.size()) == m, ErrorCode::BadInput,
          "compute_uniform_B: u_star has wrong dimension");
  require(problem.cone_ok(ControlView(req.u_star.data(), req.u_star.size())),
          ErrorCode::VariantInapplicable,
          "compute_uniform_B: u_star outside the cone");
  double u_norm = norm2(req.u_star);
  double base = norm2(req.x_star) + req.delta_star;
  double radius = req.delta_star +
                  (1.0 + base) * (std::exp(problem.dynamics.theta * u_norm * T) - 1.0);
  double sup_l = sup_over_ball(
      model, T, req.x_star, radius, cfg.s_count, cfg.ball_count, 17,
      [&](double s, StateView z) {
        return model.value(s, z, ControlView(req.u_star.data(), req.u_star.size()));
      },
      model.time_invariant);
  double sup_g = sup_over_ball(
      model, T, req.x_star, radius, cfg.s_count, cfg.ball_count, 19,
      [&](double, StateView z) { return problem.g(z); }, true);
  return T * sup_l + sup_g;
}

}  // namespace bolza
