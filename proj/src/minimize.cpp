#include "bolza/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bolza {

namespace {

// Piecewise-Simpson cost of one piecewise-constant control with suffix
// recomputation: editing cell k re-evaluates only cells k..N-1 (the state
// downstream of an edit shifts, the prefix does not). Identity dynamics step
// exactly; general dynamics take RK4 substeps. The Simpson midpoint state is
// the chord midpoint, exact in the identity case.
class Evaluator {
 public:
  Evaluator(const ProblemSpec& p, const TimeGrid& grid, int substeps)
      : p_(&p),
        grid_(grid),
        n_(p.dynamics.n),
        m_(p.dynamics.m),
        substeps_(substeps),
        N_(grid.cells()) {
    u_.assign(static_cast<size_t>(N_) * m_, 0.0);
    y_.assign(static_cast<size_t>(N_ + 1) * n_, 0.0);
    scratch_.assign(y_.size(), 0.0);
    cost_.assign(N_, 0.0);
    prefix_.assign(N_ + 1, 0.0);
    mid_.assign(n_, 0.0);
    k1_.assign(n_, 0.0);
    k2_.assign(n_, 0.0);
    k3_.assign(n_, 0.0);
    k4_.assign(n_, 0.0);
    tmp_.assign(n_, 0.0);
    std::copy(p.x.begin(), p.x.end(), y_.begin());
    std::copy(p.x.begin(), p.x.end(), scratch_.begin());
    x_ok_ = p.state_ok(StateView(p.x.data(), p.x.size()));
    total_ = kInf;
  }

  int cells() const { return N_; }
  int dim_m() const { return m_; }
  const TimeGrid& grid() const { return grid_; }
  double total() const { return total_; }
  double prefix_at(int k) const { return prefix_[k]; }
  double control_at(int k, int j) const { return u_[idx(k, j)]; }
  const std::vector<double>& control_flat() const { return u_; }

  void set_control(std::vector<double> flat) {
    u_ = std::move(flat);
    eval_from(0, true);
  }

  // Cost with u[k][j] = v, nothing committed.
  double probe(int k, int j, double v) {
    double saved = u_[idx(k, j)];
    u_[idx(k, j)] = v;
    double c = eval_from(k, false);
    u_[idx(k, j)] = saved;
    return c;
  }

  // Cost with u[k1][j] = v1 and u[k2][j] = v2 (k1 < k2), nothing committed.
  double probe_pair(int k1, int j, double v1, int k2, double v2) {
    double s1 = u_[idx(k1, j)];
    double s2 = u_[idx(k2, j)];
    u_[idx(k1, j)] = v1;
    u_[idx(k2, j)] = v2;
    double c = eval_from(k1, false);
    u_[idx(k1, j)] = s1;
    u_[idx(k2, j)] = s2;
    return c;
  }

  void commit(int k, int j, double v) {
    u_[idx(k, j)] = v;
    eval_from(k, true);
  }

  void commit_pair(int k1, int j, double v1, int k2, double v2) {
    u_[idx(k1, j)] = v1;
    u_[idx(k2, j)] = v2;
    eval_from(k1, true);
  }

 private:
  size_t idx(int k, int j) const { return static_cast<size_t>(k) * m_ + j; }

  void step_state(int k, const double* ya, double* yb) {
    const double* u = &u_[idx(k, 0)];
    if (p_->dynamics.identity) {
      double h = grid_.cell_len(k);
      for (int i = 0; i < n_; ++i) yb[i] = ya[i] + h * u[i];
      return;
    }
    ControlView uv(u, static_cast<size_t>(m_));
    std::copy(ya, ya + n_, yb);
    double h = grid_.cell_len(k) / substeps_;
    for (int s = 0; s < substeps_; ++s) {
      StateView yv(yb, static_cast<size_t>(n_));
      p_->dynamics.apply(yv, uv, k1_);
      for (int i = 0; i < n_; ++i) tmp_[i] = yb[i] + 0.5 * h * k1_[i];
      p_->dynamics.apply(StateView(tmp_.data(), n_), uv, k2_);
      for (int i = 0; i < n_; ++i) tmp_[i] = yb[i] + 0.5 * h * k2_[i];
      p_->dynamics.apply(StateView(tmp_.data(), n_), uv, k3_);
      for (int i = 0; i < n_; ++i) tmp_[i] = yb[i] + h * k3_[i];
      p_->dynamics.apply(StateView(tmp_.data(), n_), uv, k4_);
      for (int i = 0; i < n_; ++i)
        yb[i] += (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

  double cell_cost(int k, const double* ya, const double* yb) {
    ControlView u(&u_[idx(k, 0)], static_cast<size_t>(m_));
    if (!p_->cone_ok(u)) return kInf;
    StateView va(ya, static_cast<size_t>(n_));
    StateView vb(yb, static_cast<size_t>(n_));
    if (!p_->state_ok(vb)) return kInf;
    double sa = grid_.nodes[k];
    double sb = grid_.nodes[k + 1];
    for (int i = 0; i < n_; ++i) mid_[i] = 0.5 * (ya[i] + yb[i]);
    double v;
    try {
      double fa = p_->model.value(sa, va, u);
      double fm = p_->model.value(0.5 * (sa + sb), StateView(mid_.data(), n_), u);
      double fb = p_->model.value(sb, vb, u);
      v = ((sb - sa) / 6.0) * (fa + 4.0 * fm + fb);
    } catch (const std::exception&) {
      return kInf;
    }
    return std::isnan(v) ? kInf : v;
  }

  double eval_from(int k, bool commit_path) {
    double run = x_ok_ ? prefix_[k] : kInf;
    double* store = commit_path ? y_.data() : scratch_.data();
    const double* ya = &y_[static_cast<size_t>(k) * n_];
    for (int i = k; i < N_; ++i) {
      double* yb = store + static_cast<size_t>(i + 1) * n_;
      step_state(i, ya, yb);
      double cc = cell_cost(i, ya, yb);
      if (commit_path) {
        cost_[i] = cc;
        prefix_[i + 1] = prefix_[i] + cc;
      }
      run += cc;
      ya = yb;
    }
    double g = p_->g(StateView(ya, static_cast<size_t>(n_)));
    run += std::isnan(g) ? kInf : g;
    if (commit_path) total_ = run;
    return run;
  }

  const ProblemSpec* p_;
  TimeGrid grid_;
  int n_, m_, substeps_, N_;
  bool x_ok_ = true;
  std::vector<double> u_, y_, scratch_, cost_, prefix_;
  std::vector<double> mid_, k1_, k2_, k3_, k4_, tmp_;
  double total_ = kInf;
};

// Golden-section scan keeping the best sampled point (the objective may be
// +inf on parts of the interval, so the bracket alone is not trusted).
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, int iters) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  double bx = fc <= fd ? c : d;
  double bf = std::min(fc, fd);
  for (int i = 0; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
      if (fc < bf) { bf = fc; bx = c; }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
      if (fd < bf) { bf = fd; bx = d; }
    }
  }
  return {bx, bf};
}

// One multi-sweep coordinate descent pass over the whole control table.
// In paired mode every move on cell k is compensated on the last cell so the
// weighted control sum (hence the reachable endpoint) is preserved exactly.
void descend(Evaluator& E, double bound, int max_sweeps, bool paired) {
  const int N = E.cells();
  const int m = E.dim_m();
  const int kLast = N - 1;
  const double b2 = bound * bound;
  double prev = E.total();
  const int kmax = paired ? N - 1 : N;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int k = 0; k < kmax; ++k) {
      if (E.prefix_at(k) == kInf) continue;  // no move at k can fix cells < k
      for (int j = 0; j < m; ++j) {
        double cur = E.control_at(k, j);
        double others = 0.0;
        for (int i = 0; i < m; ++i)
          if (i != j) others += sqr(E.control_at(k, i));
        double bj = std::sqrt(std::max(0.0, b2 - others));
        if (bj <= 0.0) continue;
        double ratio = 0.0, cur2 = 0.0, cap2 = 0.0;
        if (paired) {
          ratio = E.grid().cell_len(k) / E.grid().cell_len(kLast);
          cur2 = E.control_at(kLast, j);
          double others2 = 0.0;
          for (int i = 0; i < m; ++i)
            if (i != j) others2 += sqr(E.control_at(kLast, i));
          cap2 = b2 - others2;
        }
        auto f = [&](double v) {
          if (!paired) return E.probe(k, j, v);
          double v2 = cur2 - (v - cur) * ratio;
          if (v2 * v2 > cap2) return kInf;
          return E.probe_pair(k, j, v, kLast, v2);
        };
        // Coarse 9-point scan, then golden refinement around the best point.
        double bx = cur, bf = E.total();
        for (int q = 0; q <= 8; ++q) {
          double v = -bj + 2.0 * bj * q / 8.0;
          double c = f(v);
          if (c < bf) { bf = c; bx = v; }
        }
        double w = bj / 4.0;
        auto [gx, gf] =
            golden_min(f, std::max(-bj, bx - w), std::min(bj, bx + w), 24);
        if (gf < bf) { bf = gf; bx = gx; }
        if (bf < E.total() && bx != cur) {
          if (paired) {
            E.commit_pair(k, j, bx, kLast, cur2 - (bx - cur) * ratio);
          } else {
            E.commit(k, j, bx);
          }
        }
      }
    }
    double now = E.total();
    if (std::isfinite(now) && prev - now <= 1e-11 * (1.0 + std::abs(now)))
      break;
    prev = now;
  }
}

// Cell-midpoint resampling of a control signal onto another grid over the
// same horizon.
std::vector<double> resample(const ControlSignal& src, const TimeGrid& dst) {
  std::vector<double> flat(static_cast<size_t>(dst.cells()) * src.m);
  for (int k = 0; k < dst.cells(); ++k) {
    double mid = 0.5 * (dst.nodes[k] + dst.nodes[k + 1]);
    ControlView v = src.cell(src.grid.locate(mid));
    std::copy(v.begin(), v.end(), flat.begin() + static_cast<size_t>(k) * src.m);
  }
  return flat;
}

// Constant control steering x to the terminal hint under identity dynamics.
std::vector<double> straight_start(const ProblemSpec& p, const TimeGrid& grid) {
  int m = p.dynamics.m;
  double span = p.T - p.t;
  std::vector<double> flat(static_cast<size_t>(grid.cells()) * m);
  for (int k = 0; k < grid.cells(); ++k)
    for (int j = 0; j < m; ++j)
      flat[static_cast<size_t>(k) * m + j] = (p.terminal_hint[j] - p.x[j]) / span;
  return flat;
}

// Seeded random start. With a hint the noise is projected to zero weighted
// mean per coordinate (the endpoint is kept exactly) and scaled so every cell
// stays inside 0.95 * bound; without one it is a plain bounded perturbation.
std::vector<double> random_start(const ProblemSpec& p, const TimeGrid& grid,
                                 double bound, const std::vector<double>& straight,
                                 std::uint64_t seed) {
  const int N = grid.cells();
  const int m = p.dynamics.m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> noise(static_cast<size_t>(N) * m);
  for (double& v : noise) v = unif(rng);
  std::vector<double> out(noise.size(), 0.0);
  if (!straight.empty()) {
    double span = grid.t1() - grid.t0();
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k)
        s += grid.cell_len(k) * noise[static_cast<size_t>(k) * m + j];
      double adj = s / span;
      for (int k = 0; k < N; ++k) noise[static_cast<size_t>(k) * m + j] -= adj;
    }
    double worst = 0.0;
    for (int k = 0; k < N; ++k)
      worst = std::max(worst, norm2(ControlView(&noise[static_cast<size_t>(k) * m],
                                                static_cast<size_t>(m))));
    double base = norm2(ControlView(straight.data(), static_cast<size_t>(m)));
    double amp = std::max(0.0, 0.95 * bound - base);
    double s = worst > 0.0 ? amp / worst : 0.0;
    for (size_t i = 0; i < out.size(); ++i) out[i] = straight[i] + s * noise[i];
  } else {
    double s = 0.5 * bound / std::sqrt(static_cast<double>(m));
    for (size_t i = 0; i < out.size(); ++i) out[i] = s * noise[i];
  }
  return out;
}

AdmissiblePair solve_impl(std::shared_ptr<const ProblemSpec> problem, int cells,
                          double bound, const MinimizeConfig& cfg,
                          const std::vector<const ControlSignal*>& warms,
                          bool rng_starts) {
  const ProblemSpec& p = *problem;
  p.validate();
  cfg.validate();
  require(cells >= 1, ErrorCode::BadInput, "cell count must be positive");
  require(std::isfinite(bound) && bound > 0.0, ErrorCode::BadInput,
          "control bound must be positive and finite");
  TimeGrid grid = TimeGrid::uniform(p.t, p.T, cells);
  const int m = p.dynamics.m;
  const bool hint_ok = !p.terminal_hint.empty() && p.dynamics.identity &&
                       static_cast<int>(p.terminal_hint.size()) == p.dynamics.n &&
                       m == p.dynamics.n;
  const bool paired = hint_ok;

  std::vector<std::vector<double>> starts;
  for (const ControlSignal* wptr : warms) {
    if (!wptr) continue;
    require(wptr->m == m, ErrorCode::BadInput, "warm start control dimension mismatch");
    double span = p.T - p.t;
    require(std::abs(wptr->grid.t0() - p.t) <= 1e-9 * (1.0 + span) &&
                std::abs(wptr->grid.t1() - p.T) <= 1e-9 * (1.0 + span),
            ErrorCode::BadInput, "warm start horizon mismatch");
    starts.push_back(resample(*wptr, grid));
  }
  std::vector<double> straight;
  if (hint_ok) {
    straight = straight_start(p, grid);
    starts.push_back(straight);
  }
  // A zero start cannot leave the hint ball under paired moves, so skip it
  // for hard-endpoint problems (the straight start covers hint == x).
  if (!paired) starts.emplace_back(static_cast<size_t>(cells) * m, 0.0);
  if (rng_starts) {
    for (int r = 0; r < cfg.restarts; ++r)
      starts.push_back(random_start(p, grid, bound, straight,
                                    cfg.seed * 1000003ULL + r));
  }
  // Project every start into the per-cell control ball: a hint start may sit
  // outside the current bound, and descent cannot move a cell it cannot reach
  // (the move window collapses to zero there). If the projection breaks a
  // hard endpoint, every start stays infinite and the no-admissible-point
  // error below reports it.
  for (std::vector<double>& s : starts) {
    for (int k = 0; k < cells; ++k) {
      double* cellv = &s[static_cast<size_t>(k) * m];
      double r = norm2(ControlView(cellv, static_cast<size_t>(m)));
      if (r > bound)
        for (int j = 0; j < m; ++j) cellv[j] *= bound / r;
    }
  }
  for (size_t i = 1; i < starts.size();) {  // drop exact duplicates
    bool dup = false;
    for (size_t q = 0; q < i && !dup; ++q) dup = starts[q] == starts[i];
    if (dup) starts.erase(starts.begin() + i); else ++i;
  }

  std::vector<double> costs(starts.size(), kInf);
  std::vector<std::vector<double>> finals(starts.size());
  parallel_for(static_cast<int>(starts.size()), [&](int i) {
    Evaluator E(p, grid, 8);
    E.set_control(starts[i]);
    descend(E, bound, cfg.inner_iters, paired);
    costs[i] = E.total();
    finals[i] = E.control_flat();
  });

  std::vector<size_t> order(starts.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return costs[a] < costs[b]; });
  require(!order.empty() && std::isfinite(costs[order[0]]),
          ErrorCode::NoAdmissiblePoint, "every start stayed at infinite cost");
  for (size_t idx : order) {
    if (!std::isfinite(costs[idx])) break;
    ControlSignal u;
    u.grid = grid;
    u.m = m;
    u.flat = finals[idx];
    AdmissiblePair pair = make_admissible_pair(problem, std::move(u));
    if (!evaluate_cost_detail(pair, cfg.quad).infinite) return pair;
  }
  fail(ErrorCode::NoAdmissiblePoint,
       "every candidate has infinite cost under adaptive quadrature");
}

double extrapolate_limit(const std::vector<double>& ladder) {
  std::vector<double> c;
  for (double v : ladder) {
    if (std::isfinite(v)) c.push_back(v);
    else c.clear();  // extrapolate from the finite suffix only
  }
  if (c.empty()) return kInf;
  size_t n = c.size();
  if (n == 1) return c[0];
  double d2 = c[n - 1] - c[n - 2];
  if (!(d2 < 0.0) || std::abs(d2) <= 1e-12 * (1.0 + std::abs(c[n - 1])))
    return c[n - 1];
  double r = 0.25;  // default: second-order decrement on a doubling ladder
  if (n >= 3) {
    double d1 = c[n - 2] - c[n - 3];
    if (d1 < 0.0 && std::abs(d2) < std::abs(d1))
      r = std::clamp(d2 / d1, 0.0, 0.9);
  }
  return c[n - 1] + d2 * r / (1.0 - r);
}

}  // namespace

void MinimizeConfig::validate() const {
  require(!grid_ladder.empty(), ErrorCode::BadInput, "grid ladder is empty");
  for (size_t i = 0; i < grid_ladder.size(); ++i) {
    require(grid_ladder[i] >= 1, ErrorCode::BadInput, "grid ladder entries must be positive");
    require(i == 0 || grid_ladder[i] > grid_ladder[i - 1], ErrorCode::BadInput,
            "grid ladder must be strictly increasing");
  }
  require(!control_bound_ladder.empty(), ErrorCode::BadInput, "control bound ladder is empty");
  for (size_t i = 0; i < control_bound_ladder.size(); ++i) {
    require(std::isfinite(control_bound_ladder[i]) && control_bound_ladder[i] > 0.0,
            ErrorCode::BadInput, "control bounds must be positive and finite");
    require(i == 0 || control_bound_ladder[i] > control_bound_ladder[i - 1],
            ErrorCode::BadInput, "control bound ladder must be strictly increasing");
  }
  require(inner_iters > 0, ErrorCode::BadInput, "inner iteration budget must be positive");
  require(restarts > 0, ErrorCode::BadInput, "restart budget must be positive");
  require(noise_tol > 0.0, ErrorCode::BadInput, "noise tolerance must be positive");
  require(gap_rel_tol > 0.0, ErrorCode::BadInput, "gap tolerance must be positive");
}

AdmissiblePair minimize_direct(std::shared_ptr<const ProblemSpec> problem,
                               int cells, double control_bound,
                               const MinimizeConfig& cfg,
                               const ControlSignal* warm_start) {
  std::vector<const ControlSignal*> warms;
  if (warm_start) warms.push_back(warm_start);
  return solve_impl(std::move(problem), cells, control_bound, cfg, warms, true);
}

std::vector<NicePairResult> minimizing_sequence(
    std::shared_ptr<const ProblemSpec> problem, const BoundsContext& ctx,
    const GrowthCertificate& certificate, const MinimizeConfig& cfg,
    double eta, const ReparamOptions& reparam_options) {
  cfg.validate();
  require(certificate.verdict == Verdict::Holds, ErrorCode::CertificateRequired,
          "minimizing_sequence needs a Holds certificate");
  const double bound = cfg.control_bound_ladder.back();
  std::vector<AdmissiblePair> raw;
  ControlSignal prev;
  for (size_t i = 0; i < cfg.grid_ladder.size(); ++i) {
    std::vector<const ControlSignal*> warms;
    if (i > 0) warms.push_back(&prev);
    raw.push_back(solve_impl(problem, cfg.grid_ladder[i], bound, cfg, warms,
                             /*rng_starts=*/i == 0));
    prev = raw.back().u;
  }
  std::vector<NicePairResult> out;
  out.reserve(raw.size());
  double nu_shared = 0.0;
  for (const AdmissiblePair& pair : raw) {
    out.push_back(nice_pair(pair, ctx, certificate, eta, reparam_options));
    nu_shared = std::max(nu_shared, out.back().certificate.nu);
  }
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].certificate.nu == nu_shared) continue;
    ReparamOptions forced = reparam_options;
    forced.force_nu = nu_shared;
    out[i] = nice_pair(raw[i], ctx, certificate, eta, forced);
  }
  return out;
}

const char* gap_verdict_name(GapVerdict v) {
  switch (v) {
    case GapVerdict::NoGapDetected: return "NoGapDetected";
    case GapVerdict::GapSuspected: return "GapSuspected";
  }
  return "?";
}

GapReport lavrentiev_probe(std::shared_ptr<const ProblemSpec> problem,
                           const MinimizeConfig& cfg) {
  cfg.validate();
  const size_t nG = cfg.grid_ladder.size();
  const size_t nB = cfg.control_bound_ladder.size();
  std::vector<std::vector<ControlSignal>> sol(nB, std::vector<ControlSignal>(nG));
  std::vector<std::vector<double>> cost(nB, std::vector<double>(nG, kInf));
  GapReport rep;
  for (size_t b = 0; b < nB; ++b) {
    for (size_t g = 0; g < nG; ++g) {
      std::vector<const ControlSignal*> warms;
      if (g > 0 && sol[b][g - 1].grid.nodes.size() >= 2)
        warms.push_back(&sol[b][g - 1]);
      if (b > 0 && sol[b - 1][g].grid.nodes.size() >= 2)
        warms.push_back(&sol[b - 1][g]);
      try {
        AdmissiblePair pair =
            solve_impl(problem, cfg.grid_ladder[g], cfg.control_bound_ladder[b],
                       cfg, warms, /*rng_starts=*/warms.empty());
        sol[b][g] = pair.u;
        cost[b][g] = evaluate_cost(pair, cfg.quad);
      } catch (const Error& e) {
        // A bound too small to reach the endpoint is an empty cell, not a
        // failed probe.
        if (e.code() != ErrorCode::NoAdmissiblePoint) throw;
      }
      rep.lattice.push_back(
          {cfg.grid_ladder[g], cfg.control_bound_ladder[b], cost[b][g]});
    }
  }
  rep.lipschitz_inf = extrapolate_limit(cost[nB - 1]);
  std::vector<double> diag;
  for (size_t i = 0; i < std::max(nG, nB); ++i)
    diag.push_back(cost[std::min(i, nB - 1)][std::min(i, nG - 1)]);
  rep.unconstrained_inf = extrapolate_limit(diag);
  rep.gap_estimate = rep.lipschitz_inf - rep.unconstrained_inf;
  rep.gap_tol = cfg.gap_rel_tol * (1.0 + std::abs(rep.unconstrained_inf));
  rep.verdict = rep.gap_estimate <= rep.gap_tol ? GapVerdict::NoGapDetected
                                                : GapVerdict::GapSuspected;
  rep.caveat =
      "lattice infima over piecewise-constant controls are assumed to "
      "converge to the true infimum; for running costs discontinuous in "
      "(y, u) this is a modeling assumption, so the gap estimate is "
      "numerical evidence, not a certificate";
  return rep;
}

}  // namespace bolza
