#include "bolza/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bolza {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t k = static_cast<size_t>(it - xs.begin()) - 1;
  double f = (x - xs[k]) / (xs[k + 1] - xs[k]);
  return ys[k] + f * (ys[k + 1] - ys[k]);
}

}  // namespace

double ChangeOfVariable::phi(double x) const { return interp(tau, s, x); }

double ChangeOfVariable::psi(double x) const { return interp(s, tau, x); }

double ChangeOfVariable::sup_deviation() const {
  double dev = 0.0;
  for (size_t k = 0; k < tau.size(); ++k) {
    dev = std::max(dev, std::abs(s[k] - tau[k]));
  }
  return dev;
}

double ChangeOfVariable::inverse_lipschitz() const {
  double rank = 0.0;
  for (size_t k = 0; k + 1 < s.size(); ++k) {
    rank = std::max(rank, (tau[k + 1] - tau[k]) / (s[k + 1] - s[k]));
  }
  return rank;
}

void ChangeOfVariable::validate() const {
  require(tau.size() == s.size() && tau.size() >= 2, ErrorCode::BadInput,
          "time change: breakpoint vectors must match and span an interval");
  for (size_t k = 0; k + 1 < tau.size(); ++k) {
    require(tau[k] < tau[k + 1] && s[k] < s[k + 1], ErrorCode::BadInput,
            "time change: breakpoints must be strictly increasing");
  }
  require(s.front() == tau.front() && s.back() == tau.back(),
          ErrorCode::BadInput, "time change: endpoints must be fixed");
}

ExcessSet compute_level_set_S(const ControlSignal& u, double nu) {
  require(nu > 0.0 && std::isfinite(nu), ErrorCode::BadInput,
          "compute_level_set_S: speed bound must be positive");
  ExcessSet out;
  KahanSum excess;
  for (int k = 0; k < u.grid.cells(); ++k) {
    double r = norm2(u.cell(k));
    if (r > nu) {
      out.set.add(u.grid.nodes[static_cast<size_t>(k)],
                  u.grid.nodes[static_cast<size_t>(k) + 1]);
      excess.add((r / nu - 1.0) * u.grid.cell_len(k));
    }
  }
  out.excess = excess.value();
  return out;
}

namespace {

// Per-cell well-inside classification at the cell midpoint (exact for the
// built-ins, whose boundary distance depends on the control alone).
IntervalSet wellinside_cells(const AdmissiblePair& pair, double dist_floor) {
  const LagrangianModel& model = pair.problem->model;
  const TimeGrid& grid = pair.u.grid;
  IntervalSet out;
  std::vector<double> y_mid(static_cast<size_t>(model.n));
  for (int k = 0; k < grid.cells(); ++k) {
    double s_mid = 0.5 * (grid.nodes[static_cast<size_t>(k)] +
                          grid.nodes[static_cast<size_t>(k) + 1]);
    StateView ya = pair.y.node(k);
    StateView yb = pair.y.node(k + 1);
    for (int i = 0; i < model.n; ++i) {
      y_mid[static_cast<size_t>(i)] =
          0.5 * (ya[static_cast<size_t>(i)] + yb[static_cast<size_t>(i)]);
    }
    double d = model.boundary_dist(s_mid, StateView(y_mid.data(), y_mid.size()),
                                   pair.u.cell(k));
    if (d >= dist_floor) {
      out.add(grid.nodes[static_cast<size_t>(k)],
              grid.nodes[static_cast<size_t>(k) + 1]);
    }
  }
  return out;
}

}  // namespace

MuRhoSelection select_mu_rho(const BoundsContext& ctx, const AdmissiblePair& pair,
                             double c, double rho_bar, double rho_min) {
  require(c > 0.0 && std::isfinite(c), ErrorCode::BadInput,
          "select_mu_rho: speed threshold must be positive and finite");
  double ratio = ctx.c_delta_B / c;
  require(ratio < 1.0, ErrorCode::MuInfeasible,
          "select_mu_rho: speed threshold does not exceed the sublevel "
          "threshold; raise c");

  MuRhoSelection sel;
  sel.mu0 = 0.5 * (ratio + 1.0);
  sel.Delta = 0.5 * (ratio / sel.mu0 + 1.0);

  const TimeGrid& grid = pair.u.grid;
  const double t = grid.t0();
  const double T = grid.t1();
  const bool filtered = !pair.problem->model.real_valued &&
                        static_cast<bool>(pair.problem->model.boundary_distance) &&
                        std::isfinite(rho_bar);
  if (!filtered) {
    sel.rho = kInf;
    sel.J_rho.add(t, T);
  } else {
    bool found = false;
    for (double rho = rho_bar; rho >= rho_min; rho *= 0.5) {
      IntervalSet J = wellinside_cells(pair, 2.0 * rho);
      if (J.measure() >= sel.Delta * (T - t)) {
        sel.rho = rho;
        sel.J_rho = J;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::RhoSearchFailed,
            "select_mu_rho: no well-inside margin leaves the required measure; "
            "the pair's cost premise is likely violated");
  }

  sel.mu = std::max(sel.mu0, std::isfinite(sel.rho) ? c / (sel.rho + c) : 0.0);
  sel.m = sel.Delta - ratio / sel.mu;
  sel.Omega_mu = sublevel_cells(pair.u, sel.mu * c);
  sel.Omega = sel.Omega_mu.intersect(sel.J_rho);
  require(sel.Omega.measure() >= sel.m * (T - t) - 1e-12 * (1.0 + T - t),
          ErrorCode::PreconditionViolated,
          "select_mu_rho: sublevel measure bound failed; the pair's cost "
          "premise is likely violated");
  return sel;
}

double select_nu(const BoundsContext& ctx, double mu, double m, double eps_star,
                 const GrowthCertificate& certificate, double eta) {
  require(certificate.verdict == Verdict::Holds && certificate.witness,
          ErrorCode::CertificateRequired,
          "select_nu: needs a Holds certificate with a witness");
  const bool finiteness = certificate.condition == "M";
  require(finiteness || certificate.condition == "H",
          ErrorCode::CertificateRequired,
          "select_nu: certificate must be the core-gap or finiteness condition");
  require(!finiteness || eta > 0.0, ErrorCode::CertificateRequired,
          "select_nu: the finiteness condition needs a positive cost slack eta");
  require(mu > 0.0 && mu < 1.0, ErrorCode::BadInput,
          "select_nu: slowdown factor must lie in (0,1)");

  const HWitness& w = *certificate.witness;
  double room = (1.0 - mu) * m * (ctx.T - ctx.delta);
  double cap = std::min(room, 0.5 * eps_star);
  require(cap > 0.0, ErrorCode::InsufficientRoom,
          "select_nu: no positive excess room (measure margin or time-shift "
          "room vanished)");
  double gap = 2.0 * ctx.phi_B + w.Xi - w.Upsilon;

  double nu = std::max(w.nu_bar, w.c);
  for (int i = 0; i < 256; ++i) {
    bool ok = ctx.R / nu <= cap;
    if (ok && finiteness && gap > 0.0) ok = (ctx.R / nu) * gap <= eta;
    if (ok) return nu;
    nu *= 2.0;
  }
  fail(ErrorCode::InsufficientRoom, "select_nu: speed-bound ladder exhausted");
}

IntervalSet select_Sigma(const IntervalSet& Omega, const IntervalSet& S_nu,
                         double excess, double mu, double t, double T) {
  require(mu > 0.0 && mu < 1.0, ErrorCode::BadInput,
          "select_Sigma: slowdown factor must lie in (0,1)");
  require(excess >= 0.0, ErrorCode::BadInput,
          "select_Sigma: excess must be nonnegative");
  return Omega.subtract(S_nu, t, T).leftmost_fill(excess / (1.0 - mu));
}

ChangeOfVariable build_phi(const TimeGrid& grid, const IntervalSet& S_nu,
                           const IntervalSet& Sigma_nu, double mu, double nu,
                           const ControlSignal& u) {
  grid.validate();
  require(mu > 0.0, ErrorCode::SlopeNonpositive,
          "build_phi: slowdown factor must be positive");
  require(nu > 0.0, ErrorCode::SlopeNonpositive,
          "build_phi: speed bound must be positive");
  require(u.grid.nodes == grid.nodes, ErrorCode::BadInput,
          "build_phi: control must live on the supplied grid");

  ChangeOfVariable cov;
  cov.tau = grid.nodes;
  cov.s.assign(cov.tau.size(), 0.0);
  cov.s[0] = cov.tau[0];
  // Accumulate the deviation from the identity, not phi itself: cells with
  // unit slope then keep their breakpoints bit-exact and the closing drift is
  // a sum of small terms.
  KahanSum dev;
  for (int k = 0; k < grid.cells(); ++k) {
    double mid = 0.5 * (grid.nodes[static_cast<size_t>(k)] +
                        grid.nodes[static_cast<size_t>(k) + 1]);
    double slope = 1.0;
    if (S_nu.contains(mid)) {
      slope = norm2(u.cell(k)) / nu;
      require(slope > 0.0, ErrorCode::SlopeNonpositive,
              "build_phi: vanishing control inside the slowdown set");
    } else if (Sigma_nu.contains(mid)) {
      slope = mu;
    }
    if (slope != 1.0) dev.add((slope - 1.0) * grid.cell_len(k));
    cov.s[static_cast<size_t>(k) + 1] =
        grid.nodes[static_cast<size_t>(k) + 1] + dev.value();
  }
  double drift = std::abs(cov.s.back() - cov.tau.back());
  require(drift <= 1e-12 * std::max(1.0, std::abs(cov.tau.back())),
          ErrorCode::PreconditionViolated,
          "build_phi: closing drift exceeds 1e-12; slowdown excess and "
          "speed-up measure are inconsistent");
  cov.s.back() = cov.tau.back();
  cov.validate();
  return cov;
}

AdmissiblePair reparametrize_pair(const AdmissiblePair& pair,
                                  const ChangeOfVariable& cov, double nu,
                                  double mu, const IntervalSet& S_nu,
                                  const IntervalSet& Sigma_nu, int substeps) {
  cov.validate();
  require(pair.u.grid.nodes == cov.tau, ErrorCode::BadInput,
          "reparametrize_pair: pair must be refined onto the time-change grid");
  require(mu > 0.0 && nu > 0.0, ErrorCode::BadInput,
          "reparametrize_pair: mu and nu must be positive");
  const ProblemSpec& problem = *pair.problem;
  const int m = pair.u.m;

  ControlSignal ubar;
  ubar.grid.nodes = cov.s;
  ubar.m = m;
  ubar.flat = pair.u.flat;
  for (int k = 0; k < ubar.grid.cells(); ++k) {
    double mid = 0.5 * (cov.tau[static_cast<size_t>(k)] +
                        cov.tau[static_cast<size_t>(k) + 1]);
    std::span<double> uk = ubar.cell_mut(k);
    if (S_nu.contains(mid)) {
      double r = norm2(ControlView(uk.data(), uk.size()));
      for (double& v : uk) v *= nu / r;
    } else if (Sigma_nu.contains(mid)) {
      for (double& v : uk) v /= mu;
    }
    require(problem.cone_ok(ControlView(uk.data(), uk.size())),
            ErrorCode::ConeViolation,
            "reparametrize_pair: rescaled control leaves the cone");
  }

  StateTrajectory ybar = pair.y;
  ybar.grid.nodes = cov.s;

  PairCheckConfig check;
  check.substeps = substeps;
  return assemble_admissible_pair(pair.problem, std::move(ybar),
                                  std::move(ubar), check);
}

NicePairResult nice_pair(const AdmissiblePair& pair, const BoundsContext& ctx,
                         const GrowthCertificate& certificate, double eta,
                         const ReparamOptions& options) {
  require(certificate.verdict == Verdict::Holds && certificate.witness,
          ErrorCode::CertificateRequired,
          "nice_pair: needs a Holds certificate with a witness");
  require(certificate.condition == "H" || certificate.condition == "M",
          ErrorCode::CertificateRequired,
          "nice_pair: certificate must be the core-gap or finiteness condition");
  const bool finiteness = certificate.condition == "M";
  require(!finiteness || eta > 0.0, ErrorCode::CertificateRequired,
          "nice_pair: the finiteness condition needs a positive cost slack eta");
  require(eta >= 0.0, ErrorCode::BadInput, "nice_pair: eta must be nonnegative");

  const LagrangianModel& model = pair.problem->model;
  const HWitness& w = *certificate.witness;
  const double t = pair.u.grid.t0();
  const double T = pair.u.grid.t1();

  CostBreakdown before = evaluate_cost_detail(pair, options.quad);
  require(!before.infinite, ErrorCode::PreconditionViolated,
          "nice_pair: input pair has infinite cost");
  require(before.total <=
              ctx.B + options.premise_slack_rel * (1.0 + std::abs(ctx.B)),
          ErrorCode::PreconditionViolated,
          "nice_pair: input cost exceeds the family budget");

  MuRhoSelection sel = select_mu_rho(ctx, pair, w.c, w.rho_bar, options.rho_min);
  double mu = sel.mu;
  double m_margin = sel.m;
  if (options.force_mu) {
    mu = *options.force_mu;
    require(mu > 0.0 && mu < 1.0, ErrorCode::BadInput,
            "nice_pair: forced slowdown factor must lie in (0,1)");
    m_margin = sel.Delta - ctx.c_delta_B / (mu * w.c);
  }

  double nu = 0.0;
  if (options.force_nu) {
    nu = *options.force_nu;
    require(nu > 0.0, ErrorCode::BadInput,
            "nice_pair: forced speed bound must be positive");
  } else {
    nu = select_nu(ctx, mu, m_margin, ctx.eps_star_eff, certificate, eta);
  }

  ExcessSet S = compute_level_set_S(pair.u, nu);
  IntervalSet Sigma = options.force_sigma
                          ? *options.force_sigma
                          : select_Sigma(sel.Omega, S.set, S.excess, mu, t, T);

  SupInfEstimate Xi =
      estimate_sup_tail(model, ctx.T, ctx.K, w.nu_bar, options.sampler);
  SupInfEstimate Upsilon =
      estimate_inf_core(model, ctx.T, ctx.K, w.c, sel.rho, options.sampler);

  std::vector<double> breakpoints;
  for (const Interval& part : S.set.parts()) {
    breakpoints.push_back(part.a);
    breakpoints.push_back(part.b);
  }
  for (const Interval& part : Sigma.parts()) {
    breakpoints.push_back(part.a);
    breakpoints.push_back(part.b);
  }
  AdmissiblePair refined = refine_pair(pair, breakpoints, options.substeps);
  ChangeOfVariable cov =
      build_phi(refined.u.grid, S.set, Sigma, mu, nu, refined.u);
  AdmissiblePair out = reparametrize_pair(refined, cov, nu, mu, S.set, Sigma,
                                          options.substeps);
  CostBreakdown after = evaluate_cost_detail(out, options.quad);
  require(!after.infinite, ErrorCode::CostRegression,
          "nice_pair: reparametrized pair has infinite cost");

  // Certified inequality with the measured margins substituted; a violation
  // means the sampled tail sup or core inf misjudged the pair's own points.
  double margin_bound = 0.0;
  if (S.excess > 0.0) {
    margin_bound = S.excess * (2.0 * ctx.phi_B + Xi.value - Upsilon.value);
  }
  double slack = options.cost_slack_rel * (1.0 + std::abs(before.total)) +
                 before.quad_error + after.quad_error;
  if (after.total > before.total + margin_bound + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "nice_pair: cost " << after.total << " exceeds the certified bound "
       << before.total << " + " << margin_bound << " (excess " << S.excess
       << ", tail sup " << Xi.value << ", core inf " << Upsilon.value
       << ", time budget " << ctx.phi_B << ")";
    fail(ErrorCode::CostRegression, os.str());
  }

  NicePairResult result;
  result.pair = out;
  ReparamCertificate& cert = result.certificate;
  cert.ctx = ctx;
  cert.c = w.c;
  cert.mu = mu;
  cert.mu0 = sel.mu0;
  cert.Delta = sel.Delta;
  cert.rho = sel.rho;
  cert.m = m_margin;
  cert.nu = nu;
  cert.eta = eta;
  cert.Xi = Xi;
  cert.Upsilon = Upsilon;
  cert.level_sets.S_nu = S.set;
  cert.level_sets.excess = S.excess;
  cert.level_sets.Omega_mu = sel.Omega_mu;
  cert.level_sets.J_rho = sel.J_rho;
  cert.level_sets.Omega = sel.Omega;
  cert.level_sets.Sigma_nu = Sigma;
  cert.cov = cov;
  cert.cost_before = before.total;
  cert.cost_after = after.total;
  cert.bound_u_inf = result.pair.u.sup_norm();
  cert.lipschitz_rank_y = result.pair.y.lipschitz_rank();
  require(cert.bound_u_inf <= std::max(nu, w.c) * (1.0 + 1e-12),
          ErrorCode::PreconditionViolated,
          "nice_pair: output control exceeds the certified speed bound");
  return result;
}

}  // namespace bolza
