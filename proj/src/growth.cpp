#include "bolza/growth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bolza {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Shared estimate cache so the c ladder reuses tail sups across rungs.
struct EstimateCache {
  const LagrangianModel* model;
  const BoundsContext* ctx;
  const SamplerConfig* sampler;
  std::map<double, SupInfEstimate> xi;
  std::map<std::pair<double, double>, SupInfEstimate> upsilon;

  const SupInfEstimate& Xi(double nu) {
    auto it = xi.find(nu);
    if (it == xi.end()) {
      it = xi.emplace(nu, estimate_sup_tail(*model, ctx->T, ctx->K, nu, *sampler))
               .first;
    }
    return it->second;
  }
  const SupInfEstimate& Upsilon(double c, double rho) {
    auto key = std::make_pair(c, rho);
    auto it = upsilon.find(key);
    if (it == upsilon.end()) {
      it = upsilon
               .emplace(key,
                        estimate_inf_core(*model, ctx->T, ctx->K, c, rho, *sampler))
               .first;
    }
    return it->second;
  }
};

std::vector<double> c_ladder(const BoundsContext& ctx,
                             const GrowthCheckConfig& cfg) {
  double lo = cfg.c_lo_factor * ctx.c_delta_B;
  double hi = cfg.c_hi_factor * ctx.c_delta_B;
  if (!(ctx.c_delta_B > 0.0)) {
    lo = cfg.c_fallback_lo;
    hi = cfg.c_fallback_hi;
  }
  std::vector<double> out;
  for (int k = 1; k <= cfg.c_steps; ++k) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / cfg.c_steps));
  }
  return out;
}

bool stable_estimate(const SupInfEstimate& e, const GrowthCheckConfig& cfg) {
  return !e.empty && std::isfinite(e.value) &&
         std::abs(e.value) <= cfg.divergence_guard &&
         e.refinement_delta <= cfg.stability_rel_tol * (1.0 + std::abs(e.value));
}

}  // namespace

double find_rho_bar(const LagrangianModel& model, const BoundsContext& ctx,
                    double c, const GrowthCheckConfig& cfg) {
  if (model.real_valued || !model.boundary_distance) return kInf;
  // Nonemptiness probes need no refinement passes.
  SamplerConfig probe = cfg.sampler;
  probe.passes = 1;
  probe.refine_iters = 0;
  for (double rho = cfg.rho_start; rho >= cfg.rho_min; rho *= 0.5) {
    SupInfEstimate e = estimate_inf_core(model, ctx.T, ctx.K, c, rho, probe);
    if (!e.empty) return rho;
  }
  return 0.0;  // no nonempty filtered core found
}

GrowthCertificate check_G(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg) {
  GrowthCertificate cert;
  cert.condition = "G";
  EstimateCache cache{&model, &ctx, &cfg.sampler, {}, {}};

  std::vector<double> values;
  bool any_sample = false;
  for (double nu = 1.0; nu <= cfg.g_ladder_max; nu *= 2.0) {
    const SupInfEstimate& e = cache.Xi(nu);
    double v = e.empty ? -kInf : e.value;  // sup over an empty tail is -inf
    any_sample = any_sample || !e.empty;
    LadderRow row;
    row.nu_bar = nu;
    row.Xi = v;
    row.stable = stable_estimate(e, cfg) || e.empty;
    cert.rows.push_back(row);
    values.push_back(v);
  }

  bool crossed_all = true;
  for (double th : cfg.g_thresholds) {
    bool crossed = false;
    for (double v : values) crossed = crossed || v <= th;
    crossed_all = crossed_all && crossed;
  }
  if (crossed_all) {
    cert.verdict = Verdict::Holds;
    cert.detail = "tail sup crossed every divergence threshold (last rung " +
                  fmt(values.back()) + ")";
    return cert;
  }

  size_t nrows = values.size();
  double last = values[nrows - 1];
  double prev = nrows >= 2 ? values[nrows - 2] : kInf;
  double first_threshold =
      *std::max_element(cfg.g_thresholds.begin(), cfg.g_thresholds.end());
  bool tail_finite = std::isfinite(last) && std::isfinite(prev);
  bool tail_flat =
      tail_finite && std::abs(last - prev) <=
                         std::max(cfg.g_tail_abs_tol,
                                  cfg.g_tail_rel_tol * std::abs(prev));
  if (tail_flat && last > first_threshold) {
    cert.verdict = Verdict::Fails;
    cert.detail = "tail sup settled at " + fmt(last) +
                  " without crossing the first threshold";
    return cert;
  }
  cert.verdict = Verdict::Inconclusive;
  cert.detail = any_sample
                    ? "tail sup neither crossed every threshold nor settled"
                    : "no admissible tail samples";
  return cert;
}

GrowthCertificate check_H(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg) {
  GrowthCertificate cert;
  cert.condition = "H";
  EstimateCache cache{&model, &ctx, &cfg.sampler, {}, {}};
  const double phi2 = 2.0 * ctx.phi_B;

  bool any_core = false;
  for (double c : c_ladder(ctx, cfg)) {
    double rho_bar = find_rho_bar(model, ctx, c, cfg);
    if (rho_bar == 0.0) continue;  // no usable filter at this speed threshold
    std::vector<double> rho_list;
    if (std::isinf(rho_bar)) {
      rho_list = {rho_bar};
    } else {
      rho_list = {rho_bar, rho_bar / 2.0, rho_bar / 4.0};
    }

    std::vector<double> ups(rho_list.size());
    bool usable = true;
    for (size_t i = 0; i < rho_list.size(); ++i) {
      const SupInfEstimate& e = cache.Upsilon(c, rho_list[i]);
      if (e.empty) {
        usable = false;
        break;
      }
      ups[i] = e.value;
    }
    if (!usable) continue;
    any_core = true;

    for (double nu = 1.0; nu <= cfg.nu_bar_max; nu *= 2.0) {
      const SupInfEstimate& xe = cache.Xi(nu);
      double xi = xe.empty ? -kInf : xe.value;
      double min_margin = kInf;
      size_t binding = 0;
      for (size_t i = 0; i < rho_list.size(); ++i) {
        double margin = ups[i] - xi - phi2;
        LadderRow row;
        row.c = c;
        row.nu_bar = nu;
        row.rho = rho_list[i];
        row.Xi = xi;
        row.Upsilon = ups[i];
        row.margin = margin;
        cert.rows.push_back(row);
        if (margin < min_margin) {
          min_margin = margin;
          binding = i;
        }
      }
      if (min_margin > cfg.margin_tol) {
        cert.verdict = Verdict::Holds;
        cert.witness = HWitness{c,
                                nu,
                                rho_bar,
                                min_margin,
                                xi,
                                ups[binding]};
        cert.detail = "margin " + fmt(min_margin) + " at c=" + fmt(c) +
                      ", nu_bar=" + fmt(nu);
        return cert;
      }
    }
  }

  if (!any_core) {
    cert.verdict = Verdict::Inconclusive;
    cert.detail = "no nonempty filtered core sample set on the speed ladder";
    return cert;
  }
  cert.verdict = Verdict::Fails;
  cert.detail = "no (c, nu_bar) pair cleared the margin over the rho list";
  return cert;
}

GrowthCertificate check_M(const LagrangianModel& model, const BoundsContext& ctx,
                          const GrowthCheckConfig& cfg) {
  GrowthCertificate cert;
  cert.condition = "M";
  EstimateCache cache{&model, &ctx, &cfg.sampler, {}, {}};

  bool any_core = false;
  bool core_ok = false;
  double core_c = 0.0, core_rho = 0.0, core_up = 0.0;
  for (double c : c_ladder(ctx, cfg)) {
    double rho_bar = find_rho_bar(model, ctx, c, cfg);
    if (rho_bar == 0.0) continue;
    std::vector<double> rho_list;
    if (std::isinf(rho_bar)) {
      rho_list = {rho_bar};
    } else {
      rho_list = {rho_bar, rho_bar / 2.0, rho_bar / 4.0};
    }
    bool all_ok = true;
    bool all_nonempty = true;
    double up_at_rho_bar = 0.0;
    for (double rho : rho_list) {
      const SupInfEstimate& e = cache.Upsilon(c, rho);
      LadderRow row;
      row.c = c;
      row.rho = rho;
      row.Upsilon = e.empty ? kInf : e.value;
      row.stable = stable_estimate(e, cfg);
      cert.rows.push_back(row);
      all_nonempty = all_nonempty && !e.empty;
      all_ok = all_ok && row.stable;
      if (rho == rho_list.front()) up_at_rho_bar = row.Upsilon;
    }
    if (!all_nonempty) continue;
    any_core = true;
    if (all_ok) {
      core_ok = true;
      core_c = c;
      core_rho = rho_bar;
      core_up = up_at_rho_bar;
      break;
    }
  }

  bool any_tail = false;
  bool tail_ok = false;
  double tail_nu = 0.0;
  double tail_value = 0.0;
  for (double nu = 1.0; nu <= cfg.nu_bar_max; nu *= 2.0) {
    const SupInfEstimate& e = cache.Xi(nu);
    LadderRow row;
    row.nu_bar = nu;
    row.Xi = e.empty ? -kInf : e.value;
    row.stable = stable_estimate(e, cfg);
    cert.rows.push_back(row);
    if (e.empty) {
      // Empty tail: the sup is -inf, which is finite from above; treat as an
      // admissible (vacuous) tail bound.
      any_tail = true;
      tail_ok = true;
      tail_nu = nu;
      tail_value = -kInf;
      break;
    }
    any_tail = true;
    if (row.stable) {
      tail_ok = true;
      tail_nu = nu;
      tail_value = e.value;
      break;
    }
  }

  if (!any_core && !any_tail) {
    cert.verdict = Verdict::Inconclusive;
    cert.detail = "no admissible samples for either side";
    return cert;
  }
  if (core_ok && tail_ok) {
    cert.verdict = Verdict::Holds;
    cert.witness = HWitness{core_c, tail_nu, core_rho, 0.0, tail_value, core_up};
    cert.detail = "stable filtered core inf at c=" + fmt(core_c) +
                  " and stable tail sup at nu_bar=" + fmt(tail_nu);
    return cert;
  }
  cert.verdict = Verdict::Fails;
  if (!core_ok) {
    cert.detail = any_core
                      ? "filtered core inf diverges or is refinement-unstable"
                      : "no nonempty filtered core sample set";
  } else {
    cert.detail = "tail sup diverges or is refinement-unstable on the ladder";
  }
  return cert;
}

GrowthCertificate check_superlinearity(const LagrangianModel& model,
                                       const BoundsContext& ctx,
                                       const GrowthCheckConfig& cfg) {
  GrowthCertificate cert;
  cert.condition = "superlinear";
  std::vector<double> ratios;
  std::vector<bool> present;
  for (int j = 0; j < cfg.sl_decades; ++j) {
    double r = std::pow(10.0, j);
    SupInfEstimate e = estimate_min_on_sphere(model, ctx.T, ctx.K, r, cfg.sampler);
    LadderRow row;
    row.nu_bar = r;
    if (e.empty) {
      row.Xi = kInf;
      row.margin = kInf;
      present.push_back(false);
      ratios.push_back(kInf);
    } else {
      row.Xi = e.value;
      row.margin = e.value / r;
      present.push_back(true);
      ratios.push_back(e.value / r);
    }
    cert.rows.push_back(row);
  }
  size_t nd = ratios.size();
  if (nd >= 3 && present[nd - 1] && present[nd - 3] && ratios[nd - 3] > 0.0 &&
      std::isfinite(ratios[nd - 1]) &&
      ratios[nd - 1] >= cfg.sl_ratio * ratios[nd - 3]) {
    cert.verdict = Verdict::Holds;
    cert.detail = "sampled min/|u| grew from " + fmt(ratios[nd - 3]) + " to " +
                  fmt(ratios[nd - 1]) + " over the last two decades";
    return cert;
  }
  cert.verdict = Verdict::Inconclusive;
  cert.detail = "sampled min/|u| shows no superlinear trend (not a disproof)";
  return cert;
}

bool verify_H_witness(const LagrangianModel& model, const BoundsContext& ctx,
                      const HWitness& witness, const GrowthCheckConfig& cfg) {
  if (!(witness.c > ctx.c_delta_B)) return false;
  std::vector<double> rho_list;
  if (std::isinf(witness.rho_bar)) {
    rho_list = {witness.rho_bar};
  } else {
    rho_list = {witness.rho_bar, witness.rho_bar / 2.0, witness.rho_bar / 4.0};
  }
  SupInfEstimate xe = estimate_sup_tail(model, ctx.T, ctx.K, witness.nu_bar,
                                        cfg.sampler);
  double xi = xe.empty ? -kInf : xe.value;
  for (double rho : rho_list) {
    SupInfEstimate ue =
        estimate_inf_core(model, ctx.T, ctx.K, witness.c, rho, cfg.sampler);
    if (ue.empty) return false;
    if (!(ue.value - xi - 2.0 * ctx.phi_B > cfg.margin_tol)) return false;
  }
  return true;
}

ImplicationReport cross_check_implications(
    const LagrangianModel& model,
    const std::map<std::string, GrowthCertificate>& certs) {
  ImplicationReport rep;
  auto verdict_of = [&](const std::string& name) -> std::optional<Verdict> {
    auto it = certs.find(name);
    if (it == certs.end()) return std::nullopt;
    return it->second.verdict;
  };
  auto sl = verdict_of("superlinear");
  auto g = verdict_of("G");
  auto h = verdict_of("H");
  auto m = verdict_of("M");

  bool radially_convex = model.structure == RadialStructure::RadiallyConvex ||
                         model.structure == RadialStructure::Both;
  if (sl == Verdict::Holds && radially_convex &&
      model.superlinear_ball_radius > 0.0) {
    if (g == Verdict::Fails) {
      rep.violations.push_back(
          "superlinear radially convex integrand sampled as failing the "
          "divergent-tail condition");
    } else {
      rep.notes.push_back(
          "superlinearity plus radial convexity supports the divergent tail");
    }
  }
  if (g == Verdict::Holds) {
    if (model.bounded_well_inside) {
      if (h == Verdict::Fails) {
        rep.violations.push_back(
            "divergent tail with a locally bounded integrand should imply the "
            "core gap condition");
      }
    } else {
      rep.notes.push_back(
          "divergent tail without the core gap is consistent: the integrand "
          "is unbounded on bounded sets well inside its domain");
    }
  }
  if (h == Verdict::Holds && m == Verdict::Fails) {
    rep.violations.push_back(
        "core gap witnesses should certify the finiteness condition");
  }
  return rep;
}

}  // namespace bolza
