#include "bolza/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bolza/expr.hpp"

namespace bolza {

namespace {

using nlohmann::json;

void fmt_double(double v, std::string& out) {
  if (std::isnan(v)) {
    out += "\"nan\"";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0.0 ? "\"inf\"" : "\"-inf\"";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

// Canonical serialization: nlohmann objects already iterate in sorted key
// order; this walker only pins the float format (and maps non-finite values
// to strings, which bare JSON cannot carry).
void stable_dump(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.cbegin(); it != j.cend(); ++it) {
        if (!first) out += ',';
        first = false;
        stable_dump(json(it.key()), out);
        out += ':';
        stable_dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        stable_dump(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      fmt_double(j.get<double>(), out);
      break;
    default:
      out += j.dump();  // strings (escaped), integers, booleans, null
  }
}

std::string stable(const json& j) {
  std::string s;
  stable_dump(j, s);
  return s;
}

json parse_document(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string(what) + ": " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* what) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    require(ok, ErrorCode::BadInput,
            std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

json interval_set_json(const IntervalSet& set) {
  json arr = json::array();
  for (const auto& iv : set.parts()) arr.push_back(json::array({iv.a, iv.b}));
  return arr;
}

json estimate_json(const SupInfEstimate& est) {
  return json{{"max_abs_u", est.max_abs_u},
              {"refinement_delta", est.refinement_delta},
              {"samples", est.samples},
              {"value", est.value}};
}

json context_json(const BoundsContext& ctx) {
  json gamma{{"nodes", ctx.s_data.gamma.nodes},
             {"values", ctx.s_data.gamma.values}};
  json s_data{{"A", ctx.s_data.A},
              {"eps_star", ctx.s_data.eps_star},
              {"gamma", gamma},
              {"kappa", ctx.s_data.kappa}};
  return json{{"B", ctx.B},
              {"K", ctx.K},
              {"R", ctx.R},
              {"T", ctx.T},
              {"alpha", ctx.alpha},
              {"c_delta_B", ctx.c_delta_B},
              {"d", ctx.d},
              {"delta", ctx.delta},
              {"delta_star", ctx.delta_star},
              {"eps_star_eff", ctx.eps_star_eff},
              {"eta", ctx.eta},
              {"phi_B", ctx.phi_B},
              {"s_data", s_data},
              {"theta", ctx.theta},
              {"x_star", ctx.x_star}};
}

json pair_json(const AdmissiblePair& pair) {
  json states = json::array();
  for (size_t k = 0; k < pair.u.grid.nodes.size(); ++k) {
    StateView v = pair.y.node(static_cast<int>(k));
    states.push_back(std::vector<double>(v.begin(), v.end()));
  }
  json controls = json::array();
  for (int k = 0; k < pair.u.grid.cells(); ++k) {
    ControlView v = pair.u.cell(k);
    controls.push_back(std::vector<double>(v.begin(), v.end()));
  }
  return json{{"controls", controls},
              {"grid", pair.u.grid.nodes},
              {"states", states}};
}

}  // namespace

std::string numbers_to_json(const std::map<std::string, double>& values) {
  json j = json::object();
  for (const auto& [name, v] : values) j[name] = v;
  return stable(j);
}

std::string estimate_to_json(const SupInfEstimate& est) {
  return stable(estimate_json(est));
}

std::string context_to_json(const BoundsContext& ctx) {
  return stable(context_json(ctx));
}

std::string certificate_to_json(const GrowthCertificate& cert) {
  json rows = json::array();
  for (const LadderRow& r : cert.rows)
    rows.push_back(json{{"Upsilon", r.Upsilon},
                        {"Xi", r.Xi},
                        {"c", r.c},
                        {"margin", r.margin},
                        {"nu_bar", r.nu_bar},
                        {"rho", r.rho},
                        {"stable", r.stable}});
  json witness;
  if (cert.witness) {
    witness = json{{"Upsilon", cert.witness->Upsilon},
                   {"Xi", cert.witness->Xi},
                   {"c", cert.witness->c},
                   {"margin", cert.witness->margin},
                   {"nu_bar", cert.witness->nu_bar},
                   {"rho_bar", cert.witness->rho_bar}};
  }
  return stable(json{{"condition", cert.condition},
                     {"detail", cert.detail},
                     {"rows", rows},
                     {"verdict", verdict_name(cert.verdict)},
                     {"witness", witness}});
}

std::string reparam_certificate_to_json(const ReparamCertificate& cert) {
  json level_sets{{"J_rho", interval_set_json(cert.level_sets.J_rho)},
                  {"Omega", interval_set_json(cert.level_sets.Omega)},
                  {"Omega_mu", interval_set_json(cert.level_sets.Omega_mu)},
                  {"S_nu", interval_set_json(cert.level_sets.S_nu)},
                  {"Sigma_nu", interval_set_json(cert.level_sets.Sigma_nu)},
                  {"excess", cert.level_sets.excess}};
  json cov{{"s", cert.cov.s}, {"tau", cert.cov.tau}};
  return stable(json{{"Delta", cert.Delta},
                     {"Upsilon", estimate_json(cert.Upsilon)},
                     {"Xi", estimate_json(cert.Xi)},
                     {"bound_u_inf", cert.bound_u_inf},
                     {"c", cert.c},
                     {"cost_after", cert.cost_after},
                     {"cost_before", cert.cost_before},
                     {"cov", cov},
                     {"ctx", context_json(cert.ctx)},
                     {"eta", cert.eta},
                     {"level_sets", level_sets},
                     {"lipschitz_rank_y", cert.lipschitz_rank_y},
                     {"m", cert.m},
                     {"mu", cert.mu},
                     {"mu0", cert.mu0},
                     {"nu", cert.nu},
                     {"rho", cert.rho}});
}

std::string gap_report_to_json(const GapReport& report) {
  json lattice = json::array();
  for (const GapCell& cell : report.lattice)
    lattice.push_back(json{
        {"bound", cell.bound}, {"cells", cell.cells}, {"cost", cell.cost}});
  return stable(json{{"caveat", report.caveat},
                     {"gap_estimate", report.gap_estimate},
                     {"gap_tol", report.gap_tol},
                     {"lattice", lattice},
                     {"lipschitz_inf", report.lipschitz_inf},
                     {"unconstrained_inf", report.unconstrained_inf},
                     {"verdict", gap_verdict_name(report.verdict)}});
}

std::string manifest_to_json(const RunManifest& manifest) {
  json digests = json::object();
  for (const auto& [path, digest] : manifest.input_digests)
    digests[path] = digest;
  return stable(json{{"command", manifest.command},
                     {"input_digests", digests},
                     {"outputs", manifest.outputs},
                     {"tool_version", manifest.tool_version}});
}

std::string error_to_json(const Error& err) {
  std::string code(error_code_name(err.code()));
  std::string message = err.what();
  if (message.rfind(code + ": ", 0) == 0) message = message.substr(code.size() + 2);
  return stable(json{{"code", code}, {"message", message}});
}

std::string pair_to_json(const AdmissiblePair& pair) {
  return stable(pair_json(pair));
}

AdmissiblePair pair_from_json(const std::string& text,
                              std::shared_ptr<const ProblemSpec> problem) {
  require(problem != nullptr, ErrorCode::BadInput, "pair import needs a problem");
  json doc = parse_document(text, "pair document");
  try {
    check_keys(doc, {"controls", "grid", "states"}, "pair document");
    auto nodes = doc.at("grid").get<std::vector<double>>();
    auto states = doc.at("states").get<std::vector<std::vector<double>>>();
    auto controls = doc.at("controls").get<std::vector<std::vector<double>>>();
    require(nodes.size() >= 2, ErrorCode::BadInput, "grid needs two nodes");
    require(states.size() == nodes.size(), ErrorCode::BadInput,
            "states must hold one row per grid node");
    require(controls.size() + 1 == nodes.size(), ErrorCode::BadInput,
            "controls must hold one row per grid cell");
    const int n = problem->dynamics.n;
    const int m = problem->dynamics.m;
    TimeGrid grid;
    grid.nodes = std::move(nodes);
    StateTrajectory y;
    y.grid = grid;
    y.n = n;
    y.flat.reserve(states.size() * n);
    for (const auto& row : states) {
      require(static_cast<int>(row.size()) == n, ErrorCode::BadInput,
              "state row dimension mismatch");
      y.flat.insert(y.flat.end(), row.begin(), row.end());
    }
    ControlSignal u;
    u.grid = grid;
    u.m = m;
    u.flat.reserve(controls.size() * m);
    for (const auto& row : controls) {
      require(static_cast<int>(row.size()) == m, ErrorCode::BadInput,
              "control row dimension mismatch");
      u.flat.insert(u.flat.end(), row.begin(), row.end());
    }
    return assemble_admissible_pair(std::move(problem), std::move(y), std::move(u));
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("pair document: ") + e.what());
  }
}

std::string pair_to_csv(const AdmissiblePair& pair) {
  const int n = pair.y.n;
  const int m = pair.u.m;
  std::string out = "s";
  for (int i = 1; i <= n; ++i) out += ",y_" + std::to_string(i);
  for (int j = 1; j <= m; ++j) out += ",u_" + std::to_string(j);
  out += '\n';
  auto row = [&](double s, StateView y, ControlView u) {
    fmt_double(s, out);
    for (double v : y) {
      out += ',';
      fmt_double(v, out);
    }
    for (double v : u) {
      out += ',';
      fmt_double(v, out);
    }
    out += '\n';
  };
  for (int k = 0; k < pair.u.grid.cells(); ++k) {
    row(pair.u.grid.nodes[k], pair.y.node(k), pair.u.cell(k));
    row(pair.u.grid.nodes[k + 1], pair.y.node(k + 1), pair.u.cell(k));
  }
  return out;
}

std::string lattice_to_csv(const GapReport& report) {
  std::string out = "cells,bound,cost\n";
  for (const GapCell& cell : report.lattice) {
    out += std::to_string(cell.cells);
    out += ',';
    fmt_double(cell.bound, out);
    out += ',';
    fmt_double(cell.cost, out);
    out += '\n';
  }
  return out;
}

LagrangianModel model_from_descriptor(const std::string& text) {
  json doc = parse_document(text, "model descriptor");
  try {
    check_keys(doc,
               {"expr", "domain_expr", "Q_expr", "structure", "condition_s",
                "linear_growth", "n", "m", "name"},
               "model descriptor");
    const int n = doc.value("n", 1);
    const int m = doc.value("m", 1);
    require(n >= 1 && n <= 4 && m >= 1 && m <= 4, ErrorCode::BadInput,
            "descriptor dimensions must be between 1 and 4");
    LagrangianModel model;
    model.name = doc.value("name", std::string("descriptor"));
    model.n = n;
    model.m = m;
    Expr value = Expr::parse(doc.at("expr").get<std::string>(), n, m);
    bool uses_s = value.uses_s();
    bool uses_y = value.uses_y();
    if (doc.contains("domain_expr")) {
      Expr domain = Expr::parse(doc.at("domain_expr").get<std::string>(), n, m);
      uses_s = uses_s || domain.uses_s();
      uses_y = uses_y || domain.uses_y();
      model.value = [value, domain](double s, StateView y, ControlView u) {
        return domain.eval_bool(s, y, u) ? value.eval(s, y, u) : kInf;
      };
      model.in_domain = [domain](double s, StateView y, ControlView u) {
        return domain.eval_bool(s, y, u);
      };
      model.real_valued = false;
      model.domain_is_product = !domain.uses_s() && !domain.uses_y();
    } else {
      model.value = [value](double s, StateView y, ControlView u) {
        return value.eval(s, y, u);
      };
      model.real_valued = true;
    }
    if (doc.contains("Q_expr")) {
      Expr slope = Expr::parse(doc.at("Q_expr").get<std::string>(), n, m);
      model.radial_slope = [slope](double s, StateView y, ControlView u) {
        return slope.eval(s, y, u);
      };
    }
    std::string structure = doc.value("structure", std::string("both"));
    if (structure == "both") {
      model.structure = RadialStructure::Both;
    } else if (structure == "radially_convex") {
      model.structure = RadialStructure::RadiallyConvex;
    } else if (structure == "partially_differentiable") {
      model.structure = RadialStructure::PartiallyDifferentiable;
    } else {
      fail(ErrorCode::BadInput, "unknown structure '" + structure + "'");
    }
    if (doc.contains("condition_s")) {
      const json& cs = doc.at("condition_s");
      check_keys(cs, {"kappa", "A", "gamma_const", "eps_star"}, "condition_s");
      model.condition_s.kappa = cs.value("kappa", 0.0);
      model.condition_s.A = cs.value("A", 0.0);
      model.condition_s.gamma =
          PiecewiseConstantFn::constant(cs.value("gamma_const", 0.0));
      model.condition_s.eps_star = cs.value("eps_star", kInf);
      require(model.condition_s.kappa >= 0.0 && model.condition_s.A >= 0.0 &&
                  model.condition_s.eps_star > 0.0,
              ErrorCode::BadInput, "condition_s entries out of range");
    }
    if (doc.contains("linear_growth")) {
      const json& lg = doc.at("linear_growth");
      check_keys(lg, {"alpha", "d"}, "linear_growth");
      model.growth.alpha = lg.value("alpha", 1.0);
      model.growth.d = lg.value("d", 0.0);
    }
    require(model.growth.alpha > 0.0 && model.growth.d >= 0.0,
            ErrorCode::BadInput, "linear growth needs alpha > 0, d >= 0");
    model.time_invariant = !uses_s;
    model.state_invariant = !uses_y;
    // Trim default sampler budgets when the integrand actually varies with
    // s or y; descriptor evaluation is much slower than the built-ins.
    if (uses_s) model.sampler_hint.s_count = 17;
    if (uses_y) model.sampler_hint.ball_count = 65;
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("model descriptor: ") + e.what());
  }
}

LagrangianModel model_from_name_or_file(const std::string& arg) {
  const auto& names = builtin_model_names();
  if (std::find(names.begin(), names.end(), arg) != names.end())
    return builtin_model(arg);
  std::ifstream probe(arg);
  require(probe.good(), ErrorCode::UnknownName,
          "'" + arg + "' is neither a built-in model nor a readable file");
  return model_from_descriptor(read_file(arg));
}

std::shared_ptr<ProblemSpec> problem_from_json(const std::string& text) {
  json doc = parse_document(text, "problem document");
  try {
    check_keys(doc, {"t", "T", "x", "model", "dynamics", "terminal"},
               "problem document");
    auto problem = std::make_shared<ProblemSpec>();
    const json& model = doc.at("model");
    if (model.is_string()) {
      problem->model = model_from_name_or_file(model.get<std::string>());
    } else {
      problem->model = model_from_descriptor(model.dump());
    }
    problem->t = doc.value("t", 0.0);
    problem->T = doc.value("T", 1.0);
    problem->x = doc.at("x").get<std::vector<double>>();
    double theta = 1.0;
    if (doc.contains("dynamics")) {
      const json& dyn = doc.at("dynamics");
      check_keys(dyn, {"theta"}, "dynamics");
      theta = dyn.value("theta", 1.0);
    }
    require(problem->model.n == problem->model.m, ErrorCode::BadInput,
            "identity dynamics need matching state and control dimensions");
    problem->dynamics = Dynamics::make_identity(problem->model.n, theta);
    if (doc.contains("terminal")) {
      const json& term = doc.at("terminal");
      check_keys(term, {"kind", "target", "tol", "weight"}, "terminal");
      std::string kind = term.value("kind", std::string("none"));
      if (kind == "none") {
        // terminal cost stays identically zero
      } else if (kind == "endpoint") {
        auto target = term.at("target").get<std::vector<double>>();
        double tol = term.value("tol", 1e-6);
        require(static_cast<int>(target.size()) == problem->model.n,
                ErrorCode::BadInput, "endpoint target dimension mismatch");
        require(tol > 0.0, ErrorCode::BadInput, "endpoint tolerance must be positive");
        problem->terminal_hint = target;
        problem->terminal_cost = endpoint_terminal(std::move(target), tol);
      } else if (kind == "quadratic") {
        auto target = term.at("target").get<std::vector<double>>();
        double weight = term.value("weight", 1.0);
        require(static_cast<int>(target.size()) == problem->model.n,
                ErrorCode::BadInput, "quadratic target dimension mismatch");
        require(weight >= 0.0, ErrorCode::BadInput, "quadratic weight must be >= 0");
        problem->terminal_cost = [target, weight](StateView y) {
          double s = 0.0;
          for (size_t i = 0; i < target.size(); ++i) s += sqr(y[i] - target[i]);
          return weight * s;
        };
      } else {
        fail(ErrorCode::BadInput, "unknown terminal kind '" + kind + "'");
      }
    }
    problem->validate();
    return problem;
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("problem document: ") + e.what());
  }
}

MinimizeConfig minimize_config_from_json(const std::string& text) {
  json doc = parse_document(text, "minimize config");
  try {
    check_keys(doc,
               {"grid_ladder", "control_bound_ladder", "inner_iters",
                "restarts", "seed", "noise_tol", "gap_rel_tol"},
               "minimize config");
    MinimizeConfig cfg;
    if (doc.contains("grid_ladder"))
      cfg.grid_ladder = doc.at("grid_ladder").get<std::vector<int>>();
    if (doc.contains("control_bound_ladder"))
      cfg.control_bound_ladder =
          doc.at("control_bound_ladder").get<std::vector<double>>();
    cfg.inner_iters = doc.value("inner_iters", cfg.inner_iters);
    cfg.restarts = doc.value("restarts", cfg.restarts);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.noise_tol = doc.value("noise_tol", cfg.noise_tol);
    cfg.gap_rel_tol = doc.value("gap_rel_tol", cfg.gap_rel_tol);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("minimize config: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::BadInput, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::BadInput, "cannot write '" + path + "'");
  out << content;
  out.flush();
  require(out.good(), ErrorCode::BadInput, "short write to '" + path + "'");
}

std::string file_digest(const std::string& path) {
  return hex64(fnv1a64(read_file(path)));
}

}  // namespace bolza
