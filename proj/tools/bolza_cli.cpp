// Command-line front end: wires problem documents and models into the
// constants / growth / reparametrization / minimization engines and emits
// machine-readable reports (JSON to stdout, CSV lattices to files).
//
// Exit codes: 0 success, 1 domain error (JSON body on stderr), 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bolza/goldens.hpp"
#include "bolza/growth.hpp"
#include "bolza/json_io.hpp"
#include "bolza/minimize.hpp"
#include "bolza/reparam.hpp"

namespace {

using namespace bolza;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_out(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty() && dir != ".") std::filesystem::create_directories(dir);
}

int run_constants(double B, double alpha, double d, double T, double t,
                  double kappa, double A, double gamma_const, double theta,
                  double x_norm, double delta_star) {
  ConditionSData s_data;
  s_data.kappa = kappa;
  s_data.A = A;
  s_data.gamma = PiecewiseConstantFn::constant(gamma_const);
  double c = compute_c_t_B(B, alpha, d, T, t);
  double phi = compute_phi_B(B, alpha, d, T, s_data);
  double R = (B + d * T) / alpha;
  double K = gronwall_state_bound(theta, T, R, x_norm, delta_star);
  std::cout << numbers_to_json(
                   {{"K", K}, {"Phi_B", phi}, {"R", R}, {"c_t_B", c}})
            << "\n";
  return 0;
}

int run_check_growth(const std::string& model_arg, const std::string& condition,
                     double B, double delta, double T, double theta,
                     double eta) {
  LagrangianModel model = model_from_name_or_file(model_arg);
  require(model.n == model.m, ErrorCode::BadInput,
          "check-growth: identity dynamics need n == m");
  ProblemSpec spec;
  spec.t = delta;
  spec.T = T;
  spec.x.assign(static_cast<size_t>(model.n), 0.0);
  spec.model = model;
  spec.dynamics = Dynamics::make_identity(model.n, theta);
  BoundsContext ctx = make_bounds_context(spec, delta, 0.0, spec.x, B, eta);

  GrowthCertificate cert;
  if (condition == "G") {
    cert = check_G(model, ctx);
  } else if (condition == "H") {
    cert = check_H(model, ctx);
  } else if (condition == "M") {
    cert = check_M(model, ctx);
  } else {
    cert = check_superlinearity(model, ctx);
  }
  std::cout << certificate_to_json(cert) << "\n";
  return 0;
}

int run_reparam(const std::string& problem_path, const std::string& pair_path,
                double eta, const std::string& out_dir) {
  auto problem = problem_from_json(read_file(problem_path));
  AdmissiblePair pair = pair_from_json(read_file(pair_path), problem);

  // The family is pinned to this single input: B is its cost, the start-time
  // and start-point windows are degenerate at (t, x).
  double B = evaluate_cost(pair);
  require(std::isfinite(B), ErrorCode::PreconditionViolated,
          "reparam: the input pair has infinite cost");
  BoundsContext ctx =
      make_bounds_context(*problem, problem->t, 0.0, problem->x, B, eta);

  GrowthCertificate cert = check_H(problem->model, ctx);
  if (cert.verdict != Verdict::Holds && eta > 0.0) {
    cert = check_M(problem->model, ctx);
  }
  NicePairResult res = nice_pair(pair, ctx, cert, eta);

  ensure_dir(out_dir);
  std::string pair_file = join_out(out_dir, "pair_out.json");
  std::string cert_file = join_out(out_dir, "certificate.json");
  write_file(pair_file, pair_to_json(res.pair) + "\n");
  write_file(cert_file, reparam_certificate_to_json(res.certificate) + "\n");

  RunManifest man;
  man.command = "reparam --problem " + problem_path + " --pair " + pair_path +
                " --eta " + fmt(eta) + " --out-dir " + out_dir;
  man.input_digests = {{problem_path, file_digest(problem_path)},
                       {pair_path, file_digest(pair_path)}};
  man.outputs = {pair_file, cert_file};
  std::cout << manifest_to_json(man) << "\n";
  return 0;
}

int run_minimize(const std::string& problem_path, const std::string& config_path,
                 std::optional<int> cells, std::optional<double> bound,
                 const std::string& out_dir) {
  auto problem = problem_from_json(read_file(problem_path));
  MinimizeConfig cfg;
  if (!config_path.empty()) cfg = minimize_config_from_json(read_file(config_path));

  std::vector<int> grids = cells ? std::vector<int>{*cells} : cfg.grid_ladder;
  double bnd = bound ? *bound : cfg.control_bound_ladder.back();

  GapReport costs;
  std::optional<AdmissiblePair> best;
  for (int g : grids) {
    const ControlSignal* warm = best ? &best->u : nullptr;
    AdmissiblePair p = minimize_direct(problem, g, bnd, cfg, warm);
    costs.lattice.push_back({g, bnd, evaluate_cost_detail(p, cfg.quad).total});
    best = std::move(p);
  }

  ensure_dir(out_dir);
  std::string pair_file = join_out(out_dir, "pair_out.json");
  std::string csv_file = join_out(out_dir, "pair_out.csv");
  std::string costs_file = join_out(out_dir, "costs.csv");
  write_file(pair_file, pair_to_json(*best) + "\n");
  write_file(csv_file, pair_to_csv(*best));
  write_file(costs_file, lattice_to_csv(costs));

  RunManifest man;
  man.command = "minimize --problem " + problem_path;
  man.input_digests = {{problem_path, file_digest(problem_path)}};
  if (!config_path.empty()) {
    man.command += " --config " + config_path;
    man.input_digests.push_back({config_path, file_digest(config_path)});
  }
  if (cells) man.command += " --cells " + std::to_string(*cells);
  man.command += " --bound " + fmt(bnd) + " --out-dir " + out_dir;
  man.outputs = {pair_file, csv_file, costs_file};
  std::cout << manifest_to_json(man) << "\n";
  return 0;
}

int run_lavrentiev(const std::string& problem_path,
                   const std::string& config_path, const std::string& out_dir) {
  auto problem = problem_from_json(read_file(problem_path));
  MinimizeConfig cfg;
  if (!config_path.empty()) cfg = minimize_config_from_json(read_file(config_path));

  GapReport report = lavrentiev_probe(problem, cfg);

  ensure_dir(out_dir);
  std::string lattice_file = join_out(out_dir, "lattice.csv");
  std::string report_file = join_out(out_dir, "gap_report.json");
  write_file(lattice_file, lattice_to_csv(report));
  write_file(report_file, gap_report_to_json(report) + "\n");

  RunManifest man;
  man.command = "lavrentiev --problem " + problem_path;
  man.input_digests = {{problem_path, file_digest(problem_path)}};
  if (!config_path.empty()) {
    man.command += " --config " + config_path;
    man.input_digests.push_back({config_path, file_digest(config_path)});
  }
  man.command += " --out-dir " + out_dir;
  man.outputs = {lattice_file, report_file};
  std::cout << manifest_to_json(man) << "\n";
  return 0;
}

int run_goldens_verb() {
  GoldenReport report = run_goldens();
  std::cout << goldens_table(report);
  if (!report.all_pass) {
    std::cerr << error_to_json(Error(ErrorCode::PreconditionViolated,
                                     "golden-value suite failed"))
              << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constructive reparametrization toolkit for controlled-linear Bolza "
      "problems"};
  app.require_subcommand(1);
  int rc = 0;

  // constants
  double cB = 1.0, calpha = 1.0, cd = 0.0, cT = 1.0, ct = 0.0;
  double ckappa = 0.0, cA = 0.0, cgamma = 0.0, ctheta = 1.0;
  double cxnorm = 0.0, cdstar = 0.0;
  auto* consts = app.add_subcommand(
      "constants", "Print the family-level constants for a cost bound B");
  consts->add_option("--B", cB, "Cost bound")->required();
  consts->add_option("--alpha", calpha, "Linear growth slope (> 0)")->required();
  consts->add_option("--d", cd, "Linear growth offset");
  consts->add_option("--T", cT, "Horizon")->required();
  consts->add_option("--t", ct, "Start time");
  consts->add_option("--kappa", ckappa, "Time-regularity rate on the cost");
  consts->add_option("--A", cA, "Time-regularity rate on |u|");
  consts->add_option("--gamma_const", cgamma, "Constant part of the rate");
  consts->add_option("--theta", ctheta, "Dynamics bound |b| <= theta(1+|y|)");
  consts->add_option("--x_norm", cxnorm, "Norm of the start point");
  consts->add_option("--delta_star", cdstar, "Start-point window radius");
  consts->callback([&] {
    rc = run_constants(cB, calpha, cd, cT, ct, ckappa, cA, cgamma, ctheta,
                       cxnorm, cdstar);
  });

  // check-growth
  std::string gmodel, gcondition;
  double gB = 1.0, gdelta = 0.0, gT = 1.0, gtheta = 1.0, geta = 0.0;
  auto* growth = app.add_subcommand(
      "check-growth", "Sample a growth condition and print the certificate");
  growth->add_option("--model", gmodel, "Built-in model name or descriptor file")
      ->required();
  growth->add_option("--condition", gcondition, "One of super, G, H, M")
      ->required()
      ->check(CLI::IsMember({"super", "G", "H", "M"}));
  growth->add_option("--B", gB, "Cost bound");
  growth->add_option("--delta", gdelta, "Start-time window edge");
  growth->add_option("--T", gT, "Horizon");
  growth->add_option("--theta", gtheta, "Dynamics bound");
  growth->add_option("--eta", geta, "Admissible cost increase");
  growth->callback([&] {
    rc = run_check_growth(gmodel, gcondition, gB, gdelta, gT, gtheta, geta);
  });

  // reparam
  std::string rproblem, rpair, rout = ".";
  double reta = 0.0;
  auto* rep = app.add_subcommand(
      "reparam", "Reparametrize an admissible pair to a bounded-speed one");
  rep->add_option("--problem", rproblem, "Problem document (JSON)")->required();
  rep->add_option("--pair", rpair, "Admissible pair (JSON)")->required();
  rep->add_option("--eta", reta, "Admissible cost increase (finiteness mode)");
  rep->add_option("--out-dir", rout, "Output directory");
  rep->callback([&] { rc = run_reparam(rproblem, rpair, reta, rout); });

  // minimize
  std::string mproblem, mconfig, mout = ".";
  std::optional<int> mcells;
  std::optional<double> mbound;
  auto* mini = app.add_subcommand(
      "minimize", "Direct cost minimization over piecewise-constant controls");
  mini->add_option("--problem", mproblem, "Problem document (JSON)")->required();
  mini->add_option("--config", mconfig, "Minimizer configuration (JSON)");
  mini->add_option("--cells", mcells, "Single grid size instead of the ladder");
  mini->add_option("--bound", mbound, "Control bound (default: ladder top)");
  mini->add_option("--out-dir", mout, "Output directory");
  mini->callback([&] { rc = run_minimize(mproblem, mconfig, mcells, mbound, mout); });

  // lavrentiev
  std::string lproblem, lconfig, lout = ".";
  auto* lav = app.add_subcommand(
      "lavrentiev", "Grid/bound lattice probe for a cost gap");
  lav->add_option("--problem", lproblem, "Problem document (JSON)")->required();
  lav->add_option("--config", lconfig, "Minimizer configuration (JSON)");
  lav->add_option("--out-dir", lout, "Output directory");
  lav->callback([&] { rc = run_lavrentiev(lproblem, lconfig, lout); });

  // goldens
  auto* gold = app.add_subcommand(
      "goldens", "Run the golden-value suite and print a pass/fail table");
  gold->callback([&] { rc = run_goldens_verb(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return 2;
  } catch (const Error& err) {
    std::cerr << error_to_json(err) << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << error_to_json(Error(ErrorCode::BadInput, ex.what())) << "\n";
    return 1;
  }
  return rc;
}
