#pragma once

#include "bolza/minimize.hpp"

namespace bolza {

inline constexpr const char* kToolVersion = "1.0.0";

// All writers emit canonical JSON: keys sorted, no whitespace, doubles in
// %.17g, non-finite doubles as the strings "inf" / "-inf" / "nan". Identical
// inputs give byte-identical output.

// {max_abs_u, refinement_delta, samples, value}
// Flat object of named numbers; stable key order and float formatting.
std::string numbers_to_json(const std::map<std::string, double>& values);

std::string estimate_to_json(const SupInfEstimate& est);
std::string context_to_json(const BoundsContext& ctx);
std::string certificate_to_json(const GrowthCertificate& cert);
std::string reparam_certificate_to_json(const ReparamCertificate& cert);
std::string gap_report_to_json(const GapReport& report);
std::string manifest_to_json(const struct RunManifest& manifest);
std::string error_to_json(const Error& err);

// Keys grid (node times), states (per node), controls (per cell).
std::string pair_to_json(const AdmissiblePair& pair);
AdmissiblePair pair_from_json(const std::string& text,
                              std::shared_ptr<const ProblemSpec> problem);

// Plot-ready trajectory: columns s, y_1..y_n, u_1..u_m, and each cell control
// repeated at both cell endpoints.
std::string pair_to_csv(const AdmissiblePair& pair);
// Columns cells, bound, cost in lattice order.
std::string lattice_to_csv(const GapReport& report);

// Expression-based model descriptor:
//   {"expr": "...", "domain_expr": "...", "Q_expr": "...",
//    "structure": "both|radially_convex|partially_differentiable",
//    "condition_s": {"kappa": k, "A": a, "gamma_const": g, "eps_star": e},
//    "linear_growth": {"alpha": a, "d": d}, "n": 1, "m": 1, "name": "..."}
// expr is the running cost (variables s, y1..yn, u1..um); domain_expr, when
// present, marks the effective domain (nonzero = inside, value +inf outside);
// Q_expr optionally supplies the radial slope.
LagrangianModel model_from_descriptor(const std::string& text);
// Built-in name, else path to a descriptor file.
LagrangianModel model_from_name_or_file(const std::string& arg);

// Problem document:
//   {"t": 0, "T": 1, "x": [..], "model": <name | descriptor object>,
//    "dynamics": {"theta": 1},            # identity dynamics only
//    "terminal": {"kind": "none"}
//              | {"kind": "endpoint", "target": [..], "tol": 1e-6}
//              | {"kind": "quadratic", "target": [..], "weight": w}}
// The endpoint kind also sets terminal_hint so search treats it as hard.
std::shared_ptr<ProblemSpec> problem_from_json(const std::string& text);

// Optional keys grid_ladder, control_bound_ladder, inner_iters, restarts,
// seed, noise_tol, gap_rel_tol; anything missing keeps its default.
MinimizeConfig minimize_config_from_json(const std::string& text);

struct RunManifest {
  std::string command;  // verb plus normalized flag assignments
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, hash
  std::string tool_version = kToolVersion;
  std::vector<std::string> outputs;  // files written by the run
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
// FNV-1a content hash as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace bolza
