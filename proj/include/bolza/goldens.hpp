#pragma once

#include "bolza/growth.hpp"

namespace bolza {

// One sampled-versus-closed-form comparison. Divergence rows have no finite
// reference: they pass when the sampled value is at most `expected`.
struct GoldenRow {
  std::string model;
  std::string quantity;  // "Xi" (tail sup) or "Upsilon" (core inf)
  double arg = 0.0;      // nu for Xi rows, c for Upsilon rows
  double rho = 0.0;      // distance filter for Upsilon rows
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool divergence = false;
  bool pass = false;
};

struct GoldenReport {
  std::vector<GoldenRow> rows;
  bool all_pass = false;
};

// Compares the sampled tail sups and core infs of every built-in model
// against its closed forms on a fixed probe set (horizon 1, state radius 2),
// plus the divergence probes whose reference is a crossing threshold.
GoldenReport run_goldens(const SamplerConfig& cfg = {});

// Fixed-width pass/fail table with a summary line.
std::string goldens_table(const GoldenReport& report);

}  // namespace bolza
