#pragma once

#include <functional>

#include "bolza/common.hpp"

namespace bolza {

struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 30;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       // accumulated Kronrod error estimate
  bool hit_infinite = false;  // an integrand sample was +inf (or nan)
};

// Adaptive Gauss-Kronrod 7/15 on [a, b]. Extended-valued integrands are
// handled by short-circuit: any non-finite sample makes the result +inf.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadConfig& cfg = {});

}  // namespace bolza
