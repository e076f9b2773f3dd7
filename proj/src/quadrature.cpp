#include "bolza/quadrature.hpp"

#include <cmath>

namespace bolza {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (symmetric half listed).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double kronrod = 0.0;
  double err = 0.0;
  bool infinite = false;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  Panel p;
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double gauss = 0.0, kron = 0.0;
  for (int i = 0; i < 15; ++i) {
    if (!std::isfinite(fv[i])) {
      p.infinite = true;
      return p;
    }
    kron += kWgk[i < 8 ? i : 14 - i] * fv[i];
  }
  for (int i = 0; i < 4; ++i) {
    // Gauss nodes sit at Kronrod indices 1,3,5,7 (and mirrors).
    int j = 2 * i + 1;
    gauss += kWg[i] * (j == 7 ? fv[7] : fv[j] + fv[14 - j]);
  }
  kron *= h;
  gauss *= h;
  double diff = std::abs(kron - gauss);
  double scaled = std::pow(200.0 * diff, 1.5);
  p.kronrod = kron;
  p.err = (scaled < diff) ? scaled : diff;
  return p;
}

void refine(const std::function<double(double)>& f, double a, double b,
            double tol, int depth, const QuadConfig& cfg, KahanSum& value,
            KahanSum& err, bool& infinite) {
  if (infinite) return;
  Panel p = eval_panel(f, a, b);
  if (p.infinite) {
    infinite = true;
    return;
  }
  if (p.err <= tol || depth >= cfg.max_depth) {
    value.add(p.kronrod);
    err.add(p.err);
    return;
  }
  double mid = 0.5 * (a + b);
  refine(f, a, mid, 0.5 * tol, depth + 1, cfg, value, err, infinite);
  refine(f, mid, b, 0.5 * tol, depth + 1, cfg, value, err, infinite);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadConfig& cfg) {
  QuadResult out;
  if (a == b) return out;
  require(a < b, ErrorCode::BadInput, "integration bounds");
  Panel first = eval_panel(f, a, b);
  if (first.infinite) {
    out.value = kInf;
    out.hit_infinite = true;
    return out;
  }
  double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(first.kronrod));
  KahanSum value, err;
  bool infinite = false;
  refine(f, a, b, tol, 0, cfg, value, err, infinite);
  if (infinite) {
    out.value = kInf;
    out.hit_infinite = true;
    return out;
  }
  out.value = value.value();
  out.error = err.value();
  return out;
}

}  // namespace bolza
