#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bolza {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

using StateView = std::span<const double>;
using ControlView = std::span<const double>;

// Error taxonomy shared across modules. Codes name the contract that was
// violated, not the call site.
enum class ErrorCode {
  BadInput,
  InvalidPair,
  PreconditionViolated,
  NoStructure,
  DomainEdge,
  UnknownName,
  EmptySampleSet,
  MuInfeasible,
  RhoSearchFailed,
  InsufficientRoom,
  SlopeNonpositive,
  ConeViolation,
  CostRegression,
  CertificateRequired,
  VariantInapplicable,
  NoAdmissiblePoint,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Neumaier-compensated accumulator; keeps long breakpoint sums exact enough
// that the time change hits its endpoint to ~1 ulp.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

inline double sqr(double x) { return x * x; }

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += sqr(a[i] - b[i]);
  return std::sqrt(s);
}

// Radical-inverse (van der Corput) value of `index` in the given base;
// index >= 1. Deterministic low-discrepancy driver for all samplers.
inline double halton(std::uint64_t index, std::uint32_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Streams Halton points in the closed ball of given radius (dimension =
// out.size(), first `dim` primes as bases) by rejection from the cube.
class BallSampler {
 public:
  BallSampler(int dim, double radius, std::uint64_t start_index = 1);
  void next(std::span<double> out);

 private:
  int dim_;
  double radius_;
  std::uint64_t index_;
};

// Streams unit direction vectors: alternating signs for dim 1, otherwise
// normalized Gaussians fed by Halton points (Box-Muller).
class SphereSampler {
 public:
  SphereSampler(int dim, std::uint64_t start_index = 1);
  void next(std::span<double> out);

 private:
  int dim_;
  std::uint64_t index_;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// Number of worker threads: BOLZA_THREADS if set (>=1), else hardware
// concurrency, else 1.
int thread_budget();

// Runs fn(0..n-1) across the thread budget with deterministic chunking.
// Callers must keep reductions order-independent (min/max/argbest).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace bolza
