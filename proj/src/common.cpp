#include "bolza/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace bolza {

namespace {

constexpr std::uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::InvalidPair: return "InvalidPair";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoStructure: return "NoStructure";
    case ErrorCode::DomainEdge: return "DomainEdge";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::MuInfeasible: return "MuInfeasible";
    case ErrorCode::RhoSearchFailed: return "RhoSearchFailed";
    case ErrorCode::InsufficientRoom: return "InsufficientRoom";
    case ErrorCode::SlopeNonpositive: return "SlopeNonpositive";
    case ErrorCode::ConeViolation: return "ConeViolation";
    case ErrorCode::CostRegression: return "CostRegression";
    case ErrorCode::CertificateRequired: return "CertificateRequired";
    case ErrorCode::VariantInapplicable: return "VariantInapplicable";
    case ErrorCode::NoAdmissiblePoint: return "NoAdmissiblePoint";
  }
  return "UnknownError";
}

BallSampler::BallSampler(int dim, double radius, std::uint64_t start_index)
    : dim_(dim), radius_(radius), index_(start_index) {
  require(dim >= 1 && dim <= 10, ErrorCode::BadInput, "ball dimension");
  require(radius >= 0.0, ErrorCode::BadInput, "ball radius");
}

void BallSampler::next(std::span<double> out) {
  if (radius_ == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    ++index_;
    return;
  }
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      out[i] = radius_ * (2.0 * halton(index_, kPrimes[i]) - 1.0);
      r2 += out[i] * out[i];
    }
    ++index_;
    if (r2 <= radius_ * radius_) return;
  }
}

SphereSampler::SphereSampler(int dim, std::uint64_t start_index)
    : dim_(dim), index_(start_index) {
  require(dim >= 1 && dim <= 10, ErrorCode::BadInput, "sphere dimension");
}

void SphereSampler::next(std::span<double> out) {
  if (dim_ == 1) {
    out[0] = (index_ % 2 == 1) ? 1.0 : -1.0;
    ++index_;
    return;
  }
  while (true) {
    // Box-Muller on Halton pairs; one extra Gaussian is discarded for odd dim.
    double g[10];
    int pairs = (dim_ + 1) / 2;
    for (int p = 0; p < pairs; ++p) {
      double u1 = std::max(halton(index_, kPrimes[2 * p]), 1e-16);
      double u2 = halton(index_, kPrimes[2 * p + 1]);
      double rad = std::sqrt(-2.0 * std::log(u1));
      g[2 * p] = rad * std::cos(2.0 * M_PI * u2);
      if (2 * p + 1 < dim_) g[2 * p + 1] = rad * std::sin(2.0 * M_PI * u2);
    }
    ++index_;
    double nrm = norm2(std::span<const double>(g, static_cast<size_t>(dim_)));
    if (nrm > 1e-12) {
      for (int i = 0; i < dim_; ++i) out[i] = g[i] / nrm;
      return;
    }
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[value & 0xF];
    value >>= 4;
  }
  return s;
}

int thread_budget() {
  if (const char* env = std::getenv("BOLZA_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc >= 1 ? static_cast<int>(hc) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace bolza
