#include "bolza/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace bolza {

IntervalSet IntervalSet::single(double a, double b) {
  IntervalSet s;
  s.add(a, b);
  return s;
}

void IntervalSet::add(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b, ErrorCode::BadInput,
          "interval endpoints");
  if (a == b) return;
  std::vector<Interval> merged;
  merged.reserve(parts_.size() + 1);
  size_t i = 0;
  while (i < parts_.size() && parts_[i].b < a) merged.push_back(parts_[i++]);
  double lo = a, hi = b;
  while (i < parts_.size() && parts_[i].a <= hi) {
    lo = std::min(lo, parts_[i].a);
    hi = std::max(hi, parts_[i].b);
    ++i;
  }
  merged.push_back({lo, hi});
  while (i < parts_.size()) merged.push_back(parts_[i++]);
  parts_ = std::move(merged);
}

double IntervalSet::measure() const {
  KahanSum s;
  for (const auto& p : parts_) s.add(p.b - p.a);
  return s.value();
}

bool IntervalSet::contains(double x) const {
  for (const auto& p : parts_) {
    if (x < p.a) return false;
    if (x < p.b) return true;
  }
  return false;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  IntervalSet out;
  size_t i = 0, j = 0;
  while (i < parts_.size() && j < other.parts_.size()) {
    double lo = std::max(parts_[i].a, other.parts_[j].a);
    double hi = std::min(parts_[i].b, other.parts_[j].b);
    if (lo < hi) out.parts_.push_back({lo, hi});
    if (parts_[i].b < other.parts_[j].b) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  IntervalSet out = *this;
  for (const auto& p : other.parts_) out.add(p.a, p.b);
  return out;
}

IntervalSet IntervalSet::complement_within(double lo, double hi) const {
  IntervalSet out;
  double cursor = lo;
  for (const auto& p : parts_) {
    if (p.b <= lo) continue;
    if (p.a >= hi) break;
    double a = std::max(p.a, lo);
    double b = std::min(p.b, hi);
    if (cursor < a) out.parts_.push_back({cursor, a});
    cursor = std::max(cursor, b);
  }
  if (cursor < hi) out.parts_.push_back({cursor, hi});
  return out;
}

IntervalSet IntervalSet::subtract(const IntervalSet& other, double lo,
                                  double hi) const {
  return intersect(other.complement_within(lo, hi));
}

IntervalSet IntervalSet::leftmost_fill(double target) const {
  require(target >= 0.0, ErrorCode::BadInput, "fill target");
  IntervalSet out;
  if (target == 0.0) return out;
  double total = measure();
  // Tiny relative slack: the target is itself a rounded quotient.
  require(target <= total * (1.0 + 1e-12) + 1e-300, ErrorCode::InsufficientRoom,
          "fill target exceeds available measure");
  KahanSum acc;
  for (const auto& p : parts_) {
    double room = p.b - p.a;
    double want = target - acc.value();
    if (want <= room) {
      out.parts_.push_back({p.a, p.a + want});
      return out;
    }
    out.parts_.push_back(p);
    acc.add(room);
  }
  return out;  // target == total up to rounding
}

}  // namespace bolza
