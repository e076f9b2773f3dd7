#pragma once

#include <vector>

#include "bolza/common.hpp"

namespace bolza {

// Half-open interval [a, b), a < b.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

// Finite union of disjoint, sorted half-open intervals. Level sets of
// piecewise-constant controls are exact unions of grid cells, so all set
// algebra here is exact up to floating-point endpoint arithmetic.
class IntervalSet {
 public:
  IntervalSet() = default;
  static IntervalSet single(double a, double b);

  // Unions [a,b) into the set, merging adjacent/overlapping parts.
  void add(double a, double b);

  double measure() const;
  bool empty() const { return parts_.empty(); }
  bool contains(double x) const;

  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet unite(const IntervalSet& other) const;
  // Complement within [lo, hi).
  IntervalSet complement_within(double lo, double hi) const;
  IntervalSet subtract(const IntervalSet& other, double lo, double hi) const;

  // Smallest-sweep subset of the given measure: walk parts left to right,
  // take whole parts until the target is reached, split the last one.
  // Throws InsufficientRoom when target exceeds the available measure.
  IntervalSet leftmost_fill(double target) const;

  const std::vector<Interval>& parts() const { return parts_; }

 private:
  std::vector<Interval> parts_;
};

}  // namespace bolza
