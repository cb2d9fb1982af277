#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "mechkit/rational.hpp"

namespace mechkit {

// Rigorous enclosure of a real value. When `exact` is set the enclosed value
// is known analytically and `value` carries it as a rational; lower == upper
// then holds (both are the nearest double). Otherwise [lower, upper] is an
// outward-rounded bracket.
struct IntervalBound {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  std::optional<Rational> value;  // set iff exact

  static IntervalBound from_exact(const Rational& v) {
    IntervalBound b;
    b.lower = b.upper = v.to_double();
    b.exact = true;
    b.value = v;
    return b;
  }
  static IntervalBound from_bounds(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("interval: lower > upper");
    IntervalBound b;
    b.lower = lo;
    b.upper = hi;
    return b;
  }

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }

  // Outward-padded bounds; for exact values the nearest double may sit on
  // either side of the true rational, so pad one ulp both ways.
  double safe_lower() const { return exact ? std::nextafter(lower, -INFINITY) : lower; }
  double safe_upper() const { return exact ? std::nextafter(upper, INFINITY) : upper; }

  friend IntervalBound operator+(const IntervalBound& a, const IntervalBound& b) {
    if (a.exact && b.exact) return from_exact(*a.value + *b.value);
    return from_bounds(std::nextafter(a.safe_lower() + b.safe_lower(), -INFINITY),
                       std::nextafter(a.safe_upper() + b.safe_upper(), INFINITY));
  }
  friend IntervalBound operator-(const IntervalBound& a, const IntervalBound& b) {
    if (a.exact && b.exact) return from_exact(*a.value - *b.value);
    return from_bounds(std::nextafter(a.safe_lower() - b.safe_upper(), -INFINITY),
                       std::nextafter(a.safe_upper() - b.safe_lower(), INFINITY));
  }
  // scale by an exact rational
  friend IntervalBound operator*(const Rational& s, const IntervalBound& a) {
    if (a.exact) return from_exact(s * *a.value);
    double sd = s.to_double();
    double lo = sd * a.safe_lower(), hi = sd * a.safe_upper();
    if (lo > hi) std::swap(lo, hi);
    return from_bounds(std::nextafter(std::nextafter(lo, -INFINITY), -INFINITY),
                       std::nextafter(std::nextafter(hi, INFINITY), INFINITY));
  }

  bool contains(double x) const { return lower <= x && x <= upper; }
  bool contains(const IntervalBound& other) const {
    return lower <= other.lower && other.upper <= upper;
  }
};

}  // namespace mechkit
