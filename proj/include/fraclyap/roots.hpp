#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>

#include "errors.hpp"

namespace fraclyap {

struct BisectionResult {
  double root;
  double f_root;
  double width; // final bracket width
  std::size_t iterations;
};

/// Bisection on [lo, hi]. Requires a sign change of `fn` across the bracket;
/// stops when the bracket is no wider than `xtol` (or cannot shrink further
/// in floating point).
template <class Fn>
BisectionResult bisect(const Fn& fn, double lo, double hi, double xtol,
                       std::size_t max_iter = 400) {
  if (!(lo < hi)) {
    throw ArgumentError("bisect: empty bracket");
  }
  double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (f_lo == 0.0) {
    return {lo, 0.0, 0.0, 0};
  }
  if (f_hi == 0.0) {
    return {hi, 0.0, 0.0, 0};
  }
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    std::ostringstream msg;
    msg << "bisect: no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo
        << ", f(hi)=" << f_hi;
    throw BracketError(msg.str(), f_lo, f_hi);
  }

  std::size_t it = 0;
  while (hi - lo > xtol && it < max_iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double f_mid = fn(mid);
    ++it;
    if (f_mid == 0.0) {
      return {mid, 0.0, 0.0, it};
    }
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double root = lo + 0.5 * (hi - lo);
  return {root, fn(root), hi - lo, it};
}

struct ExtremumResult {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class Fn>
ExtremumResult golden_section_maximize(const Fn& fn, double lo, double hi,
                                       double xtol, std::size_t max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (std::size_t it = 0; it < max_iter && hi - lo > xtol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    }
  }
  return f1 > f2 ? ExtremumResult{x1, f1} : ExtremumResult{x2, f2};
}

} // namespace fraclyap
