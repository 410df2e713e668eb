#pragma once

#include <cmath>
#include <stdexcept>

namespace ebthresh {

// Bisection for a nondecreasing f: smallest-interval point with f(x) = target.
// All estimation targets here are monotone by construction, so a failure to
// bracket is a programming error and throws.
template <class F>
double bisect_increasing(F f, double lo, double hi, double target, double xtol,
                         int max_iter = 200) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0.0 || fhi < 0.0)
    throw std::logic_error("bisect_increasing: target not bracketed");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) - target < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Expands [lo, hi] upward by doubling until f(hi) >= target (f nondecreasing).
template <class F>
double expand_upper_bracket(F f, double hi, double target, double hi_max) {
  while (f(hi) < target) {
    hi *= 2.0;
    if (hi > hi_max)
      throw std::logic_error("expand_upper_bracket: no bracket below limit");
  }
  return hi;
}

}  // namespace ebthresh
