#pragma once

// Scalar root bracketing and unimodal maximisation used by the solvers.

#include <cmath>
#include <concepts>
#include <type_traits>

namespace infoq {

template <class F>
concept ScalarFunction = std::regular_invocable<F, double> &&
                         std::convertible_to<std::invoke_result_t<F, double>, double>;

struct ScalarPoint {
  double x = 0.0;
  double value = 0.0;
};

/// Locates a sign change of f on [lo, hi] where f(lo) > 0 >= f(hi).
///
/// Halves until the bracket collapses to adjacent doubles. The predicate
/// `f(mid) > 0` keeps the right end on the first non-positive point, so when
/// f vanishes on a whole interval the leftmost zero is returned.
template <ScalarFunction F>
[[nodiscard]] ScalarPoint bisect_decreasing(F&& f, double lo, double hi, int max_iterations = 200) {
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  return std::abs(f_lo) < std::abs(f_hi) ? ScalarPoint{lo, f_lo} : ScalarPoint{hi, f_hi};
}

/// Golden-section search for the maximum of a unimodal f on [a, b].
/// Stops once the bracket is narrower than tol.
template <ScalarFunction F>
[[nodiscard]] ScalarPoint golden_section_maximize(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // The interior probes are not guaranteed to beat the bracket ends when the
  // maximum sits on a boundary.
  ScalarPoint best = fc >= fd ? ScalarPoint{c, fc} : ScalarPoint{d, fd};
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx > best.value) {
      best = {x, fx};
    }
  }
  return best;
}

}  // namespace infoq
