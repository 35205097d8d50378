#pragma once

#include <cmath>
#include <functional>

namespace imcf::quad {

namespace detail {

template <class F>
double adaptive_simpson_step(const F& f, double a, double b, double fa, double fm,
                             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson rule on [a, b]. `rel_tol` is relative to a coarse
/// estimate of the integral magnitude; `abs_floor` guards near-zero integrals.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-12,
                        double abs_floor = 1e-300, int max_depth = 40) {
  if (b == a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::abs(b - a) * (std::abs(fa) + std::abs(fm) + std::abs(fb)) / 3.0;
  const double tol = std::max(rel_tol * scale, abs_floor);
  return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Bisection for the root of a monotone function on [lo, hi] with
/// g(lo) and g(hi) of opposite (or zero) sign. Returns the bracket point
/// where the sign change happens to full double resolution.
template <class G>
double bisect(const G& g, double lo, double hi, int max_iter = 200) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace imcf::quad
