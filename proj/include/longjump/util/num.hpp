#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace longjump {

// Round-to-integer guard: pow() results that land within a hair of an
// integer are snapped to it before floor-style uses, so exact-power inputs
// (R = 2^k with rational exponents) do not lose a unit to roundoff.
inline double snap_near_integer(double x, double tol = 1e-9) {
  double r = std::nearbyint(x);
  if (std::abs(x - r) <= tol * std::max(1.0, std::abs(r))) return r;
  return x;
}

inline std::int64_t floor_snapped(double x) {
  return static_cast<std::int64_t>(std::floor(snap_near_integer(x)));
}

// Monotone bisection inverse: least t in [0, hi] with f(t) >= y, refined to
// relative tolerance.  f must be nondecreasing and continuous.
inline double monotone_inverse(const std::function<double(double)>& f, double y,
                               double rel_tol = 1e-12) {
  if (y <= 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (f(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("monotone_inverse: no bracket");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < y)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= rel_tol * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Adaptive Simpson quadrature with a recursion-depth cap.
namespace detail {
inline double simpson_slice(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double fa, double b, double fb,
                                   double m, double fm, double whole,
                                   double eps, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_slice(f, a, fa, m, fm, lm, flm);
  double right = simpson_slice(f, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps, int max_depth = 40) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = detail::simpson_slice(f, a, fa, b, fb, m, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, eps, max_depth);
}

// Integral over [a, infinity) of a decaying integrand, split into geometric
// segments [a, 2a], [2a, 4a], ... until a segment contributes less than
// rel_tol of the running total.
inline double improper_integral_geometric(const std::function<double(double)>& f,
                                          double a, double rel_tol = 1e-10) {
  double total = 0.0;
  double lo = a;
  for (int seg = 0; seg < 200; ++seg) {
    double hi = lo * 2.0;
    double piece = adaptive_simpson(f, lo, hi, rel_tol * std::max(total, 1e-300));
    total += piece;
    if (seg > 2 && std::abs(piece) <= rel_tol * std::abs(total)) break;
    lo = hi;
  }
  return total;
}

// Exact binomial coefficients in unsigned __int128 (n up to ~2^20, k <= 8
// stays well inside the 128-bit range).
inline unsigned __int128 binom_u128(std::uint64_t n, unsigned k) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r = r * (n - k + i);
    r = r / i;  // product of i consecutive integers is divisible by i!
  }
  return r;
}

}  // namespace longjump
