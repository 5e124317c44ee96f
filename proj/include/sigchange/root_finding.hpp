#ifndef SIGCHANGE_ROOT_FINDING_HPP
#define SIGCHANGE_ROOT_FINDING_HPP

#include <cmath>
#include <limits>
#include <string>

#include "sigchange/errors.hpp"

namespace sigchange {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign.
///
/// Secant (regula falsi, Illinois-weighted) steps inside the bracket, with a
/// bisection step whenever two consecutive steps fail to halve the bracket.
/// Stops when the bracket is narrower than rel_tol * max(|x|, tiny) or f hits zero.
template <class F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi,
                               double rel_tol, int max_iterations) {
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(f_lo, f_hi);
  }
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw PreconditionError("find_root_bracketed: f(lo) and f(hi) have the same sign");
  }
  const double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  int retained = 0;  // +1: a kept on the last step, -1: b kept
  double width_before = b - a;
  int slow_steps = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    double x;
    if (slow_steps >= 2) {
      x = 0.5 * (a + b);
      slow_steps = 0;
    } else {
      x = (a * fb - b * fa) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    }
    const double fx = f(x);
    if (fx == 0.0) return {x, 0.0, it};
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
      if (retained == -1) fb *= 0.5;
      retained = -1;
    } else {
      b = x;
      fb = fx;
      if (retained == +1) fa *= 0.5;
      retained = +1;
    }
    const double width = b - a;
    slow_steps = (width > 0.5 * width_before) ? slow_steps + 1 : 0;
    if (slow_steps == 0) width_before = width;
    const double scale = std::max(std::abs(a), std::abs(b));
    if (width <= rel_tol * scale + 4.0 * eps * scale ||
        width <= std::numeric_limits<double>::min()) {
      // Return the endpoint with the smaller true residual.
      const double fa_true = f(a), fb_true = f(b);
      return std::abs(fa_true) <= std::abs(fb_true) ? RootResult{a, fa_true, it}
                                                     : RootResult{b, fb_true, it};
    }
  }
  throw ConvergenceError("find_root_bracketed: no convergence after " +
                         std::to_string(max_iterations) + " iterations");
}

}  // namespace sigchange

#endif  // SIGCHANGE_ROOT_FINDING_HPP
