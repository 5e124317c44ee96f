#ifndef SIGCHANGE_FINITE_DIFFERENCE_HPP
#define SIGCHANGE_FINITE_DIFFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigchange/errors.hpp"
#include "sigchange/types.hpp"

namespace sigchange {

/// Step that balances truncation and rounding for a first central difference.
inline double optimal_central_step(double x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(x));
}

namespace detail {

inline void check_step(double x, double h) {
  // x + h must be representable as a different number, or the quotient is garbage.
  if (!(h > 0.0) || x + h == x || x - h == x) {
    throw NumericalError("finite-difference step underflow");
  }
}

}  // namespace detail

/// Jacobian of a vector map by second-order central differences, column by column.
/// `step(x_k)` gives the step for coordinate k.
template <class F, class Step>
Matrix central_jacobian(F&& f, const Vector& x, Step&& step) {
  const int n = static_cast<int>(x.size());
  Matrix jac;
  for (int k = 0; k < n; ++k) {
    const double h = step(x(k));
    detail::check_step(x(k), h);
    Vector xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    const double width = xp(k) - xm(k);
    Vector col = (f(xp) - f(xm)) / width;
    if (k == 0) jac.resize(col.size(), n);
    jac.col(k) = col;
  }
  return jac;
}

/// Fourth-order central stencil (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h.
template <class F, class Step>
Matrix central_jacobian4(F&& f, const Vector& x, Step&& step) {
  const int n = static_cast<int>(x.size());
  Matrix jac;
  for (int k = 0; k < n; ++k) {
    const double h = step(x(k));
    detail::check_step(x(k), 2.0 * h);
    auto shifted = [&](double d) {
      Vector xs = x;
      xs(k) += d;
      return Vector(f(xs));
    };
    Vector col = (-shifted(2 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) + shifted(-2 * h)) / (12.0 * h);
    if (k == 0) jac.resize(col.size(), n);
    jac.col(k) = col;
  }
  return jac;
}

/// Scalar central derivative with step h.
template <class F>
double central_derivative(F&& f, double x, double h) {
  detail::check_step(x, h);
  const double xp = x + h, xm = x - h;
  return (f(xp) - f(xm)) / (xp - xm);
}

}  // namespace sigchange

#endif  // SIGCHANGE_FINITE_DIFFERENCE_HPP
