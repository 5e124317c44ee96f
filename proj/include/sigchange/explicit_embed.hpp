#ifndef SIGCHANGE_EXPLICIT_EMBED_HPP
#define SIGCHANGE_EXPLICIT_EMBED_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "sigchange/errors.hpp"
#include "sigchange/finite_difference.hpp"
#include "sigchange/minkowski_embed.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/quadrature.hpp"
#include "sigchange/root_finding.hpp"
#include "sigchange/types.hpp"

// Global embedding of the toy model -t dt^2 + sum dx^2 into R^{1,n}.
//
// The (theta, xi) plane carries the hyperbola (2 xi + sqrt2)(sqrt2 - 2 theta) = 2,
// i.e. xi = sqrt2 theta / (sqrt2 - 2 theta), which passes through the origin and
// has slope dxi/dtheta = 2 / (sqrt2 - 2 theta)^2. Along it, arc length in eta is
// related to t by
//
//   I(theta) = int_0^theta sqrt|4/(sqrt2 - 2 s)^4 - 1| ds = (2/3) |t|^{3/2} sgn(t),
//
// which theta_of_t inverts. The slope is < 1 for theta < 0 (timelike branch) and
// > 1 for 0 < theta < 1/sqrt2 (spacelike branch), so the curve realises -t dt^2
// when the Lorentzian side t > 0 runs along theta < 0: the embedding therefore
// uses theta(t) = theta_of_t(-t). The image curve is the same either way.

namespace sigchange {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
/// theta = 1/sqrt2 is the pole of the hyperbola and where I(theta) diverges.
inline constexpr double kThetaPole = 1.0 / std::numbers::sqrt2;

/// Member of the solution family: the base hyperbola translated by
/// shift * (-1, +1)/sqrt2 in (theta, xi), i.e. along the line theta + xi = 0.
struct HyperbolaFamily {
  double shift = 0.0;

  HyperbolaFamily() = default;
  explicit HyperbolaFamily(double d) : shift(d) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw PreconditionError("HyperbolaFamily: shift must be finite and >= 0");
    }
  }

  double offset() const noexcept { return shift / kSqrt2; }
};

/// xi on the family member at the given theta (in translated coordinates).
inline double hyperbola_xi(double theta, const HyperbolaFamily& family = {}) {
  const double base = theta + family.offset();
  if (!(base < kThetaPole)) {
    std::ostringstream msg;
    msg << "hyperbola_xi: theta = " << theta << " is at or beyond the pole";
    throw PoleError(msg.str());
  }
  return kSqrt2 * base / (kSqrt2 - 2.0 * base) + family.offset();
}

/// dxi/dtheta on the base hyperbola.
inline double hyperbola_slope(double base_theta) {
  const double a = kSqrt2 - 2.0 * base_theta;
  return 2.0 / (a * a);
}

/// sqrt|4/(sqrt2 - 2s)^4 - 1|, written without the cancellation near s = 0:
/// 4 - a^4 = 4 s (sqrt2 - s)(2 + a^2) with a = sqrt2 - 2s.
inline double arc_integrand(double s) {
  const double a = kSqrt2 - 2.0 * s;
  return std::sqrt(4.0 * std::abs(s) * (kSqrt2 - s) * (2.0 + a * a)) / (a * a);
}

/// theta above which the pole part of I(theta) is integrated in w = 1/(sqrt2 - 2s).
inline constexpr double kPoleSplit = 0.5;

/// I(theta). Integrated in u = sqrt|s|, which turns the half-power kink at s = 0
/// into the smooth integrand 4 u^2 sqrt((sqrt2 - s)(2 + a^2)) / a^2. Past kPoleSplit the
/// remainder uses w = 1/a: ds = dw / (2 w^2) cancels the 1/a^2 pole, leaving a bounded
/// integrand over w in [1/a(split), 1/a(theta)].
inline double arc_integral(double theta, const NumericConfig& cfg = NumericConfig{}) {
  if (std::isnan(theta)) throw PreconditionError("arc_integral: theta is NaN");
  if (!(theta < kThetaPole)) {
    std::ostringstream msg;
    msg << "arc_integral: diverges for theta >= 1/sqrt2 (theta = " << theta << ")";
    throw DivergenceError(msg.str());
  }
  if (theta == 0.0) return 0.0;
  const double sign = theta > 0.0 ? 1.0 : -1.0;
  auto require = [theta](const QuadratureResult& q) {
    if (!q.converged) {
      std::ostringstream msg;
      msg << "arc_integral: quadrature did not reach tolerance at theta = " << theta
          << " (error estimate " << q.error << ")";
      throw ConvergenceError(msg.str());
    }
    return q.value;
  };
  auto in_u = [sign](double u) {
    const double s = sign * u * u;
    const double a = kSqrt2 - 2.0 * s;
    return 4.0 * u * u * std::sqrt((kSqrt2 - s) * (2.0 + a * a)) / (a * a);
  };
  const double near_end = theta > kPoleSplit ? kPoleSplit : std::abs(theta);
  double value = require(integrate_adaptive(in_u, 0.0, std::sqrt(near_end), cfg.quad_abs_tol, cfg.quad_rel_tol));
  if (theta > kPoleSplit) {
    auto in_w = [](double w) {
      const double a = 1.0 / w;
      const double s = 0.5 * (kSqrt2 - a);
      return 0.5 * std::sqrt(4.0 * s * (kSqrt2 - s) * (2.0 + a * a));
    };
    const double w_lo = 1.0 / (kSqrt2 - 2.0 * kPoleSplit);
    const double w_hi = 1.0 / (kSqrt2 - 2.0 * theta);
    // Relative tolerance is on the total, which the first part only adds to.
    value += require(integrate_adaptive(in_w, w_lo, w_hi, cfg.quad_abs_tol, cfg.quad_rel_tol));
  }
  return sign * value;
}

/// (2/3) |t|^{3/2} sgn(t), the right-hand side of the arc-length relation.
inline double arc_target(double t) {
  return std::copysign(2.0 / 3.0 * std::pow(std::abs(t), 1.5), t);
}

/// t with (2/3)|t|^{3/2} sgn(t) = I(theta).
inline double t_of_theta(double theta, const NumericConfig& cfg = NumericConfig{}) {
  const double I = arc_integral(theta, cfg);
  return std::copysign(std::pow(1.5 * std::abs(I), 2.0 / 3.0), I);
}

/// Small-|t| and large-negative closed-form approximations of theta_of_t.
struct AsymptoticTheta {
  double small_regime = 0.0;           // t / 2^{5/6}
  double large_negative_regime = 0.0;  // I(theta) ~ theta, so theta ~ (2/3)|t|^{3/2} sgn(t)
};

inline AsymptoticTheta asymptotic_theta(double t) {
  return {t / std::pow(2.0, 5.0 / 6.0), arc_target(t)};
}

/// Unique theta < 1/sqrt2 with I(theta) = (2/3)|t|^{3/2} sgn(t).
inline double theta_of_t(double t, const NumericConfig& cfg = NumericConfig{}) {
  cfg.validate();
  if (!std::isfinite(t)) throw PreconditionError("theta_of_t: t must be finite");
  const double target = arc_target(t);
  if (target == 0.0) return 0.0;
  auto residual = [&](double theta) { return arc_integral(theta, cfg) - target; };
  const double seed = asymptotic_theta(t).small_regime;
  int expansions = 0;
  auto expanded = [&] {
    if (++expansions > cfg.max_iterations) {
      std::ostringstream msg;
      msg << "theta_of_t: bracket expansion exceeded " << cfg.max_iterations
          << " steps for t = " << t;
      throw ConvergenceError(msg.str());
    }
  };

  double lo, hi, r_lo, r_hi;
  if (target > 0.0) {
    // I is increasing and unbounded as theta -> 1/sqrt2: walk towards the pole.
    lo = 0.0;
    r_lo = -target;
    hi = std::min(seed, 0.5 * kThetaPole);
    r_hi = residual(hi);
    while (r_hi < 0.0) {
      expanded();
      lo = hi;
      r_lo = r_hi;
      hi = kThetaPole - 0.25 * (kThetaPole - hi);
      if (!(hi < kThetaPole) || hi == lo) {
        throw ConvergenceError("theta_of_t: bracket reached the pole in double precision");
      }
      r_hi = residual(hi);
    }
  } else {
    // On theta < 0 the integrand is below 1, so |I(theta)| < |theta| and target is an upper end.
    hi = std::max(seed, target);
    r_hi = residual(hi);
    if (r_hi < 0.0) {
      hi = 0.0;
      r_hi = -target;
    }
    lo = std::min(seed, target);
    r_lo = residual(lo);
    while (r_lo > 0.0) {
      expanded();
      hi = lo;
      r_hi = r_lo;
      lo = 2.0 * lo - 1.0;
      r_lo = residual(lo);
    }
  }
  return find_root_bracketed(residual, lo, hi, r_lo, r_hi, cfg.root_tol, cfg.max_iterations).root;
}

/// Base-hyperbola theta of the embedded point at chart time t (orientation reversed, see top).
inline double explicit_base_theta(double t, const NumericConfig& cfg = NumericConfig{}) {
  return theta_of_t(-t, cfg);
}

/// d(base theta)/dt = -sqrt|t| / I'(theta); the limit at t = 0 is -2^{-5/6}.
inline double explicit_base_theta_rate(double t, double base_theta) {
  if (t == 0.0 || base_theta == 0.0) return -std::pow(2.0, -5.0 / 6.0);
  return -std::sqrt(std::abs(t)) / arc_integrand(base_theta);
}

/// f(t, x) = (theta(t), xi(theta(t)), x^1, ..., x^{n-1}) on the chosen family member.
inline MinkowskiEvent embed_explicit(const ChartPoint& p, const HyperbolaFamily& family = {},
                                     const NumericConfig& cfg = NumericConfig{}) {
  if (!p.finite()) throw PreconditionError("embed_explicit: non-finite chart point");
  const double base = explicit_base_theta(p.t, cfg);
  Vector y(p.dimension());
  y(0) = hyperbola_xi(base - family.offset(), family);
  y.tail(p.spatial.size()) = p.spatial;
  return MinkowskiEvent(base - family.offset(), y);
}

/// The explicit embedding as an EmbeddingMap: analytic Jacobian and a chart inverse.
inline EmbeddingMap explicit_map(int n, const HyperbolaFamily& family = {},
                                 const NumericConfig& cfg = NumericConfig{}) {
  if (n < 2) throw PreconditionError("explicit_map: n must be >= 2");
  auto value = [family, cfg](const ChartPoint& p) { return embed_explicit(p, family, cfg); };
  auto jac = [n, cfg](const ChartPoint& p) {
    const double base = explicit_base_theta(p.t, cfg);
    const double rate = explicit_base_theta_rate(p.t, base);
    Matrix J = Matrix::Zero(n + 1, n);
    J(0, 0) = rate;
    J(1, 0) = hyperbola_slope(base) * rate;
    for (int i = 1; i < n; ++i) J(i + 1, i) = 1.0;
    return J;
  };
  auto domain = [](const ChartPoint& p) { return std::isfinite(p.t); };
  ChartInverse inverse;
  inverse.retract = [family, cfg](const MinkowskiEvent& e) {
    const double base = e.tau + family.offset();
    return ChartPoint(-t_of_theta(base, cfg), Vector(e.y.tail(e.y.size() - 1)));
  };
  // (sqrt2 - 2 theta)(2 xi + sqrt2) - 2 in base coordinates: 2 (sqrt2 - 2 theta) times
  // (y1 - xi(tau)) before the pole, so the same sign and zero set on the image, but without
  // the pole's blow-up. It vanishes only where both factors share a sign; the quadrant where
  // both are negative holds the other branch and is excluded (NaN). Elsewhere past the pole
  // it stays below -2, continuing the sign across theta = 1/sqrt2.
  inverse.membership = [family](const MinkowskiEvent& e) {
    const double a = kSqrt2 - 2.0 * (e.tau + family.offset());
    const double b = 2.0 * (e.y1() - family.offset()) + kSqrt2;
    if (!std::isfinite(a) || !std::isfinite(b) || (a <= 0.0 && b <= 0.0)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return a * b - 2.0;
  };
  return EmbeddingMap(n, n + 1, value, EmbeddingMap::JacobianFn(jac), domain, inverse);
}

/// |-theta'(t)^2 + xi'(t)^2 + t|, derivatives by central differences of embed_explicit.
inline double ode_residual(double t, const HyperbolaFamily& family = {},
                           const NumericConfig& cfg = NumericConfig{}) {
  const double h = cfg.fd_step * std::max(1.0, std::abs(t));
  auto component = [&](int k) {
    return [&, k](double s) {
      const MinkowskiEvent e = embed_explicit(ChartPoint(s, {0.0}), family, cfg);
      return k == 0 ? e.tau : e.y1();
    };
  };
  const double dtheta = central_derivative(component(0), t, h);
  const double dxi = central_derivative(component(1), t, h);
  return std::abs(-dtheta * dtheta + dxi * dxi + t);
}

}  // namespace sigchange

#endif  // SIGCHANGE_EXPLICIT_EMBED_HPP
