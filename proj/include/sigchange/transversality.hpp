#ifndef SIGCHANGE_TRANSVERSALITY_HPP
#define SIGCHANGE_TRANSVERSALITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "sigchange/errors.hpp"
#include "sigchange/minkowski_embed.hpp"
#include "sigchange/misner.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/types.hpp"

namespace sigchange {

/// Boost generator K = tau d/dy1 + y1 d/dtau, as a vector (K^tau, K^y1, 0, ...).
inline Vector killing_at(const MinkowskiEvent& e) {
  Vector k = Vector::Zero(e.dimension());
  k(0) = e.y1();
  k(1) = e.tau;
  return k;
}

struct TangencyResult {
  /// |K - P K| / |K| with P the projector onto the embedded tangent space.
  double residual = 0.0;
  /// Spatial tangent projections not all along e_1 (rows y^2.. of the Jacobian non-zero).
  bool rank_hypothesis_holds = false;
};

/// How far K is from the tangent space of the image at map(p); zero iff K is tangent.
///
/// Euclidean least squares depends on the Lorentz frame, so the fit is done in the frame
/// where |y1 - tau| = |y1 + tau| (the boost minimising |K|); on the null lines through the
/// origin the non-zero light-cone coordinate is scaled to 1 instead. The value is then the
/// same for every point of an orbit.
inline TangencyResult tangency_residual(const EmbeddingMap& map, const ChartPoint& p,
                                        JacobianMode mode = JacobianMode::analytic,
                                        const NumericConfig& cfg = NumericConfig{}) {
  const MinkowskiEvent e = map(p);
  const Vector K = killing_at(e);
  if (K.norm() == 0.0) {
    throw DegenerateOrbitError("tangency_residual: image point is the fixed point of the boost group");
  }
  const Matrix J = map.jacobian(p, mode, cfg);
  TangencyResult out;
  const int N = map.target_dim();
  out.rank_hypothesis_holds = N > 2 && J.bottomRows(N - 2).cwiseAbs().maxCoeff() > 0.0;

  const double u = std::abs(e.y1() - e.tau);
  const double v = std::abs(e.y1() + e.tau);
  double s;
  if (u > 0.0 && v > 0.0) {
    s = 0.5 * std::log(u / v);
  } else {
    s = u > 0.0 ? std::log(u) : -std::log(v);
  }
  const Matrix B = boost_matrix(N, s);
  const Matrix Jb = B * J;
  const Vector Kb = killing_at(boost_by(e, s));

  Eigen::ColPivHouseholderQR<Matrix> qr(Jb);
  qr.setThreshold(1e-12);
  if (qr.rank() < map.source_dim()) {
    std::ostringstream msg;
    msg << "tangency_residual: Jacobian rank " << qr.rank() << " < " << map.source_dim();
    throw ImmersionError(static_cast<int>(qr.rank()), msg.str());
  }
  const Vector coeffs = qr.solve(Kb);
  out.residual = (Kb - Jb * coeffs).norm() / Kb.norm();
  return out;
}

struct TangencyPoly {
  double value = 0.0;
  double discriminant = 0.0;
};

/// 2t^2 + t + 2: psi_toy's tangency condition y1 = -tau sqrt(1+t) reduced to a polynomial.
inline TangencyPoly toy_tangency_poly(double t) {
  constexpr double a = 2.0, b = 1.0, c = 2.0;
  return {(a * t + b) * t + c, b * b - 4.0 * a * c};
}

struct OrbitSample {
  double s = 0.0;
  MinkowskiEvent event;
  /// Signed image-membership residual (NaN outside the inverse's domain).
  double membership = 0.0;
  /// F_q(s) = t(retract(gamma_s q)) where the retraction is defined.
  std::optional<double> chart_time;
  /// Source time, present only at samples lying on the image.
  std::optional<double> t_value;
};

enum class ProfileShape { strictly_monotone, interior_extremum, undetermined };

inline const char* to_string(ProfileShape s) noexcept {
  switch (s) {
    case ProfileShape::strictly_monotone: return "strictly_monotone";
    case ProfileShape::interior_extremum: return "interior_extremum";
    case ProfileShape::undetermined: return "undetermined";
  }
  return "unknown";
}

struct OrbitScanOptions {
  double s_lo = -20.0;
  double s_hi = 20.0;
  int samples = 4001;
  /// Absolute tolerance for touching (non-crossing) intersections.
  double membership_tol = 1e-9;
  /// Evaluate F_q at every sample; costs one retraction per sample.
  bool chart_times = true;
};

struct OrbitProfile {
  std::vector<OrbitSample> samples;
  /// Boost parameters where the orbit meets the image, ascending.
  std::vector<double> intersection_s;
  std::vector<double> intersection_t;
  ProfileShape shape = ProfileShape::undetermined;
  std::optional<double> extremum_s;
  /// |F_q'(s*)| at the located extremum.
  std::optional<double> extremum_slope;
};

namespace detail {

inline double safe_membership(const ChartInverse& inv, const MinkowskiEvent& e) {
  try {
    const double m = inv.membership(e);
    return std::isfinite(m) ? m : std::numeric_limits<double>::quiet_NaN();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline std::optional<double> safe_chart_time(const ChartInverse& inv, const MinkowskiEvent& e) {
  try {
    const double t = inv.retract(e).t;
    if (std::isfinite(t)) return t;
  } catch (const Error&) {
  }
  return std::nullopt;
}

template <class F>
double golden_minimize(F&& f, double a, double b, int iterations = 200) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Time profile of the boost orbit through `base` and its intersections with the image.
///
/// Crossings are isolated by sign changes of the membership residual on the s-grid and
/// refined by bisection; touching intersections by refining local minima of |membership|.
/// The shape follows the monotone / interior-extremum dichotomy on the interval between
/// the outermost intersections (the whole scan range with fewer than two).
inline OrbitProfile orbit_time_profile(const EmbeddingMap& map, const MinkowskiEvent& base,
                                       const OrbitScanOptions& opts = {},
                                       const NumericConfig& cfg = NumericConfig{}) {
  if (!map.inverse()) {
    throw CapabilityError("orbit_time_profile: the map provides no chart inverse");
  }
  if (base.dimension() != map.target_dim()) {
    throw PreconditionError("orbit_time_profile: base event has the wrong dimension");
  }
  if (!(opts.s_lo < opts.s_hi) || opts.samples < 3) {
    throw PreconditionError("orbit_time_profile: need s_lo < s_hi and at least 3 samples");
  }
  detail::require_region(base, "orbit_time_profile");
  const ChartInverse& inv = *map.inverse();
  auto membership_at = [&](double s) { return detail::safe_membership(inv, boost_by(base, s)); };

  OrbitProfile prof;
  const int n = opts.samples;
  const double ds = (opts.s_hi - opts.s_lo) / (n - 1);
  prof.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    OrbitSample& smp = prof.samples[k];
    smp.s = k + 1 == n ? opts.s_hi : opts.s_lo + k * ds;
    smp.event = boost_by(base, smp.s);
    smp.membership = detail::safe_membership(inv, smp.event);
    if (opts.chart_times) smp.chart_time = detail::safe_chart_time(inv, smp.event);
  }

  std::vector<double> roots;
  auto ok = [](double m) { return !std::isnan(m); };
  for (int k = 0; k < n; ++k) {
    const double m = prof.samples[k].membership;
    if (!ok(m)) continue;
    if (m == 0.0) {
      roots.push_back(prof.samples[k].s);
      continue;
    }
    if (k + 1 < n) {
      const double m1 = prof.samples[k + 1].membership;
      if (ok(m1) && m1 != 0.0 && (m < 0.0) != (m1 < 0.0)) {
        double a = prof.samples[k].s, b = prof.samples[k + 1].s, fa = m;
        for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = membership_at(mid);
          if (!ok(fm)) break;
          if (fm == 0.0) {
            a = b = mid;
            break;
          }
          if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        roots.push_back(0.5 * (a + b));
        continue;
      }
    }
    // Touching intersection: local minimum of |m| with both neighbours on the same side.
    if (k > 0 && k + 1 < n) {
      const double ml = prof.samples[k - 1].membership;
      const double mr = prof.samples[k + 1].membership;
      if (ok(ml) && ok(mr) && ml != 0.0 && mr != 0.0 && (ml < 0.0) == (m < 0.0) &&
          (mr < 0.0) == (m < 0.0) && std::abs(m) <= std::abs(ml) && std::abs(m) <= std::abs(mr)) {
        auto absm = [&](double s) {
          const double v = membership_at(s);
          return ok(v) ? std::abs(v) : std::numeric_limits<double>::infinity();
        };
        const double s_star = detail::golden_minimize(absm, prof.samples[k - 1].s, prof.samples[k + 1].s);
        if (absm(s_star) <= opts.membership_tol) roots.push_back(s_star);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    if (prof.intersection_s.empty() || r - prof.intersection_s.back() > 0.5 * ds) {
      prof.intersection_s.push_back(r);
    }
  }
  for (double r : prof.intersection_s) {
    const MinkowskiEvent e = boost_by(base, r);
    const auto t = detail::safe_chart_time(inv, e);
    prof.intersection_t.push_back(t.value_or(std::numeric_limits<double>::quiet_NaN()));
    // Attach t_value to the grid sample nearest the intersection.
    const int k = std::clamp(static_cast<int>(std::lround((r - opts.s_lo) / ds)), 0, n - 1);
    if (std::abs(prof.samples[k].s - r) <= 1e-12 * std::max(1.0, std::abs(r)) ||
        std::abs(prof.samples[k].membership) <= opts.membership_tol) {
      prof.samples[k].t_value = t;
    }
  }

  if (!opts.chart_times) return prof;
  double lo = opts.s_lo, hi = opts.s_hi;
  if (prof.intersection_s.size() >= 2) {
    lo = prof.intersection_s.front();
    hi = prof.intersection_s.back();
  }
  std::vector<std::pair<double, double>> profile;
  for (const auto& smp : prof.samples) {
    if (smp.s >= lo && smp.s <= hi && smp.chart_time) profile.emplace_back(smp.s, *smp.chart_time);
  }
  if (profile.size() < 3) return prof;
  int first_sign = 0;
  std::optional<std::size_t> turn;
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const double d = profile[k + 1].second - profile[k].second;
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (first_sign == 0 && k == 0) first_sign = sign;
    if (sign == 0 || sign != first_sign) {
      turn = k;
      break;
    }
  }
  if (!turn) {
    prof.shape = ProfileShape::strictly_monotone;
    return prof;
  }
  prof.shape = ProfileShape::interior_extremum;
  auto F = [&](double s) {
    const auto t = detail::safe_chart_time(inv, boost_by(base, s));
    return t.value_or(std::numeric_limits<double>::quiet_NaN());
  };
  auto dF = [&](double s) {
    const double h = cfg.fd_step * std::max(1.0, std::abs(s));
    return (F(s + h) - F(s - h)) / (2.0 * h);
  };
  // Bracket the derivative's sign change around the first turning sample.
  const std::size_t k = *turn;
  double a = profile[k > 0 ? k - 1 : 0].first;
  double b = profile[std::min(k + 2, profile.size() - 1)].first;
  double fa = dF(a), fb = dF(b);
  double s_star;
  if (std::isfinite(fa) && std::isfinite(fb) && (fa < 0.0) != (fb < 0.0)) {
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = dF(mid);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    s_star = 0.5 * (a + b);
  } else {
    s_star = profile[k].first;
  }
  prof.extremum_s = s_star;
  prof.extremum_slope = std::abs(dF(s_star));
  return prof;
}

/// Number of isolated boost parameters in [s_lo, s_hi] where the orbit of `base` meets the image.
inline int orbit_intersection_count(const EmbeddingMap& map, const MinkowskiEvent& base,
                                    double s_lo = -20.0, double s_hi = 20.0,
                                    const NumericConfig& cfg = NumericConfig{}) {
  OrbitScanOptions opts;
  opts.s_lo = s_lo;
  opts.s_hi = s_hi;
  opts.chart_times = false;
  return static_cast<int>(orbit_time_profile(map, base, opts, cfg).intersection_s.size());
}

}  // namespace sigchange

#endif  // SIGCHANGE_TRANSVERSALITY_HPP
