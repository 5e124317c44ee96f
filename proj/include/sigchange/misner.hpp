#ifndef SIGCHANGE_MISNER_HPP
#define SIGCHANGE_MISNER_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>

#include "sigchange/errors.hpp"
#include "sigchange/explicit_embed.hpp"
#include "sigchange/finite_difference.hpp"
#include "sigchange/minkowski_embed.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/root_finding.hpp"
#include "sigchange/types.hpp"

namespace sigchange {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// phi = kPhiScale * ln((y1 - tau)/2). With g = -2 dT dphi - T dphi^2 + sum dy^2
/// the quotient map is a local isometry onto eta only for the factor -2.
inline constexpr double kPhiScale = -2.0;

/// Group element A(rapidity)^power of the boost group acting in the (tau, y1) plane.
struct BoostSpec {
  double rapidity = std::numbers::pi;
  int power = 1;

  void validate() const {
    if (rapidity == 0.0 || !std::isfinite(rapidity)) {
      throw PreconditionError("BoostSpec: rapidity must be finite and non-zero");
    }
  }
};

/// Boost by rapidity s, evaluated in light-cone coordinates u = y1 - tau, v = y1 + tau
/// (u -> u e^{-s}, v -> v e^{s}) so the quotient coordinates stay well conditioned.
inline MinkowskiEvent boost_by(const MinkowskiEvent& e, double s) {
  const double u = (e.y1() - e.tau) * std::exp(-s);
  const double v = (e.y1() + e.tau) * std::exp(s);
  MinkowskiEvent out = e;
  out.tau = 0.5 * (v - u);
  out.y(0) = 0.5 * (v + u);
  return out;
}

inline MinkowskiEvent boost(const MinkowskiEvent& e, const BoostSpec& spec = {}) {
  spec.validate();
  if (spec.power == 0) return e;
  return boost_by(e, spec.power * spec.rapidity);
}

/// N x N matrix of the boost by rapidity s.
inline Matrix boost_matrix(int N, double s) {
  Matrix B = Matrix::Identity(N, N);
  B(0, 0) = B(1, 1) = std::cosh(s);
  B(0, 1) = B(1, 0) = std::sinh(s);
  return B;
}

/// Covering region y1 - tau > 0 on which the boost group acts freely.
inline bool in_region_R(const MinkowskiEvent& e) { return e.y1() - e.tau > 0.0; }

/// Point of Misner space: T, canonical phi in [0, 2pi), spectators y^2..y^{N-1}.
struct MisnerEvent {
  double T = 0.0;
  double phi = 0.0;
  Vector spectators;
};

/// Misner coordinates together with the covering-space representative phi_raw = phi + 2 pi branch.
struct MisnerCoordinates {
  MisnerEvent event;
  double phi_raw = 0.0;
  long branch = 0;
};

/// Reduce phi into [0, 2pi); returns (phi, k) with raw = phi + 2 pi k.
inline std::pair<double, long> canonical_phi(double raw) {
  const double k = std::floor(raw / kTwoPi);
  double phi = raw - k * kTwoPi;
  long branch = static_cast<long>(k);
  if (phi >= kTwoPi) {
    phi -= kTwoPi;
    ++branch;
  }
  if (phi < 0.0) phi = 0.0;
  return {phi, branch};
}

namespace detail {

inline void require_region(const MinkowskiEvent& e, const char* where) {
  if (!in_region_R(e)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << where << ": event (tau, y1) = (" << e.tau << ", " << e.y1()
        << ") lies outside the region y1 - tau > 0";
    throw RegionError(e.tau, e.y1(), msg.str());
  }
}

/// (tau, y1, y2, ...) -> (T, phi_raw, y2, ...) without region checks.
inline Vector misner_raw(const Vector& c) {
  Vector m = c;
  const double u = c(1) - c(0);
  const double v = c(1) + c(0);
  m(0) = 0.25 * u * v;
  m(1) = kPhiScale * std::log(0.5 * u);
  return m;
}

}  // namespace detail

inline MisnerCoordinates to_misner(const MinkowskiEvent& e) {
  if (e.dimension() < 2) throw PreconditionError("to_misner: event needs at least (tau, y1)");
  detail::require_region(e, "to_misner");
  const Vector m = detail::misner_raw(e.coords());
  MisnerCoordinates out;
  out.event.T = m(0);
  out.phi_raw = m(1);
  std::tie(out.event.phi, out.branch) = canonical_phi(out.phi_raw);
  out.event.spectators = m.tail(m.size() - 2);
  return out;
}

/// Misner coordinates of boost(e, spec) from those of e. T is invariant and phi_raw moves by
/// -kPhiScale * rapidity * power, one period per boost by pi. Unlike to_misner on the boosted
/// (tau, y1), this does not lose u = y1 - tau to cancellation.
inline MisnerCoordinates boost(const MisnerCoordinates& m, const BoostSpec& spec = {}) {
  spec.validate();
  MisnerCoordinates out = m;
  out.phi_raw = m.phi_raw - kPhiScale * (spec.rapidity * spec.power);
  std::tie(out.event.phi, out.branch) = canonical_phi(out.phi_raw);
  return out;
}

/// Covering-space representative of m on sheet `branch`: u = 2 exp((phi + 2 pi k)/kPhiScale).
inline MinkowskiEvent from_misner(const MisnerEvent& m, long branch = 0) {
  const double phi_raw = m.phi + kTwoPi * static_cast<double>(branch);
  const double u = 2.0 * std::exp(phi_raw / kPhiScale);
  const double v = 4.0 * m.T / u;
  Vector y(1 + m.spectators.size());
  y(0) = 0.5 * (v + u);
  y.tail(m.spectators.size()) = m.spectators;
  return MinkowskiEvent(0.5 * (v - u), y);
}

/// g = -2 dT dphi - T dphi^2 + sum (dy^i)^2 in coordinates (T, phi, y^2, ...).
inline Matrix misner_metric(double T, int N) {
  if (N < 2) throw PreconditionError("misner_metric: N must be >= 2");
  Matrix g = Matrix::Identity(N, N);
  g(0, 0) = 0.0;
  g(0, 1) = g(1, 0) = -1.0;
  g(1, 1) = -T;
  return g;
}

namespace detail {

inline auto scaled_step(const NumericConfig& cfg) {
  return [base = cfg.fd_step](double x) { return base * std::max(1.0, std::abs(x)); };
}

}  // namespace detail

/// d(T, phi_raw, y...)/d(tau, y1, y...) by the fourth-order central stencil.
inline Matrix quotient_jacobian(const MinkowskiEvent& e, const NumericConfig& cfg = NumericConfig{}) {
  detail::require_region(e, "quotient_jacobian");
  // Keep the stencil inside the region: the step may not exceed a quarter of y1 - tau.
  const double gap = e.y1() - e.tau;
  auto step = [&, base = cfg.fd_step](double x) {
    return std::min(base * std::max(1.0, std::abs(x)), 0.125 * gap);
  };
  return central_jacobian4(detail::misner_raw, e.coords(), step);
}

/// pi^* g_Misner at e.
inline Matrix quotient_pullback(const MinkowskiEvent& e, const NumericConfig& cfg = NumericConfig{}) {
  const Matrix J = quotient_jacobian(e, cfg);
  const double T = 0.25 * (e.y1() - e.tau) * (e.y1() + e.tau);
  const Matrix pb = J.transpose() * misner_metric(T, e.dimension()) * J;
  return 0.5 * (pb + pb.transpose());
}

/// max |pi^* g_Misner - eta|; small everywhere in the region when pi is a local isometry.
inline double quotient_isometry_residual(const MinkowskiEvent& e,
                                         const NumericConfig& cfg = NumericConfig{}) {
  return max_abs(quotient_pullback(e, cfg) - minkowski_eta(e.dimension()));
}

enum class EmbeddingSource { psi_toy, explicit_embedding };

inline const char* to_string(EmbeddingSource s) noexcept {
  return s == EmbeddingSource::psi_toy ? "psi" : "explicit";
}

inline EmbeddingMap source_map(EmbeddingSource source, int n, const HyperbolaFamily& family,
                               const NumericConfig& cfg = NumericConfig{}) {
  return source == EmbeddingSource::psi_toy ? psi_toy_map(n) : explicit_map(n, family, cfg);
}

/// pi o (source embedding) at p. The source image must lie in the covering region.
inline MisnerCoordinates compose_embedding(const ChartPoint& p, EmbeddingSource source,
                                           const HyperbolaFamily& family = HyperbolaFamily(1.0),
                                           const NumericConfig& cfg = NumericConfig{}) {
  const MinkowskiEvent e = source == EmbeddingSource::psi_toy ? psi_toy(p)
                                                              : embed_explicit(p, family, cfg);
  detail::require_region(e, "compose_embedding");
  return to_misner(e);
}

/// (pi o map)^* g_Misner, differentiating the composite directly.
inline Matrix composed_pullback(const EmbeddingMap& map, const ChartPoint& p,
                                const NumericConfig& cfg = NumericConfig{}) {
  detail::require_region(map(p), "composed_pullback");
  auto composite = [&map](const Vector& c) {
    return detail::misner_raw(map(ChartPoint::from_coords(c)).coords());
  };
  const Matrix J = central_jacobian4(composite, p.coords(), detail::scaled_step(cfg));
  const Vector image = composite(p.coords());
  const Matrix pb = J.transpose() * misner_metric(image(0), map.target_dim()) * J;
  return 0.5 * (pb + pb.transpose());
}

/// map^*(pi^* g_Misner): pull back through the quotient first, then through the map.
inline Matrix nested_pullback(const EmbeddingMap& map, const ChartPoint& p,
                              const NumericConfig& cfg = NumericConfig{}) {
  const Matrix Jmap = map.jacobian(p, JacobianMode::analytic, cfg);
  const Matrix pb = Jmap.transpose() * quotient_pullback(map(p), cfg) * Jmap;
  return 0.5 * (pb + pb.transpose());
}

/// Lower end of the t-range where psi_toy's image lies in the region:
/// the root of y1 - tau = t + (2/3)(1+t)^{3/2}.
inline double psi_toy_region_threshold() {
  auto gap = [](double t) { return t - temporal_f(t); };
  const double lo = -1.0 + 1e-12, hi = 0.0;
  return find_root_bracketed(gap, lo, hi, gap(lo), gap(hi), 1e-15, 200).root;
}

}  // namespace sigchange

#endif  // SIGCHANGE_MISNER_HPP
