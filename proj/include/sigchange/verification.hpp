#ifndef SIGCHANGE_VERIFICATION_HPP
#define SIGCHANGE_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sigchange/errors.hpp"
#include "sigchange/explicit_embed.hpp"
#include "sigchange/metric_core.hpp"
#include "sigchange/minkowski_embed.hpp"
#include "sigchange/misner.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/transversality.hpp"
#include "sigchange/types.hpp"

// Grid and random-sample checks shared by the `verify` command and the acceptance suite.
// Every check is deterministic: random samples come from a seeded mt19937_64.

namespace sigchange {

enum class Bound { upper, lower };

/// Outcome of one check. `value` is the worst observed statistic: the largest residual
/// for upper-bound checks, the smallest margin for lower-bound checks, or a count of
/// mismatches for classification checks (threshold 0, upper).
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  Bound bound = Bound::upper;
  std::string grid;
  std::string detail;
};

/// Uniform grid lo..hi with `count` points, endpoints included.
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;

  double at(int i) const {
    if (count == 1) return lo;
    return i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1);
  }
  std::string describe(const char* var) const {
    std::ostringstream out;
    out.precision(6);
    out << var << " in [" << lo << ", " << hi << "] x " << count;
    return out.str();
  }
};

namespace detail {

inline CheckResult finish(std::string name, double value, double threshold, Bound bound,
                          std::string grid, std::string detail_text = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.value = value;
  r.threshold = threshold;
  r.bound = bound;
  r.pass = std::isfinite(value) &&
           (bound == Bound::upper ? value <= threshold : value > threshold);
  r.grid = std::move(grid);
  r.detail = std::move(detail_text);
  return r;
}

inline ChartPoint grid_point(double t, double x, int n) { return ChartPoint(t, Vector::Constant(n - 1, x)); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace detail

/// max |psi^* eta - g| over a t x x grid (all spatial components set to x).
inline CheckResult check_psi_isometry(const MetricModel& model, JacobianMode mode, const Grid1D& t,
                                      const Grid1D& x, double f_scale = 1.0,
                                      const NumericConfig& cfg = NumericConfig{},
                                      std::optional<double> tol = {}) {
  const int n = model.dimension();
  const EmbeddingMap map = psi_toy_map(n, f_scale);
  const double threshold = tol.value_or(mode == JacobianMode::analytic ? 1e-12 : 1e-6);
  double worst = 0.0;
  for (int i = 0; i < t.count; ++i) {
    for (int j = 0; j < x.count; ++j) {
      worst = std::max(worst, isometry_residual(map, model, detail::grid_point(t.at(i), x.at(j), n), mode, cfg));
    }
  }
  const std::string name = mode == JacobianMode::analytic ? "isometry_psi_analytic" : "isometry_psi_fd";
  return detail::finish(name + "_n" + std::to_string(n), worst, threshold, Bound::upper,
                        t.describe("t") + ", " + x.describe("x"));
}

/// |-theta'^2 + xi'^2 + t| along the explicit curve, skipping |t| < 1e-6.
inline CheckResult check_explicit_ode(const Grid1D& t, double shift,
                                      const NumericConfig& cfg = NumericConfig{}, double tol = 1e-6) {
  const HyperbolaFamily family(shift);
  double worst = 0.0;
  int used = 0;
  for (int i = 0; i < t.count; ++i) {
    const double ti = t.at(i);
    if (std::abs(ti) < 1e-6) continue;
    worst = std::max(worst, ode_residual(ti, family, cfg));
    ++used;
  }
  return detail::finish("explicit_ode", worst, tol, Bound::upper,
                        t.describe("t") + " minus |t| < 1e-6 (" + std::to_string(used) + " points)");
}

/// |t_of_theta(theta_of_t(t)) - t|.
inline CheckResult check_theta_round_trip(const Grid1D& t, const NumericConfig& cfg = NumericConfig{},
                                          double tol = 1e-8) {
  double worst = 0.0;
  for (int i = 0; i < t.count; ++i) {
    worst = std::max(worst, std::abs(t_of_theta(theta_of_t(t.at(i), cfg), cfg) - t.at(i)));
  }
  return detail::finish("explicit_inversion_round_trip", worst, tol, Bound::upper, t.describe("t"));
}

/// Relative deviation of theta_of_t from its small-|t| and large-negative asymptotics.
inline CheckResult check_asymptotics(const NumericConfig& cfg = NumericConfig{}) {
  double small = 0.0;
  for (double mag : {1e-3, 1e-4, 1e-5}) {
    for (double t : {mag, -mag}) {
      small = std::max(small, std::abs(theta_of_t(t, cfg) - asymptotic_theta(t).small_regime) / mag);
    }
  }
  const double large = std::abs(theta_of_t(-100.0, cfg) + 2000.0 / 3.0) / 666.67;
  // Report the worse of the two as a fraction of its own tolerance.
  const double ratio = std::max(small / 1e-2, large / 2e-2);
  std::ostringstream d;
  d.precision(6);
  d << "small-t relative error " << small << " (<= 1e-2), t = -100 relative error " << large
    << " (<= 2e-2)";
  return detail::finish("explicit_asymptotics", ratio, 1.0, Bound::upper,
                        "|t| in {1e-3, 1e-4, 1e-5} both signs; t = -100", d.str());
}

/// Signature class against the sign of t on a t-sweep (spatial point fixed at x).
inline CheckResult check_signature_sweep(const MetricModel& model, const Grid1D& t, double x,
                                         double tol = 1e-10) {
  const int n = model.dimension();
  int mismatches = 0;
  std::optional<double> first_bad;
  for (int i = 0; i < t.count; ++i) {
    const double ti = t.at(i);
    const SignatureReport r = classify_signature(model, detail::grid_point(ti, x, n), tol);
    bool ok;
    if (ti < 0.0) {
      ok = r.signature_class == SignatureClass::Riemannian && r.positive_count == n;
    } else if (ti > 0.0) {
      ok = r.signature_class == SignatureClass::Lorentzian && r.negative_count == 1;
    } else {
      ok = r.signature_class == SignatureClass::Degenerate && r.zero_count == 1;
    }
    if (!ok) {
      ++mismatches;
      if (!first_bad) first_bad = ti;
    }
  }
  std::string d;
  if (first_bad) d = "first mismatch at t = " + std::to_string(*first_bad);
  return detail::finish("signature_sweep", mismatches, 0.0, Bound::upper, t.describe("t"), d);
}

/// Cholesky positive-definiteness of the spatial block on a t x x grid.
inline CheckResult check_slices(const MetricModel& model, const Grid1D& t, const Grid1D& x) {
  const int n = model.dimension();
  int failures = 0;
  for (int i = 0; i < t.count; ++i) {
    for (int j = 0; j < x.count; ++j) {
      if (!slice_metric(model, t.at(i), Vector::Constant(n - 1, x.at(j))).positive_definite) ++failures;
    }
  }
  return detail::finish("slice_positive_definite", failures, 0.0, Bound::upper,
                        t.describe("t") + ", " + x.describe("x"));
}

/// LC-regularity for random null vectors on t = 0. There the null directions are the
/// radical ones, v = (a, 0, ..., 0) with a != 0, at random spatial positions.
inline CheckResult check_lc_regularity(const MetricModel& model, int samples, std::uint64_t seed,
                                       double tol = 1e-10) {
  const int n = model.dimension();
  std::mt19937_64 rng(seed);
  double min_norm = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int k = 0; k < samples; ++k) {
    Vector x(n - 1);
    for (int i = 0; i < n - 1; ++i) x(i) = detail::uniform(rng, -5.0, 5.0);
    const ChartPoint p(0.0, x);
    Vector v = Vector::Zero(n);
    v(0) = detail::uniform(rng, 0.1, 2.0) * (k % 2 ? -1.0 : 1.0);
    if (!lc_regularity_at(model, p, v, tol)) ++failures;
    min_norm = std::min(min_norm, quadratic_form_differential(model, p, v).norm());
  }
  std::ostringstream g;
  g << samples << " random radical null vectors on t = 0, x in [-5, 5]^" << (n - 1);
  return detail::finish("lc_regularity", failures > 0 ? 0.0 : min_norm, tol, Bound::lower, g.str(),
                        "value is the smallest |dG| observed");
}

/// Transverse radical: |grad det g| bounded away from zero along t = 0.
inline CheckResult check_radical_transversality(const MetricModel& model, const Grid1D& x,
                                                double tol = 1e-10) {
  const int n = model.dimension();
  double min_grad = std::numeric_limits<double>::infinity();
  for (int j = 0; j < x.count; ++j) {
    const RadicalTransversality r = radical_transversality(model, detail::grid_point(0.0, x.at(j), n), tol);
    min_grad = std::min(min_grad, r.is_transverse ? r.grad_det.norm() : 0.0);
  }
  return detail::finish("radical_transversality", min_grad, tol, Bound::lower,
                        "t = 0, " + x.describe("x"), "value is the smallest |grad det g| on t = 0");
}

/// Smallest orbit-tangency residual of a map along a t-grid (spatial point x).
inline CheckResult check_tangency(const std::string& name, const EmbeddingMap& map, const Grid1D& t,
                                  double x, double floor, const NumericConfig& cfg = NumericConfig{}) {
  double min_res = std::numeric_limits<double>::infinity();
  double at = t.lo;
  for (int i = 0; i < t.count; ++i) {
    const double r = tangency_residual(map, detail::grid_point(t.at(i), x, map.source_dim()),
                                       JacobianMode::analytic, cfg)
                         .residual;
    if (r < min_res) {
      min_res = r;
      at = t.at(i);
    }
  }
  std::ostringstream d;
  d.precision(6);
  d << "minimum at t = " << at;
  return detail::finish(name, min_res, floor, Bound::lower, t.describe("t"), d.str());
}

/// Random events with y1 - tau in [u_lo, u_hi], tau in [-tau_max, tau_max], spectators in [-3, 3].
inline std::vector<MinkowskiEvent> random_region_events(int count, int N, std::uint64_t seed,
                                                        double u_lo = 1e-2, double u_hi = 10.0,
                                                        double tau_max = 5.0) {
  std::mt19937_64 rng(seed);
  std::vector<MinkowskiEvent> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double tau = detail::uniform(rng, -tau_max, tau_max);
    Vector y(N - 1);
    y(0) = tau + detail::uniform(rng, u_lo, u_hi);
    for (int i = 1; i < N - 1; ++i) y(i) = detail::uniform(rng, -3.0, 3.0);
    out.emplace_back(tau, y);
  }
  return out;
}

inline CheckResult check_quotient_isometry(int count, int N, std::uint64_t seed,
                                           const NumericConfig& cfg = NumericConfig{},
                                           double tol = 1e-6) {
  double worst = 0.0;
  for (const auto& e : random_region_events(count, N, seed)) {
    worst = std::max(worst, quotient_isometry_residual(e, cfg));
  }
  std::ostringstream g;
  g << count << " random events, tau in [-5, 5], y1 - tau in [0.01, 10], N = " << N;
  return detail::finish("quotient_isometry", worst, tol, Bound::upper, g.str());
}

/// One boost by the generator (rapidity pi) moves phi_raw by exactly one period 2 pi
/// and keeps T. Events are drawn with light-cone coordinates u = y1 - tau in [1, 4] and
/// v = y1 + tau in [-4, 4], so the boosted events stay representable to ~1e-13.
inline CheckResult check_boost_identification(int count, std::uint64_t seed, double tol = 1e-12) {
  std::mt19937_64 rng(seed);
  double worst_phi = 0.0, worst_T = 0.0;
  for (int k = 0; k < count; ++k) {
    const double u = detail::uniform(rng, 1.0, 4.0);
    const double v = detail::uniform(rng, -4.0, 4.0);
    const MinkowskiEvent e(0.5 * (v - u), {0.5 * (v + u), detail::uniform(rng, -3.0, 3.0)});
    const MisnerCoordinates a = to_misner(e);
    for (int power : {1, -1}) {
      const MisnerCoordinates b = to_misner(boost(e, BoostSpec{std::numbers::pi, power}));
      worst_phi = std::max(worst_phi, std::abs(b.phi_raw - a.phi_raw - power * kTwoPi));
      worst_T = std::max(worst_T, std::abs(b.event.T - a.event.T));
      if (b.branch != a.branch + power) worst_phi = std::numeric_limits<double>::infinity();
    }
  }
  std::ostringstream g, d;
  g << count << " random events, y1 - tau in [1, 4], y1 + tau in [-4, 4], boosts A and A^-1";
  d.precision(3);
  d << "max |phi shift - 2 pi| = " << worst_phi << ", max |dT| = " << worst_T;
  return detail::finish("boost_identification", std::max(worst_phi, worst_T), tol, Bound::upper,
                        g.str(), d.str());
}

/// to_misner(from_misner(m, k)) reproduces T and phi_raw = phi + 2 pi k.
///
/// The covering representative is stored as (tau, y1), so u = y1 - tau and v = y1 + tau are
/// only known to about eps * (|u| + |v|). That bounds the round trip from below by
/// |d phi_raw| ~ 2 eps (|u| + |v|) / u and |dT| ~ eps (|u| + |v|)^2 / 4. With `conditioned`
/// each error is divided by its factor (floored at 1) before comparing.
inline CheckResult check_misner_round_trip(int count, int kmax, double T_max, std::uint64_t seed,
                                           bool conditioned, double tol = 1e-12) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  long worst_k = 0;
  for (int s = 0; s < count; ++s) {
    MisnerEvent m;
    m.T = detail::uniform(rng, -T_max, T_max);
    m.phi = detail::uniform(rng, 0.0, kTwoPi);
    m.spectators = Vector::Constant(1, detail::uniform(rng, -3.0, 3.0));
    for (long k = -kmax; k <= kmax; ++k) {
      const MinkowskiEvent e = from_misner(m, k);
      const MisnerCoordinates r = to_misner(e);
      double err_T = std::abs(r.event.T - m.T);
      double err_phi = std::abs(r.phi_raw - (m.phi + kTwoPi * static_cast<double>(k)));
      if (conditioned) {
        const double u = e.y1() - e.tau, span = std::abs(u) + std::abs(e.y1() + e.tau);
        err_T /= std::max(1.0, 0.25 * span * span);
        err_phi /= std::max(1.0, span / u);
      }
      const double err = std::max({err_T, err_phi, max_abs(r.event.spectators - m.spectators)});
      if (err > worst) {
        worst = err;
        worst_k = k;
      }
    }
  }
  std::ostringstream g, d;
  g << count << " random (T, phi), T in [" << -T_max << ", " << T_max << "], branches " << -kmax << ".."
    << kmax;
  d << (conditioned ? "errors divided by their representation condition factors; " : "absolute error; ")
    << "worst branch k = " << worst_k;
  return detail::finish(conditioned ? "misner_round_trip_conditioned" : "misner_round_trip", worst, tol,
                        Bound::upper, g.str(), d.str());
}

/// Number of on-image bases whose boost orbit meets the image other than exactly once.
inline CheckResult check_orbit_counts(const std::string& name, const EmbeddingMap& map, const Grid1D& t_range,
                                      int bases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int bad = 0;
  std::optional<double> first_bad;
  for (int k = 0; k < bases; ++k) {
    const double t = detail::uniform(rng, t_range.lo, t_range.hi);
    const ChartPoint p(t, Vector::Constant(map.source_dim() - 1, detail::uniform(rng, -3.0, 3.0)));
    if (orbit_intersection_count(map, map(p)) != 1) {
      ++bad;
      if (!first_bad) first_bad = t;
    }
  }
  std::ostringstream g;
  g.precision(6);
  g << bases << " random on-image bases, t in [" << t_range.lo << ", " << t_range.hi << "], s in [-20, 20]";
  std::string d;
  if (first_bad) d = "first failing base at t = " + std::to_string(*first_bad);
  return detail::finish(name, bad, 0.0, Bound::upper, g.str(), d);
}

/// Smallest separation between composed images pi(f(p)) over a t x x grid. Distance uses
/// T, phi on the circle, and the spectators.
inline CheckResult check_composed_injectivity(const Grid1D& t, const Grid1D& x, double shift,
                                              const NumericConfig& cfg = NumericConfig{},
                                              double floor = 1e-9) {
  struct Image {
    double T, phi, y;
  };
  const HyperbolaFamily family(shift);
  std::vector<Image> images;
  images.reserve(static_cast<std::size_t>(t.count) * x.count);
  for (int i = 0; i < t.count; ++i) {
    for (int j = 0; j < x.count; ++j) {
      const MisnerCoordinates c = compose_embedding(ChartPoint(t.at(i), {x.at(j)}),
                                                    EmbeddingSource::explicit_embedding, family, cfg);
      images.push_back({c.event.T, c.event.phi, c.event.spectators(0)});
    }
  }
  std::sort(images.begin(), images.end(), [](const Image& a, const Image& b) { return a.T < b.T; });
  auto dist = [](const Image& a, const Image& b) {
    const double dphi = std::abs(a.phi - b.phi);
    const double circ = std::min(dphi, kTwoPi - dphi);
    return std::sqrt((a.T - b.T) * (a.T - b.T) + circ * circ + (a.y - b.y) * (a.y - b.y));
  };
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (images[j].T - images[i].T >= min_sep) break;
      min_sep = std::min(min_sep, dist(images[i], images[j]));
    }
  }
  std::ostringstream g;
  g << t.describe("t") << ", " << x.describe("x") << " (" << images.size() << " points), shift " << shift;
  return detail::finish("composed_injectivity", min_sep, floor, Bound::lower, g.str(),
                        "value is the smallest pairwise separation");
}

/// Along pi o f: det of the Misner (T, phi) block is -1 while det g = -t changes sign.
inline CheckResult check_bulk_regularity(const Grid1D& t, double shift,
                                         const NumericConfig& cfg = NumericConfig{}, double tol = 1e-12) {
  const HyperbolaFamily family(shift);
  const MetricModel toy = MetricModel::toy(2);
  double worst = 0.0;
  bool seen_negative = false, seen_positive = false, det_tracks_t = true;
  for (int i = 0; i < t.count; ++i) {
    const double ti = t.at(i);
    const MisnerCoordinates c = compose_embedding(ChartPoint(ti, {0.0}), EmbeddingSource::explicit_embedding, family, cfg);
    const Matrix block = misner_metric(c.event.T, 2);
    worst = std::max(worst, std::abs(block.determinant() + 1.0));
    const double det_g = eval_metric(toy, ChartPoint(ti, {0.0})).determinant();
    det_tracks_t = det_tracks_t && std::abs(det_g + ti) <= 1e-12 * std::max(1.0, std::abs(ti));
    seen_negative = seen_negative || det_g < 0.0;
    seen_positive = seen_positive || det_g > 0.0;
  }
  const bool sign_change = seen_negative && seen_positive && det_tracks_t;
  CheckResult r = detail::finish("bulk_lorentzian_brane_signature_change", worst, tol, Bound::upper,
                                 t.describe("t") + ", shift " + std::to_string(shift),
                                 sign_change ? "det g = -t takes both signs" : "det g does not change sign");
  r.pass = r.pass && sign_change;
  return r;
}

/// Three-way agreement of (pi o f)^* g_Misner, f^*(pi^* g_Misner) and g at random points.
inline CheckResult check_functoriality(int count, const Grid1D& t, double shift, std::uint64_t seed,
                                       const NumericConfig& cfg = NumericConfig{}, double tol = 1e-5) {
  const EmbeddingMap map = explicit_map(2, HyperbolaFamily(shift), cfg);
  const MetricModel toy = MetricModel::toy(2);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const ChartPoint p(detail::uniform(rng, t.lo, t.hi), {detail::uniform(rng, -3.0, 3.0)});
    const Matrix composed = composed_pullback(map, p, cfg);
    const Matrix nested = nested_pullback(map, p, cfg);
    const Matrix g = eval_metric(toy, p);
    worst = std::max({worst, max_abs(composed - nested), max_abs(composed - g), max_abs(nested - g)});
  }
  std::ostringstream g;
  g.precision(6);
  g << count << " random points, t in [" << t.lo << ", " << t.hi << "], x in [-3, 3], shift " << shift;
  return detail::finish("pullback_functoriality", worst, tol, Bound::upper, g.str());
}

/// Inputs of the default verification suite (`verify` command).
struct SuiteOptions {
  std::optional<MetricModel> model;  // toy(n) when empty
  int n = 2;
  Grid1D t{-0.99, 10.0, 200};
  Grid1D x{-5.0, 5.0, 50};
  double shift = 1.0;
  double psi_f_scale = 1.0;
  double psi_tangency_floor = 0.69;
  double explicit_tangency_floor = 0.7;
  std::uint64_t seed = 20240607;
  NumericConfig cfg;
};

inline std::vector<CheckResult> run_suite(const SuiteOptions& opt) {
  const MetricModel model = opt.model ? *opt.model : MetricModel::toy(opt.n);
  const int n = model.dimension();
  const NumericConfig& cfg = opt.cfg;
  std::vector<CheckResult> out;
  out.push_back(check_psi_isometry(model, JacobianMode::analytic, opt.t, opt.x, opt.psi_f_scale, cfg));
  out.push_back(check_psi_isometry(model, JacobianMode::finite_difference, opt.t, opt.x, opt.psi_f_scale, cfg));
  out.push_back(check_signature_sweep(model, Grid1D{-10.0, 10.0, 100001}, 0.5));
  out.push_back(check_slices(model, opt.t, opt.x));
  out.push_back(check_lc_regularity(model, 1000, opt.seed));
  out.push_back(check_radical_transversality(model, opt.x));
  out.push_back(check_explicit_ode(Grid1D{-10.0, 10.0, 1000}, opt.shift, cfg));
  out.push_back(check_theta_round_trip(Grid1D{-100.0, 100.0, 401}, cfg));
  out.push_back(check_asymptotics(cfg));
  out.push_back(check_tangency("tangency_psi", psi_toy_map(n, opt.psi_f_scale), Grid1D{-0.99, 10.0, 2000}, 0.0,
                               opt.psi_tangency_floor, cfg));
  out.push_back(check_tangency("tangency_explicit", explicit_map(n, HyperbolaFamily(opt.shift), cfg),
                               Grid1D{-10.0, 10.0, 2001}, 0.0, opt.explicit_tangency_floor, cfg));
  out.push_back(check_quotient_isometry(1000, n + 1, opt.seed, cfg));
  out.push_back(check_boost_identification(1000, opt.seed));
  out.push_back(check_misner_round_trip(1000, 3, 1.0, opt.seed, true));
  const double psi_lo = psi_toy_region_threshold() + 0.05;
  out.push_back(check_orbit_counts("injectivity_psi", psi_toy_map(n, opt.psi_f_scale), Grid1D{psi_lo, 10.0, 2}, 100,
                                   opt.seed));
  out.push_back(check_orbit_counts("injectivity_explicit", explicit_map(n, HyperbolaFamily(opt.shift), cfg),
                                   Grid1D{-10.0, 10.0, 2}, 100, opt.seed));
  out.push_back(check_composed_injectivity(Grid1D{-3.0, 3.0, 100}, Grid1D{-3.0, 3.0, 100}, opt.shift, cfg));
  out.push_back(check_bulk_regularity(Grid1D{-3.0, 3.0, 601}, opt.shift, cfg));
  out.push_back(check_functoriality(100, Grid1D{-3.0, 3.0, 2}, opt.shift, opt.seed, cfg));
  return out;
}

}  // namespace sigchange

#endif  // SIGCHANGE_VERIFICATION_HPP
