#ifndef SIGCHANGE_MINKOWSKI_EMBED_HPP
#define SIGCHANGE_MINKOWSKI_EMBED_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "sigchange/errors.hpp"
#include "sigchange/finite_difference.hpp"
#include "sigchange/metric_core.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/types.hpp"

namespace sigchange {

enum class JacobianMode { analytic, finite_difference };

/// Smooth left inverse of an embedding, defined on a neighbourhood of its image.
struct ChartInverse {
  /// retract(psi(p)) == p.
  std::function<ChartPoint(const MinkowskiEvent&)> retract;
  /// Signed scalar vanishing exactly on the image; NaN where undefined.
  std::function<double(const MinkowskiEvent&)> membership;
};

/// Map from a chart into Minkowski space R^{1,N-1}.
class EmbeddingMap {
 public:
  using ValueFn = std::function<MinkowskiEvent(const ChartPoint&)>;
  using JacobianFn = std::function<Matrix(const ChartPoint&)>;
  using DomainFn = std::function<bool(const ChartPoint&)>;

  EmbeddingMap(int source_dim, int target_dim, ValueFn value, std::optional<JacobianFn> jacobian,
               DomainFn domain, std::optional<ChartInverse> inverse = {})
      : source_dim_(source_dim),
        target_dim_(target_dim),
        value_(std::move(value)),
        jacobian_(std::move(jacobian)),
        domain_(std::move(domain)),
        inverse_(std::move(inverse)) {
    if (source_dim_ < 2) throw PreconditionError("EmbeddingMap: source dimension must be >= 2");
    if (target_dim_ < source_dim_) {
      throw PreconditionError("EmbeddingMap: target dimension must be >= source dimension");
    }
  }

  int source_dim() const noexcept { return source_dim_; }
  int target_dim() const noexcept { return target_dim_; }
  bool has_analytic_jacobian() const noexcept { return jacobian_.has_value(); }
  const std::optional<ChartInverse>& inverse() const noexcept { return inverse_; }

  bool in_domain(const ChartPoint& p) const { return domain_(p); }

  MinkowskiEvent operator()(const ChartPoint& p) const {
    check_source(p);
    MinkowskiEvent e = value_(p);
    if (e.dimension() != target_dim_) {
      throw PreconditionError("EmbeddingMap: value has the wrong target dimension");
    }
    return e;
  }

  /// N x n Jacobian. Analytic mode falls back to differences when no analytic form exists.
  Matrix jacobian(const ChartPoint& p, JacobianMode mode,
                  const NumericConfig& cfg = NumericConfig{}) const {
    check_source(p);
    if (mode == JacobianMode::analytic && jacobian_) return (*jacobian_)(p);
    auto f = [this](const Vector& c) { return value_(ChartPoint::from_coords(c)).coords(); };
    const double base = cfg.fd_step;
    return central_jacobian(f, p.coords(), [base](double x) { return base * std::max(1.0, std::abs(x)); });
  }

 private:
  void check_source(const ChartPoint& p) const {
    if (p.dimension() != source_dim_) {
      throw PreconditionError("EmbeddingMap: chart point has the wrong dimension");
    }
    if (!p.finite()) throw PreconditionError("EmbeddingMap: non-finite chart point");
    if (!domain_(p)) {
      std::ostringstream msg;
      msg << "EmbeddingMap: point with t = " << p.t << " is outside the map's domain";
      throw DomainError(msg.str());
    }
  }

  int source_dim_;
  int target_dim_;
  ValueFn value_;
  std::optional<JacobianFn> jacobian_;
  DomainFn domain_;
  std::optional<ChartInverse> inverse_;
};

/// Temporal function f(t) = -(2/3)(1+t)^{3/2}, strictly decreasing on t > -1.
inline double temporal_f(double t) {
  if (!(t > -1.0)) {
    std::ostringstream msg;
    msg << "temporal_f: requires t > -1, got " << t;
    throw DomainError(msg.str());
  }
  return -2.0 / 3.0 * std::pow(1.0 + t, 1.5);
}

/// f'(t) = -sqrt(1+t); zero at t = -1, where the immersion argument breaks down.
inline double temporal_f_prime(double t) {
  if (!(t > -1.0)) throw DomainError("temporal_f_prime: requires t > -1");
  return -std::sqrt(1.0 + t);
}

/// psi(t, x) = (f(t), t, x^1, ..., x^{n-1}): the toy model with identity spatial map.
/// `f_scale` != 1 gives a deliberately non-isometric map for regression checks.
inline EmbeddingMap psi_toy_map(int n, double f_scale = 1.0) {
  if (n < 2) throw PreconditionError("psi_toy_map: n must be >= 2");
  auto value = [f_scale](const ChartPoint& p) {
    Vector y(p.dimension());
    y(0) = p.t;
    y.tail(p.spatial.size()) = p.spatial;
    return MinkowskiEvent(f_scale * temporal_f(p.t), y);
  };
  auto jac = [n, f_scale](const ChartPoint& p) {
    Matrix J = Matrix::Zero(n + 1, n);
    J(0, 0) = f_scale * temporal_f_prime(p.t);
    J(1, 0) = 1.0;
    for (int i = 1; i < n; ++i) J(i + 1, i) = 1.0;
    return J;
  };
  auto domain = [](const ChartPoint& p) { return p.t > -1.0; };
  ChartInverse inverse;
  inverse.retract = [](const MinkowskiEvent& e) {
    return ChartPoint(e.y1(), Vector(e.y.tail(e.y.size() - 1)));
  };
  inverse.membership = [f_scale](const MinkowskiEvent& e) {
    if (!(e.y1() > -1.0)) return std::numeric_limits<double>::quiet_NaN();
    return e.tau - f_scale * temporal_f(e.y1());
  };
  return EmbeddingMap(n, n + 1, value, EmbeddingMap::JacobianFn(jac), domain, inverse);
}

inline MinkowskiEvent psi_toy(const ChartPoint& p) {
  return psi_toy_map(p.dimension())(p);
}

/// Column rank of a Jacobian with a relative threshold.
inline int jacobian_rank(const Matrix& J) {
  Eigen::ColPivHouseholderQR<Matrix> qr(J);
  qr.setThreshold(1e-12);
  return static_cast<int>(qr.rank());
}

/// Induced metric J^T eta J of the flat target metric.
inline Matrix pullback(const EmbeddingMap& map, const MetricModel& model, const ChartPoint& p,
                       JacobianMode mode, const NumericConfig& cfg = NumericConfig{}) {
  if (model.dimension() != map.source_dim()) {
    throw PreconditionError("pullback: model and map source dimensions differ");
  }
  const Matrix J = map.jacobian(p, mode, cfg);
  const int rank = jacobian_rank(J);
  if (rank < map.source_dim()) {
    std::ostringstream msg;
    msg << "pullback: Jacobian rank " << rank << " < " << map.source_dim() << " at t = " << p.t;
    throw ImmersionError(rank, msg.str());
  }
  const Matrix induced = J.transpose() * minkowski_eta(map.target_dim()) * J;
  return 0.5 * (induced + induced.transpose());
}

/// max |psi^* eta - g| over all components.
inline double isometry_residual(const EmbeddingMap& map, const MetricModel& model,
                                const ChartPoint& p, JacobianMode mode,
                                const NumericConfig& cfg = NumericConfig{}) {
  return max_abs(pullback(map, model, p, mode, cfg) - eval_metric(model, p));
}

}  // namespace sigchange

#endif  // SIGCHANGE_MINKOWSKI_EMBED_HPP
