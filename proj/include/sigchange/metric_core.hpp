#ifndef SIGCHANGE_METRIC_CORE_HPP
#define SIGCHANGE_METRIC_CORE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sigchange/errors.hpp"
#include "sigchange/finite_difference.hpp"
#include "sigchange/types.hpp"

namespace sigchange {

/// Signature-type-changing metric in radical-adapted coordinates.
///
/// Holds evaluators only; every query is a pure function of the point, so a model
/// may be shared between threads. Derivatives are analytic when supplied, central
/// differences otherwise.
class MetricModel {
 public:
  using ComponentFn = std::function<Matrix(const ChartPoint&)>;
  /// Returns n matrices, entry k being d g_{mu nu} / d x^k (x^0 = t).
  using DerivativeFn = std::function<std::vector<Matrix>(const ChartPoint&)>;
  using BlockFn = std::function<Matrix(const ChartPoint&)>;

  MetricModel(int dimension, ComponentFn components, std::optional<DerivativeFn> derivatives = {})
      : dim_(dimension), components_(std::move(components)), derivatives_(std::move(derivatives)) {
    if (dim_ < 2) throw PreconditionError("MetricModel: dimension must be >= 2");
  }

  /// The toy model -t dt^2 + sum (dx^i)^2, with analytic derivatives.
  static MetricModel toy(int n) {
    auto comps = [n](const ChartPoint& p) {
      Matrix g = Matrix::Identity(n, n);
      g(0, 0) = -p.t;
      return g;
    };
    auto derivs = [n](const ChartPoint&) {
      std::vector<Matrix> d(n, Matrix::Zero(n, n));
      d[0](0, 0) = -1.0;
      return d;
    };
    return MetricModel(n, comps, DerivativeFn(derivs));
  }

  /// Canonical form -t dt^2 + g_ij(t, x) dx^i dx^j with a user-supplied spatial block.
  /// Without `block_derivatives` the model differentiates by central differences.
  static MetricModel canonical(int n, BlockFn block,
                               std::optional<DerivativeFn> block_derivatives = {}) {
    auto comps = [n, block](const ChartPoint& p) {
      Matrix g = Matrix::Zero(n, n);
      g(0, 0) = -p.t;
      Matrix b = block(p);
      if (b.rows() != n - 1 || b.cols() != n - 1) {
        throw PreconditionError("canonical model: spatial block has wrong shape");
      }
      g.bottomRightCorner(n - 1, n - 1) = b;
      return g;
    };
    if (!block_derivatives) return MetricModel(n, comps);
    auto derivs = [n, bd = *block_derivatives](const ChartPoint& p) {
      std::vector<Matrix> db = bd(p);
      std::vector<Matrix> d(n, Matrix::Zero(n, n));
      for (int k = 0; k < n; ++k) d[k].bottomRightCorner(n - 1, n - 1) = db.at(k);
      d[0](0, 0) -= 1.0;
      return d;
    };
    return MetricModel(n, comps, DerivativeFn(derivs));
  }

  int dimension() const noexcept { return dim_; }
  bool has_analytic_derivatives() const noexcept { return derivatives_.has_value(); }

  /// Raw component evaluation; see eval_metric for the validated version.
  Matrix raw_components(const ChartPoint& p) const { return components_(p); }

  /// d g / d x^k for k = 0..n-1 (analytic, or central differences with the optimal step).
  std::vector<Matrix> derivatives(const ChartPoint& p) const {
    if (derivatives_) return (*derivatives_)(p);
    return fd_derivatives(p);
  }

  std::vector<Matrix> fd_derivatives(const ChartPoint& p) const {
    std::vector<Matrix> d(dim_);
    const Vector c = p.coords();
    for (int k = 0; k < dim_; ++k) {
      const double h = optimal_central_step(c(k));
      detail::check_step(c(k), h);
      Vector cp = c, cm = c;
      cp(k) += h;
      cm(k) -= h;
      d[k] = (components_(ChartPoint::from_coords(cp)) - components_(ChartPoint::from_coords(cm))) /
             (cp(k) - cm(k));
    }
    return d;
  }

 private:
  int dim_;
  ComponentFn components_;
  std::optional<DerivativeFn> derivatives_;
};

enum class SignatureClass { Riemannian, Degenerate, Lorentzian, Other };

inline const char* to_string(SignatureClass c) noexcept {
  switch (c) {
    case SignatureClass::Riemannian: return "Riemannian";
    case SignatureClass::Degenerate: return "Degenerate";
    case SignatureClass::Lorentzian: return "Lorentzian";
    case SignatureClass::Other: return "Other";
  }
  return "Unknown";
}

struct SignatureReport {
  SignatureClass signature_class = SignatureClass::Other;
  int negative_count = 0;
  int zero_count = 0;
  int positive_count = 0;
  double min_abs_eigenvalue = 0.0;
};

namespace detail {

inline void check_point(const MetricModel& model, const ChartPoint& p) {
  if (p.dimension() != model.dimension()) {
    throw PreconditionError("chart point dimension does not match the model");
  }
  if (!p.finite()) throw PreconditionError("chart point has non-finite coordinates");
}

inline double determinant(const Matrix& m) {
  return m.rows() == 0 ? 1.0 : m.fullPivLu().determinant();
}

/// adj(m) via cofactors; valid for singular m, which is the case on H.
inline Matrix adjugate(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Matrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Matrix minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      adj(j, i) = (((i + j) % 2) ? -1.0 : 1.0) * determinant(minor);
    }
  }
  return adj;
}

}  // namespace detail

/// Validated metric components at p: finite and symmetric.
inline Matrix eval_metric(const MetricModel& model, const ChartPoint& p) {
  detail::check_point(model, p);
  Matrix g = model.raw_components(p);
  const int n = model.dimension();
  if (g.rows() != n || g.cols() != n) {
    throw PreconditionError("metric evaluator returned a matrix of the wrong shape");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(g(i, j))) {
        std::ostringstream msg;
        msg << "non-finite metric component g(" << i << "," << j << ")";
        throw EvaluationError(i, j, msg.str());
      }
    }
  }
  const double scale = std::max(1.0, max_abs(g));
  if (max_abs(g - g.transpose()) > 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    throw PreconditionError("metric evaluator returned a non-symmetric matrix");
  }
  return 0.5 * (g + g.transpose());
}

/// Eigenvalue sign counts with |lambda| <= tol * max|lambda| counted as zero.
inline SignatureReport classify_signature(const MetricModel& model, const ChartPoint& p,
                                          double tol = 1e-10) {
  if (!(tol > 0.0)) throw PreconditionError("classify_signature: tol must be positive");
  const Matrix g = eval_metric(model, p);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("classify_signature: eigen-solver did not converge");
  }
  const Vector lambda = solver.eigenvalues();
  const double band = tol * lambda.cwiseAbs().maxCoeff();
  SignatureReport r;
  r.min_abs_eigenvalue = lambda.cwiseAbs().minCoeff();
  for (int i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) <= band) {
      ++r.zero_count;
    } else if (lambda(i) < 0.0) {
      ++r.negative_count;
    } else {
      ++r.positive_count;
    }
  }
  const int n = model.dimension();
  if (r.zero_count >= 1) {
    r.signature_class = SignatureClass::Degenerate;
  } else if (r.negative_count == 0) {
    r.signature_class = SignatureClass::Riemannian;
  } else if (r.negative_count == 1 && r.positive_count == n - 1) {
    r.signature_class = SignatureClass::Lorentzian;
  }
  return r;
}

struct RadicalTransversality {
  double det = 0.0;
  Vector grad_det;
  bool is_transverse = false;
};

/// det g and its coordinate gradient by Jacobi's formula d det = tr(adj(g) dg).
/// Off H (|det| > tol) the check is vacuous.
inline RadicalTransversality radical_transversality(const MetricModel& model, const ChartPoint& p,
                                                    double tol = 1e-10) {
  const Matrix g = eval_metric(model, p);
  const Matrix adj = detail::adjugate(g);
  const std::vector<Matrix> dg = model.derivatives(p);
  RadicalTransversality r;
  r.det = detail::determinant(g);
  r.grad_det.resize(model.dimension());
  for (int k = 0; k < model.dimension(); ++k) r.grad_det(k) = (adj * dg[k]).trace();
  r.is_transverse = std::abs(r.det) > tol || r.grad_det.norm() > tol;
  return r;
}

/// Gradient of det g by central differences of the determinant itself (independent route).
inline Vector fd_grad_det(const MetricModel& model, const ChartPoint& p, double h) {
  auto det_at = [&](const Vector& c) {
    Vector out(1);
    out(0) = detail::determinant(eval_metric(model, ChartPoint::from_coords(c)));
    return out;
  };
  return central_jacobian(det_at, p.coords(), [h](double) { return h; }).row(0).transpose();
}

/// Differential of G(p, v) = v^T g(p) v at a null vector: (base part, fiber part).
struct QuadraticFormDifferential {
  Vector base;   // d_k g_{mu nu} v^mu v^nu
  Vector fiber;  // 2 g v
  double norm() const { return std::sqrt(base.squaredNorm() + fiber.squaredNorm()); }
};

inline QuadraticFormDifferential quadratic_form_differential(const MetricModel& model,
                                                             const ChartPoint& p, const Vector& v) {
  const Matrix g = eval_metric(model, p);
  const std::vector<Matrix> dg = model.derivatives(p);
  QuadraticFormDifferential d;
  d.fiber = 2.0 * g * v;
  d.base.resize(model.dimension());
  for (int k = 0; k < model.dimension(); ++k) d.base(k) = v.dot(dg[k] * v);
  return d;
}

/// LC-regularity at a null vector: the differential of G does not vanish there.
inline bool lc_regularity_at(const MetricModel& model, const ChartPoint& p, const Vector& v,
                             double tol = 1e-10) {
  if (v.size() != model.dimension()) throw PreconditionError("lc_regularity_at: v has wrong size");
  if (v.norm() == 0.0) throw PreconditionError("lc_regularity_at: v must be non-zero");
  const Matrix g = eval_metric(model, p);
  const double G = v.dot(g * v);
  if (std::abs(G) > tol) {
    std::ostringstream msg;
    msg << "lc_regularity_at: v is not null (G = " << G << ")";
    throw PreconditionError(msg.str());
  }
  return quadratic_form_differential(model, p, v).norm() > tol;
}

struct SliceMetric {
  Matrix block;
  bool positive_definite = false;
};

/// Spatial block of g on the slice t = const, with a Cholesky positive-definiteness flag.
inline SliceMetric slice_metric(const MetricModel& model, double t, const Vector& spatial) {
  const Matrix g = eval_metric(model, ChartPoint(t, spatial));
  const int m = model.dimension() - 1;
  SliceMetric s;
  s.block = g.bottomRightCorner(m, m);
  Eigen::LLT<Matrix> llt(s.block);
  s.positive_definite = llt.info() == Eigen::Success;
  return s;
}

}  // namespace sigchange

#endif  // SIGCHANGE_METRIC_CORE_HPP
