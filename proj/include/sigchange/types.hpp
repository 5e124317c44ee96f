#ifndef SIGCHANGE_TYPES_HPP
#define SIGCHANGE_TYPES_HPP

#include <cmath>
#include <initializer_list>
#include <string>

#include <Eigen/Dense>

#include "sigchange/errors.hpp"

namespace sigchange {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point (t, x^1, ..., x^{n-1}) of a radical-adapted chart. t is the absolute time.
struct ChartPoint {
  double t = 0.0;
  Vector spatial;

  ChartPoint() = default;
  ChartPoint(double t_, Vector x) : t(t_), spatial(std::move(x)) {}
  ChartPoint(double t_, std::initializer_list<double> x) : t(t_), spatial(x.size()) {
    int i = 0;
    for (double v : x) spatial(i++) = v;
  }

  int dimension() const noexcept { return 1 + static_cast<int>(spatial.size()); }

  /// Coordinates as one n-vector (t first).
  Vector coords() const {
    Vector c(dimension());
    c(0) = t;
    c.tail(spatial.size()) = spatial;
    return c;
  }

  static ChartPoint from_coords(const Vector& c) {
    return ChartPoint(c(0), Vector(c.tail(c.size() - 1)));
  }

  bool finite() const noexcept { return std::isfinite(t) && spatial.allFinite(); }
};

/// Event (tau, y^1, ..., y^{N-1}) of Minkowski space with eta = diag(-1, +1, ..., +1).
struct MinkowskiEvent {
  double tau = 0.0;
  Vector y;

  MinkowskiEvent() = default;
  MinkowskiEvent(double tau_, Vector y_) : tau(tau_), y(std::move(y_)) {}
  MinkowskiEvent(double tau_, std::initializer_list<double> y_) : tau(tau_), y(y_.size()) {
    int i = 0;
    for (double v : y_) y(i++) = v;
  }

  int dimension() const noexcept { return 1 + static_cast<int>(y.size()); }
  double y1() const { return y(0); }

  Vector coords() const {
    Vector c(dimension());
    c(0) = tau;
    c.tail(y.size()) = y;
    return c;
  }

  static MinkowskiEvent from_coords(const Vector& c) {
    return MinkowskiEvent(c(0), Vector(c.tail(c.size() - 1)));
  }

  bool finite() const noexcept { return std::isfinite(tau) && y.allFinite(); }
};

/// Flat metric diag(-1, +1, ..., +1) of dimension N.
inline Matrix minkowski_eta(int N) {
  Matrix eta = Matrix::Identity(N, N);
  eta(0, 0) = -1.0;
  return eta;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace sigchange

#endif  // SIGCHANGE_TYPES_HPP
