#ifndef SIGCHANGE_NUMERIC_CONFIG_HPP
#define SIGCHANGE_NUMERIC_CONFIG_HPP

#include <cmath>
#include <cstdlib>
#include <string>

#include "sigchange/errors.hpp"

namespace sigchange {

/// Tolerances shared by the quadrature, the root finder and the finite-difference code.
struct NumericConfig {
  double quad_abs_tol = 1e-14;
  double quad_rel_tol = 1e-13;
  /// Relative step tolerance of the bracketed root finder.
  double root_tol = 1e-14;
  int max_iterations = 200;
  /// Base finite-difference step; the effective step is fd_step * max(1, |x|).
  double fd_step = 1e-5;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(quad_abs_tol) || !positive(quad_rel_tol) || !positive(root_tol) ||
        !positive(fd_step)) {
      throw PreconditionError("NumericConfig: tolerances and fd_step must be finite and positive");
    }
    if (max_iterations < 1) {
      throw PreconditionError("NumericConfig: max_iterations must be >= 1");
    }
  }

  /// Defaults, with root_tol taken from SIGCHANGE_ROOT_TOL when set.
  static NumericConfig from_environment() {
    NumericConfig cfg;
    if (const char* env = std::getenv("SIGCHANGE_ROOT_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw PreconditionError(std::string("SIGCHANGE_ROOT_TOL is not a positive number: ") + env);
      }
      cfg.root_tol = v;
    }
    return cfg;
  }
};

}  // namespace sigchange

#endif  // SIGCHANGE_NUMERIC_CONFIG_HPP
