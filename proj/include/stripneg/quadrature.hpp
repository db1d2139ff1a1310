#pragma once

#include <functional>
#include <optional>
#include <utility>

namespace stripneg {

struct QuadratureConfig {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-8;
  int max_subdivisions = 4096;

  // Throws InvalidParams when a tolerance is non-positive or
  // max_subdivisions < 1.
  void validate() const;
};

using RealFunction = std::function<double(double)>;

struct QuadratureValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b]; b may be +infinity.
/// Throws QuadratureFailure when the error estimate exceeds
/// max(absolute_tolerance, relative_tolerance * |value|).
QuadratureValue integrate(const RealFunction& f, double a, double b,
                          const QuadratureConfig& quad);

/// Integral over the real line. Uses `support` when given; otherwise the
/// window [-L, L] doubles from `initial_half_width` until the contribution
/// of the newly added tails drops below absolute_tolerance.
QuadratureValue integrate_line(const RealFunction& f,
                               std::optional<std::pair<double, double>> support,
                               const QuadratureConfig& quad,
                               double initial_half_width = 8.0);

}  // namespace stripneg
