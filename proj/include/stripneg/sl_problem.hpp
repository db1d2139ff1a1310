#pragma once

#include "stripneg/potential.hpp"

namespace stripneg {

/// Singular Sturm-Liouville problem
///   overall_scale * ( -u'' + c/x^2 u - M(x) u )
/// on [-truncation, truncation] with Dirichlet ends. For c > 0 the line
/// splits at x = 0 into two half-lines, each started at singular_start with
/// the principal (Friedrichs) solution u ~ x^{s+}, s+ = (1 + sqrt(1+4c))/2.
struct SLProblem {
  double c = 0.0;
  Profile1D M = Profile1D::zero();
  double truncation = 20.0;
  double singular_start = 20.0e-6;
  double overall_scale = 1.0;

  /// Problem with singular_start = 1e-6 * truncation.
  static SLProblem make(double c, Profile1D M, double truncation, double overall_scale = 1.0);

  bool is_split() const noexcept { return c > 0.0; }
  /// Throws SingularitySetup or InvalidParams on malformed input.
  void validate() const;
  /// Magnitude used to scale the zero-cluster threshold: overall_scale * max(1, max M).
  double operator_scale() const;
};

}  // namespace stripneg
