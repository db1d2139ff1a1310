#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stripneg/potential.hpp"
#include "stripneg/quadrature.hpp"

namespace stripneg {

/// A test function with its derivative, vanishing outside `support`.
/// `breakpoints` lists points where f or f' may be non-smooth.
struct TestFunction {
  RealFunction value;
  RealFunction derivative;
  Interval support{0.0, 1.0};
  std::vector<double> breakpoints;
};

struct TestFunctionSpec {
  enum class Kind { bump_superposition, polynomial_decay, explicit_function };

  std::uint64_t seed = 0;
  Kind kind = Kind::bump_superposition;
  /// Bumps live inside this interval; polynomial_decay is cut off smoothly
  /// over its second half.
  Interval support{0.0, 4.0};
  int min_bumps = 3;
  int max_bumps = 7;
  /// Exponent beta of (1 + x)^-beta for polynomial_decay.
  double decay_exponent = 1.5;
  std::optional<TestFunction> explicit_function;
};

/// Builds the (deterministic for a fixed seed) test function.
TestFunction make_test_function(const TestFunctionSpec& spec);

struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double admissible_constant = 0.0;
  bool satisfied = true;
};

/// lhs = int_0^inf (F/x)^p, rhs = int_0^inf f^p with F(x) = int_0^x f,
/// constant (p/(p-1))^p. A zero denominator reports ratio 0, satisfied.
RatioReport hardy_1d_ratio(const TestFunctionSpec& f, double p, const QuadratureConfig& quad = {});

/// Angular mode m of the Aharonov-Bohm Hardy inequality:
/// lhs = int |u|^2 r^-1 dr, rhs = int (|u'|^2 + (m+alpha)^2 |u|^2 r^-2) r dr,
/// constant (min_k |k - alpha|)^-2. Throws IntegerFlux for integer alpha.
RatioReport magnetic_hardy_mode_ratio(const TestFunctionSpec& u, int m, double alpha,
                                      const QuadratureConfig& quad = {});

struct FailurePoint {
  double cutoff = 0.0;
  double numerator = 0.0;    // int_eps^{1/e} u^2 r^-1 dr
  double denominator = 0.0;  // int_eps^{1/e} |u'|^2 r dr
  double ratio = 0.0;
  double unweighted_ratio = 0.0;  // int u^2 r^-1 dr / int |u'|^2 dr
};

/// u(r) = ln ln(1/r) on (eps, 1/e), zero beyond 1/e, for each cutoff eps in
/// (0, 1/e). Throws InvalidParams for cutoffs outside that range.
std::vector<FailurePoint> hardy_2d_failure_curve(std::span<const double> cutoffs,
                                                 const QuadratureConfig& quad = {});

}  // namespace stripneg
