#include "stripneg/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

namespace {

// C-infinity bump exp(-1 / (1 - s^2)) on |s| < 1 and its derivative in s.
double bump(double s) {
  if (std::abs(s) >= 1.0) {
    return 0.0;
  }
  return std::exp(-1.0 / (1.0 - s * s));
}

double bump_slope(double s) {
  if (std::abs(s) >= 1.0) {
    return 0.0;
  }
  const double g = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (g * g));
}

// Smooth step from 1 (t <= 0) to 0 (t >= 1).
double window(double t) {
  if (t <= 0.0) {
    return 1.0;
  }
  if (t >= 1.0) {
    return 0.0;
  }
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return b / (a + b);
}

double window_slope(double t) {
  if (t <= 0.0 || t >= 1.0) {
    return 0.0;
  }
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double da = a / (t * t);
  const double db = -b / ((1.0 - t) * (1.0 - t));
  return (db * (a + b) - b * (da + db)) / ((a + b) * (a + b));
}

double integrate_pieces(const RealFunction& f, double a, double b,
                        const std::vector<double>& breakpoints, const QuadratureConfig& quad) {
  double total = 0.0;
  double left = a;
  for (double point : breakpoints) {
    if (point > left && point < b) {
      total += integrate(f, left, point, quad).value;
      left = point;
    }
  }
  return total + integrate(f, left, b, quad).value;
}

}  // namespace

TestFunction make_test_function(const TestFunctionSpec& spec) {
  using Kind = TestFunctionSpec::Kind;
  if (spec.kind == Kind::explicit_function) {
    if (!spec.explicit_function) {
      throw InvalidParams("explicit test function spec carries no function");
    }
    return *spec.explicit_function;
  }
  const auto [lo, hi] = spec.support;
  if (!(hi > lo) || lo < 0.0) {
    throw InvalidParams(fmt::format("test function support [{}, {}] is invalid", lo, hi));
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (spec.kind == Kind::polynomial_decay) {
    // (1 + x)^-beta, switched on smoothly over the first 10% of the support
    // and off over its second half.
    const double beta = spec.decay_exponent;
    const double amplitude = 0.5 + unit(rng);
    const double rise = 0.1 * (hi - lo);
    const double mid = 0.5 * (lo + hi);
    const double fall = hi - mid;
    TestFunction f;
    f.support = spec.support;
    f.breakpoints = {lo + rise, mid};
    f.value = [=](double x) {
      if (x <= lo || x >= hi) {
        return 0.0;
      }
      const double on = 1.0 - window((x - lo) / rise);
      return amplitude * std::pow(1.0 + x, -beta) * on * window((x - mid) / fall);
    };
    f.derivative = [=](double x) {
      if (x <= lo || x >= hi) {
        return 0.0;
      }
      const double base = amplitude * std::pow(1.0 + x, -beta);
      const double dbase = -beta * base / (1.0 + x);
      const double on = 1.0 - window((x - lo) / rise);
      const double don = -window_slope((x - lo) / rise) / rise;
      const double off = window((x - mid) / fall);
      const double doff = window_slope((x - mid) / fall) / fall;
      return dbase * on * off + base * don * off + base * on * doff;
    };
    return f;
  }

  const int span = std::max(0, spec.max_bumps - spec.min_bumps);
  const int count = spec.min_bumps + static_cast<int>(unit(rng) * (span + 1)) % (span + 1);
  struct Bump {
    double centre, half_width, weight;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < count; ++i) {
    const double half_width = (0.05 + 0.2 * unit(rng)) * (hi - lo);
    const double centre = lo + half_width + unit(rng) * std::max(0.0, hi - lo - 2.0 * half_width);
    bumps.push_back({centre, half_width, 0.2 + 2.0 * unit(rng)});
  }
  TestFunction f;
  f.support = spec.support;
  for (const auto& b : bumps) {
    f.breakpoints.push_back(b.centre - b.half_width);
    f.breakpoints.push_back(b.centre + b.half_width);
  }
  std::sort(f.breakpoints.begin(), f.breakpoints.end());
  f.value = [bumps](double x) {
    double sum = 0.0;
    for (const auto& b : bumps) {
      sum += b.weight * bump((x - b.centre) / b.half_width);
    }
    return sum;
  };
  f.derivative = [bumps](double x) {
    double sum = 0.0;
    for (const auto& b : bumps) {
      sum += b.weight * bump_slope((x - b.centre) / b.half_width) / b.half_width;
    }
    return sum;
  };
  return f;
}

RatioReport hardy_1d_ratio(const TestFunctionSpec& spec, double p, const QuadratureConfig& quad) {
  if (!(p > 1.0)) {
    throw InvalidParams(fmt::format("Hardy exponent must exceed 1, got {}", p));
  }
  const TestFunction f = make_test_function(spec);
  const double lo = std::max(0.0, f.support.first);
  const double hi = f.support.second;
  if (!std::isfinite(hi)) {
    throw InvalidParams("hardy_1d_ratio needs compactly supported test functions");
  }
  std::vector<double> breaks = f.breakpoints;
  breaks.push_back(lo);
  std::sort(breaks.begin(), breaks.end());

  RatioReport report;
  report.admissible_constant = std::pow(p / (p - 1.0), p);
  for (double x : breaks) {
    if (f.value(std::nextafter(x, hi)) < 0.0) {
      throw NegativeValue("Hardy test functions must be nonnegative");
    }
  }
  report.rhs = integrate_pieces([&](double x) { return std::pow(std::abs(f.value(x)), p); }, lo,
                                hi, breaks, quad);
  if (report.rhs == 0.0) {
    report.ratio = 0.0;
    report.satisfied = true;
    return report;
  }
  // The outer rule differentiates F implicitly; an inner result that jitters
  // at the outer tolerance stalls its error estimate.
  QuadratureConfig inner_quad = quad;
  inner_quad.absolute_tolerance = std::min(quad.absolute_tolerance, 1e-13);
  inner_quad.relative_tolerance = std::min(quad.relative_tolerance, 1e-12);
  auto F = [&](double x) { return integrate_pieces(f.value, 0.0, x, breaks, inner_quad); };
  const double inner = integrate_pieces(
      [&](double x) { return std::pow(F(x) / x, p); }, 0.0, hi, breaks, quad);
  // Beyond the support F is constant: int_hi^inf (F/x)^p = F^p hi^{1-p} / (p-1).
  const double total = F(hi);
  const double tail = std::pow(total, p) * std::pow(hi, 1.0 - p) / (p - 1.0);
  report.lhs = inner + tail;
  report.ratio = report.lhs / report.rhs;
  report.satisfied =
      report.lhs <= report.admissible_constant * report.rhs + quad.absolute_tolerance +
                        quad.relative_tolerance * report.lhs;
  return report;
}

RatioReport magnetic_hardy_mode_ratio(const TestFunctionSpec& spec, int m, double alpha,
                                      const QuadratureConfig& quad) {
  const double distance = std::abs(alpha - std::round(alpha));
  if (distance <= 1e-12) {
    throw IntegerFlux(fmt::format("alpha = {} is an integer; no magnetic Hardy constant", alpha));
  }
  const TestFunction u = make_test_function(spec);
  const double lo = std::max(0.0, u.support.first);
  const double hi = u.support.second;
  const double shifted = m + alpha;

  RatioReport report;
  report.admissible_constant = 1.0 / (distance * distance);
  report.lhs = integrate_pieces(
      [&](double r) {
        const double v = u.value(r);
        return v * v / r;
      },
      lo, hi, u.breakpoints, quad);
  report.rhs = integrate_pieces(
      [&](double r) {
        const double v = u.value(r);
        const double dv = u.derivative(r);
        return (dv * dv + shifted * shifted * v * v / (r * r)) * r;
      },
      lo, hi, u.breakpoints, quad);
  if (report.rhs == 0.0) {
    report.ratio = 0.0;
    report.satisfied = report.lhs == 0.0;
    return report;
  }
  report.ratio = report.lhs / report.rhs;
  report.satisfied =
      report.lhs <= report.admissible_constant * report.rhs + quad.absolute_tolerance +
                        quad.relative_tolerance * report.lhs;
  return report;
}

std::vector<FailurePoint> hardy_2d_failure_curve(std::span<const double> cutoffs,
                                                 const QuadratureConfig& quad) {
  const double edge = std::exp(-1.0);
  auto u = [](double r) { return std::log(std::log(1.0 / r)); };
  auto du = [](double r) { return -1.0 / (r * std::log(1.0 / r)); };
  std::vector<FailurePoint> curve;
  for (double eps : cutoffs) {
    if (!(eps > 0.0 && eps < edge)) {
      throw InvalidParams(fmt::format("cutoff {} is outside (0, 1/e)", eps));
    }
    // One panel per decade keeps each Gauss-Kronrod panel well scaled.
    std::vector<double> breaks;
    for (double r = 0.1; r > eps; r *= 0.1) {
      breaks.push_back(r);
    }
    std::sort(breaks.begin(), breaks.end());
    FailurePoint point;
    point.cutoff = eps;
    point.numerator = integrate_pieces(
        [&](double r) {
          const double v = u(r);
          return v * v / r;
        },
        eps, edge, breaks, quad);
    point.denominator = integrate_pieces(
        [&](double r) {
          const double d = du(r);
          return d * d * r;
        },
        eps, edge, breaks, quad);
    const double plain = integrate_pieces(
        [&](double r) {
          const double d = du(r);
          return d * d;
        },
        eps, edge, breaks, quad);
    point.ratio = point.numerator / point.denominator;
    point.unweighted_ratio = point.numerator / plain;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace stripneg
