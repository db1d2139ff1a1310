#include "stripneg/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

void QuadratureConfig::validate() const {
  if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0)) {
    throw InvalidParams("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw InvalidParams("max_subdivisions must be at least 1");
  }
}

namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule on [a, b].
Panel gauss_kronrod_panel(const RealFunction& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& nodes = Kronrod::abscissa();
  const auto& kronrod_weights = Kronrod::weights();
  const auto& gauss_weights = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double centre = f(mid);
  double kronrod = kronrod_weights[0] * centre;
  double gauss = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double pair = f(mid - half * nodes[i]) + f(mid + half * nodes[i]);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 0) {
      gauss += gauss_weights[i / 2] * pair;
    }
  }
  gauss += gauss_weights[0] * centre;
  const double value = half * kronrod;
  const double error = std::max(std::abs(half * (kronrod - gauss)),
                                50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, error};
}

}  // namespace

QuadratureValue integrate(const RealFunction& f, double a, double b,
                          const QuadratureConfig& quad) {
  quad.validate();
  if (a == b) {
    return {};
  }
  if (b < a) {
    const QuadratureValue flipped = integrate(f, b, a, quad);
    return {-flipped.value, flipped.error_estimate};
  }
  if (std::isinf(b)) {
    // x = a + t / (1 - t) maps [0, 1) onto [a, inf).
    const RealFunction mapped = [&](double t) {
      const double s = 1.0 - t;
      return f(a + t / s) / (s * s);
    };
    return integrate(mapped, 0.0, 1.0, quad);
  }
  // Global adaptive bisection: always split the panel with the largest error.
  std::priority_queue<Panel> panels;
  panels.push(gauss_kronrod_panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  int subdivisions = 1;
  auto allowed = [&] {
    return std::max(quad.absolute_tolerance, quad.relative_tolerance * std::abs(value));
  };
  while (error > allowed() && subdivisions < quad.max_subdivisions) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      break;
    }
    const Panel left = gauss_kronrod_panel(f, worst.a, mid);
    const Panel right = gauss_kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the rounding of the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  if (!std::isfinite(value) || error > allowed()) {
    throw QuadratureFailure(fmt::format(
        "integral over [{}, {}] has error estimate {:.3e} above {:.3e} after {} subdivisions",
        a, b, error, allowed(), subdivisions));
  }
  return {value, error};
}

QuadratureValue integrate_line(const RealFunction& f,
                               std::optional<std::pair<double, double>> support,
                               const QuadratureConfig& quad, double initial_half_width) {
  if (support) {
    return integrate(f, support->first, support->second, quad);
  }
  double half = initial_half_width;
  QuadratureValue total = integrate(f, -half, half, quad);
  for (int doubling = 0; doubling < 40; ++doubling) {
    const QuadratureValue left = integrate(f, -2.0 * half, -half, quad);
    const QuadratureValue right = integrate(f, half, 2.0 * half, quad);
    total.value += left.value + right.value;
    total.error_estimate += left.error_estimate + right.error_estimate;
    half *= 2.0;
    if (std::abs(left.value) + std::abs(right.value) < quad.absolute_tolerance) {
      return total;
    }
  }
  throw QuadratureFailure("tail contribution did not decay; widen truncation or loosen tolerance");
}

}  // namespace stripneg
