#include "stripneg/sl_counter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

SLProblem SLProblem::make(double c, Profile1D M, double truncation, double overall_scale) {
  SLProblem p;
  p.c = c;
  p.M = std::move(M);
  p.truncation = truncation;
  p.singular_start = 1e-6 * truncation;
  p.overall_scale = overall_scale;
  p.validate();
  return p;
}

void SLProblem::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidParams(fmt::format("singular coefficient c must be >= 0, got {}", c));
  }
  if (!(truncation > 0.0)) {
    throw InvalidParams(fmt::format("truncation must be positive, got {}", truncation));
  }
  if (!(overall_scale > 0.0)) {
    throw InvalidParams(fmt::format("overall scale must be positive, got {}", overall_scale));
  }
  if (is_split() && !(singular_start > 0.0 && singular_start < truncation)) {
    throw SingularitySetup(fmt::format("need 0 < delta < L, got delta={} L={}", singular_start,
                                       truncation));
  }
}

double SLProblem::operator_scale() const {
  return overall_scale * std::max(1.0, M.max_value(truncation));
}

namespace {

// Sweeps -w'' + Q(s) w = 0 over [s0, s1] from the unmodified Prufer angle
// theta0 (tan theta = w / w'). Each step freezes Q at the step midpoint and
// advances (w, w') with the exact solution of the frozen equation, so zero
// crossings inside a step are counted exactly for the frozen coefficient.
// Zeros are counted on half-open steps (s_i, s_{i+1}].
template <class Coefficient, class Ceiling>
PruferTrace sweep(Coefficient&& Q, Ceiling&& ceiling, double s0, double s1, double theta0) {
  PruferTrace trace;
  trace.min_step = std::numeric_limits<double>::infinity();
  double w = std::sin(theta0);
  double dw = std::cos(theta0);
  int nodes = 0;
  double s = s0;
  while (s < s1) {
    double h = std::min(ceiling(s, Q(s)), s1 - s);
    h = std::min(h, ceiling(s + 0.5 * h, Q(s + 0.5 * h)));
    if (s1 - s - h < 1e-12 * std::max(1.0, std::abs(s1))) {
      h = s1 - s;
    }
    const double q = Q(s + 0.5 * h);
    double w_new = 0.0;
    double dw_new = 0.0;
    if (q < 0.0) {
      const double k = std::sqrt(-q);
      double phase = std::atan2(w, dw / k);
      // Keep phase in [0, pi) so a zero sitting at the step start is not
      // counted twice.
      if (phase < 0.0 || phase >= std::numbers::pi) {
        phase += phase < 0.0 ? std::numbers::pi : -std::numbers::pi;
        w = -w;
        dw = -dw;
      }
      const double amplitude = std::hypot(w, dw / k);
      const double end = phase + k * h;
      nodes += static_cast<int>(std::floor(end / std::numbers::pi));
      w_new = amplitude * std::sin(end);
      dw_new = amplitude * k * std::cos(end);
    } else if (q > 0.0) {
      const double kappa = std::sqrt(q);
      const double ch = std::cosh(kappa * h);
      const double sh = std::sinh(kappa * h);
      w_new = w * ch + dw / kappa * sh;
      dw_new = w * kappa * sh + dw * ch;
      if (w != 0.0 && (w_new == 0.0 || (w < 0.0) != (w_new < 0.0))) {
        ++nodes;
      }
    } else {
      w_new = w + dw * h;
      dw_new = dw;
      if (w != 0.0 && (w_new == 0.0 || (w < 0.0) != (w_new < 0.0))) {
        ++nodes;
      }
    }
    const double norm = std::hypot(w_new, dw_new);
    w = w_new / norm;
    dw = dw_new / norm;
    s += h;
    ++trace.steps;
    trace.min_step = std::min(trace.min_step, h);
    trace.max_step = std::max(trace.max_step, h);
  }
  double residual = std::atan2(w, dw);
  if (residual < 0.0) {
    residual += std::numbers::pi;
  }
  if (residual >= std::numbers::pi) {
    residual = 0.0;
  }
  trace.node_count = nodes;
  trace.theta_final = nodes * std::numbers::pi + residual;
  return trace;
}

}  // namespace

std::vector<PruferTrace> prufer_traces(const SLProblem& problem, double lambda, double step_scale,
                                       const PruferOptions& options) {
  problem.validate();
  const double level = lambda / problem.overall_scale;
  const double L = problem.truncation;
  const double factor = options.step_factor * step_scale;
  const double max_step = options.max_step * step_scale;

  std::vector<PruferTrace> traces;
  if (!problem.is_split()) {
    auto Q = [&](double x) { return -problem.M(x) - level; };
    auto ceiling = [&](double, double q) {
      return std::min(max_step, factor / std::sqrt(1.0 + std::abs(q)));
    };
    traces.push_back(sweep(Q, ceiling, -L, L, 0.0));
    return traces;
  }

  // Half-lines in s = ln|x| with u = |x|^{1/2} w:
  //   -w'' + [(c + 1/4) - e^{2s} (M(+-e^s) + lambda)] w = 0,
  // whose principal solution starts as w ~ e^{mu s}, mu = sqrt(c + 1/4).
  const double mu = std::sqrt(problem.c + 0.25);
  const double theta0 = std::atan2(1.0, mu);
  const double s0 = std::log(problem.singular_start);
  const double s1 = std::log(L);
  for (double side : {1.0, -1.0}) {
    auto Q = [&, side](double s) {
      const double x = std::exp(s);
      return problem.c + 0.25 - x * x * (problem.M(side * x) + level);
    };
    auto ceiling = [&](double s, double q) {
      const double x = std::exp(s);
      return std::min({max_step / x, factor / std::sqrt(1.0 + std::abs(q)), 0.5 * step_scale});
    };
    traces.push_back(sweep(Q, ceiling, s0, s1, theta0));
  }
  return traces;
}

namespace {

int nodes_at(const SLProblem& problem, double lambda, double step_scale,
             const PruferOptions& options) {
  int total = 0;
  for (const auto& trace : prufer_traces(problem, lambda, step_scale, options)) {
    total += trace.node_count;
  }
  return total;
}

// Estimates for the eigenvalues in [lo, hi) by bisection on a count function.
template <class Count>
std::vector<double> locate_between(Count&& count_below, double lo, double hi, int n_lo, int n_hi) {
  std::vector<double> found;
  for (int index = n_lo; index < n_hi; ++index) {
    double a = lo;
    double b = hi;
    for (int it = 0; it < 60 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (count_below(mid) > index) {
        b = mid;
      } else {
        a = mid;
      }
    }
    found.push_back(0.5 * (a + b));
  }
  return found;
}

}  // namespace

CountResult count_negative_prufer(const SLProblem& problem, double lambda,
                                  const PruferOptions& options) {
  problem.validate();
  const double eps = options.zero_cluster_relative * problem.operator_scale();
  const double level = lambda - eps;

  double scale = 1.0;
  int previous = nodes_at(problem, level, scale, options);
  int refinements = 0;
  for (;;) {
    if (refinements == options.max_refinements) {
      throw NonConvergence(fmt::format(
          "Prufer count still changing after {} halvings (last {} at step scale {})",
          refinements, previous, scale));
    }
    scale *= 0.5;
    ++refinements;
    const int current = nodes_at(problem, level, scale, options);
    if (current == previous) {
      break;
    }
    previous = current;
  }

  CountResult result;
  result.count = previous;
  result.method = "prufer";
  result.resolution = {{"step_factor", options.step_factor * scale},
                       {"max_step", options.max_step * scale},
                       {"refinements", refinements},
                       {"truncation", problem.truncation},
                       {"eps_num", eps}};
  if (problem.is_split()) {
    result.resolution["singular_start"] = problem.singular_start;
  }
  const int upper = nodes_at(problem, lambda, scale, options);
  if (upper > result.count) {
    result.borderline = locate_between(
        [&](double mu) { return nodes_at(problem, mu, scale, options); }, level, lambda,
        result.count, upper);
  }
  return result;
}

std::vector<Tridiagonal> fd_blocks(const SLProblem& problem, int grid_points) {
  problem.validate();
  if (grid_points < 16) {
    throw InvalidParams(fmt::format("need at least 16 grid points, got {}", grid_points));
  }
  const double L = problem.truncation;
  const double scale = problem.overall_scale;
  std::vector<Tridiagonal> blocks;
  if (!problem.is_split()) {
    const int n = grid_points;
    const double h = 2.0 * L / (n + 1);
    Tridiagonal t;
    t.diagonal.resize(static_cast<std::size_t>(n));
    t.off_diagonal.assign(static_cast<std::size_t>(n - 1), -scale / (h * h));
    for (int i = 0; i < n; ++i) {
      const double x = -L + (i + 1) * h;
      t.diagonal[static_cast<std::size_t>(i)] = scale * (2.0 / (h * h) - problem.M(x));
    }
    blocks.push_back(std::move(t));
    return blocks;
  }
  // Dirichlet at x = 0 selects the principal solution at the singular point.
  const int n = grid_points / 2;
  const double h = L / (n + 1);
  for (double side : {1.0, -1.0}) {
    Tridiagonal t;
    t.diagonal.resize(static_cast<std::size_t>(n));
    t.off_diagonal.assign(static_cast<std::size_t>(n - 1), -scale / (h * h));
    for (int i = 0; i < n; ++i) {
      const double x = (i + 1) * h;
      t.diagonal[static_cast<std::size_t>(i)] =
          scale * (2.0 / (h * h) + problem.c / (x * x) - problem.M(side * x));
    }
    blocks.push_back(std::move(t));
  }
  return blocks;
}

CountResult count_negative_inertia_1d(const SLProblem& problem, int grid_points, double lambda,
                                      double zero_cluster_relative) {
  const auto blocks = fd_blocks(problem, grid_points);
  const double eps = zero_cluster_relative * problem.operator_scale();
  auto count_below = [&](double mu) {
    int total = 0;
    for (const auto& block : blocks) {
      total += sturm_count(block, mu);
    }
    return total;
  };
  CountResult result;
  result.count = count_below(lambda - eps);
  result.method = "inertia_1d";
  result.resolution = {{"grid_points", grid_points},
                       {"h", problem.is_split() ? problem.truncation / (grid_points / 2 + 1)
                                                : 2.0 * problem.truncation / (grid_points + 1)},
                       {"truncation", problem.truncation},
                       {"eps_num", eps}};
  const int upper = count_below(lambda);
  if (upper > result.count) {
    result.borderline = locate_between(count_below, lambda - eps, lambda, result.count, upper);
  }
  return result;
}

double eigenvalue_bisect(const SLProblem& problem, int index, std::pair<double, double> bracket,
                         double tol, const PruferOptions& options) {
  if (index < 0) {
    throw InvalidParams("eigenvalue index must be >= 0");
  }
  auto [lo, hi] = bracket;
  if (!(lo < hi)) {
    throw BracketInvalid(fmt::format("empty bracket [{}, {}]", lo, hi));
  }
  auto solve = [&](double step_scale) {
    if (nodes_at(problem, lo, step_scale, options) > index ||
        nodes_at(problem, hi, step_scale, options) <= index) {
      throw BracketInvalid(fmt::format(
          "node count does not pass index {} across [{}, {}]", index, lo, hi));
    }
    double a = lo;
    double b = hi;
    while (b - a > 0.25 * tol) {
      const double mid = 0.5 * (a + b);
      if (nodes_at(problem, mid, step_scale, options) > index) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return 0.5 * (a + b);
  };
  // The frozen-coefficient sweep has O(h^2) eigenvalue error, so successive
  // halvings are combined by Richardson extrapolation.
  double scale = 1.0;
  double previous = solve(scale);
  double previous_extrapolated = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level < 8; ++level) {
    scale *= 0.5;
    const double current = solve(scale);
    const double extrapolated = (4.0 * current - previous) / 3.0;
    if (std::abs(extrapolated - previous_extrapolated) < tol ||
        std::abs(current - previous) < tol) {
      return extrapolated;
    }
    previous = current;
    previous_extrapolated = extrapolated;
  }
  throw NonConvergence(fmt::format("eigenvalue {} did not settle to {}", index, tol));
}

}  // namespace stripneg
