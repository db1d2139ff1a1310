#include "stripneg/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

StripGeometry::StripGeometry(double width) : width_(width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw InvalidParams(fmt::format("strip width must be positive, got {}", width));
  }
}

Potential2D Potential2D::analytic(std::string family, std::map<std::string, double> params,
                                  Function f, std::optional<Interval> support_hint,
                                  std::optional<double> closed_form_norm_x) {
  Potential2D v;
  v.family_ = std::move(family);
  v.params_ = std::move(params);
  v.f_ = std::move(f);
  v.support_ = support_hint;
  v.closed_norm_ = closed_form_norm_x;
  return v;
}

Potential2D Potential2D::sampled(SampledGrid grid) {
  if (grid.x1.size() < 2 || grid.x2.empty()) {
    throw EmptyGrid("sampled potential needs at least two x1 nodes and one x2 node");
  }
  if (grid.values.size() != grid.x1.size() * grid.x2.size()) {
    throw InvalidParams("sampled potential is not a rectangular grid");
  }
  if (!std::is_sorted(grid.x1.begin(), grid.x1.end()) ||
      !std::is_sorted(grid.x2.begin(), grid.x2.end())) {
    throw InvalidParams("sampled potential nodes must be increasing");
  }
  for (double value : grid.values) {
    if (value < 0.0) {
      throw NegativeValue(fmt::format("sampled potential value {} is negative", value));
    }
  }
  Potential2D v;
  v.family_ = "sampled";
  v.support_ = Interval{grid.x1.front(), grid.x1.back()};
  v.grid_ = std::move(grid);
  return v;
}

namespace {

// Index of the cell [nodes[i], nodes[i+1]] containing x, or nullopt outside.
std::optional<std::size_t> locate(std::span<const double> nodes, double x) {
  if (nodes.size() < 2 || x < nodes.front() || x > nodes.back()) {
    return std::nullopt;
  }
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  i = (i == 0) ? 0 : i - 1;
  return std::min(i, nodes.size() - 2);
}

double interpolate(std::span<const double> nodes, std::span<const double> values, double x) {
  const auto cell = locate(nodes, x);
  if (!cell) {
    return 0.0;
  }
  const std::size_t i = *cell;
  const double t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

// V along the x2 nodes of a sampled grid, linearly interpolated in x1.
std::vector<double> grid_column(const SampledGrid& g, double x1) {
  std::vector<double> column(g.x2.size(), 0.0);
  const auto cell = locate(g.x1, x1);
  if (!cell) {
    return column;
  }
  const std::size_t i = *cell;
  const double t = (x1 - g.x1[i]) / (g.x1[i + 1] - g.x1[i]);
  for (std::size_t j = 0; j < g.x2.size(); ++j) {
    column[j] = (1.0 - t) * g.at(i, j) + t * g.at(i + 1, j);
  }
  return column;
}

}  // namespace

double Potential2D::operator()(double x1, double x2) const {
  if (grid_) {
    const auto column = grid_column(*grid_, x1);
    if (grid_->x2.size() == 1) {
      return column.front();
    }
    return interpolate(grid_->x2, column, std::clamp(x2, grid_->x2.front(), grid_->x2.back()));
  }
  if (support_ && (x1 < support_->first || x1 > support_->second)) {
    return 0.0;
  }
  return f_(x1, x2);
}

Profile1D Profile1D::analytic(RealFunction f, VariableRole role, std::optional<Interval> support) {
  Profile1D p;
  p.f_ = std::move(f);
  p.role_ = role;
  p.support_ = support;
  return p;
}

Profile1D Profile1D::sampled(std::vector<double> nodes, std::vector<double> values,
                             VariableRole role) {
  if (nodes.empty()) {
    throw EmptyGrid("profile needs at least one node");
  }
  if (nodes.size() != values.size()) {
    throw InvalidParams("profile nodes and values differ in length");
  }
  if (std::adjacent_find(nodes.begin(), nodes.end(), std::greater_equal<>()) != nodes.end()) {
    throw InvalidParams("profile nodes must be strictly increasing");
  }
  for (double value : values) {
    if (value < 0.0) {
      throw NegativeValue(fmt::format("profile value {} is negative", value));
    }
  }
  Profile1D p;
  p.role_ = role;
  p.support_ = Interval{nodes.front(), nodes.back()};
  p.nodes_ = std::move(nodes);
  p.values_ = std::move(values);
  return p;
}

Profile1D Profile1D::zero(VariableRole role) {
  return analytic([](double) { return 0.0; }, role, Interval{0.0, 0.0});
}

double Profile1D::operator()(double x) const {
  if (!nodes_.empty()) {
    if (nodes_.size() == 1) {
      return x == nodes_.front() ? values_.front() : 0.0;
    }
    return interpolate(nodes_, values_, x);
  }
  if (support_ && (x < support_->first || x > support_->second)) {
    return 0.0;
  }
  return f_(x);
}

Profile1D Profile1D::scaled(double lambda) const {
  if (lambda < 0.0) {
    throw InvalidParams("profiles scale by nonnegative factors only");
  }
  if (!nodes_.empty()) {
    std::vector<double> values = values_;
    for (double& value : values) {
      value *= lambda;
    }
    return sampled(nodes_, std::move(values), role_);
  }
  auto f = f_;
  return analytic([f, lambda](double x) { return lambda * f(x); }, role_, support_);
}

double Profile1D::max_value(double probe_half_width) const {
  if (!nodes_.empty()) {
    return *std::max_element(values_.begin(), values_.end());
  }
  double lo = -probe_half_width;
  double hi = probe_half_width;
  if (support_) {
    lo = support_->first;
    hi = support_->second;
  } else if (role_ == VariableRole::radial) {
    lo = 0.0;
  }
  constexpr int kProbe = 20001;
  double best = 0.0;
  for (int i = 0; i < kProbe; ++i) {
    best = std::max(best, (*this)(lo + (hi - lo) * i / (kProbe - 1)));
  }
  return best;
}

namespace {

double dyadic_width_max(const Potential2D& v, double x1, double width, double rel_tol) {
  constexpr int kFirstLevel = 3;
  constexpr int kLastLevel = 20;
  double previous = -std::numeric_limits<double>::infinity();
  double current = 0.0;
  for (int level = kFirstLevel; level <= kLastLevel; ++level) {
    const long samples = 1L << level;
    current = -std::numeric_limits<double>::infinity();
    for (long j = 0; j <= samples; ++j) {
      const double value = v(x1, width * static_cast<double>(j) / static_cast<double>(samples));
      if (value < 0.0) {
        throw NegativeValue(fmt::format("V({}, {}) = {} is negative", x1,
                                        width * static_cast<double>(j) / samples, value));
      }
      current = std::max(current, value);
    }
    if (std::abs(current - previous) <= rel_tol * std::max(std::abs(current), 1e-300)) {
      return current;
    }
    previous = current;
  }
  return current;
}

}  // namespace

Profile1D sup_over_width(const Potential2D& v, const StripGeometry& geometry,
                         std::span<const double> x1_grid, const QuadratureConfig& quad) {
  if (x1_grid.empty()) {
    throw EmptyGrid("x1 grid is empty");
  }
  std::vector<double> nodes(x1_grid.begin(), x1_grid.end());
  std::vector<double> values(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw InvalidParams("x1 grid must be strictly increasing");
    }
    if (v.grid()) {
      // The bilinear interpolant attains its x2-maximum on an x2 node.
      const auto column = grid_column(*v.grid(), nodes[i]);
      values[i] = *std::max_element(column.begin(), column.end());
    } else {
      values[i] = dyadic_width_max(v, nodes[i], geometry.width(), quad.relative_tolerance);
    }
  }
  return Profile1D::sampled(std::move(nodes), std::move(values), VariableRole::line);
}

double norm_x(const Profile1D& w, const QuadratureConfig& quad) {
  if (w.role() != VariableRole::line) {
    throw InvalidParams("norm_x needs a profile over the line coordinate");
  }
  if (w.is_sampled()) {
    // Exact integral of the piecewise-linear interpolant.
    const auto x = w.nodes();
    const auto y = w.values();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      total += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    }
    return total;
  }
  const double value =
      integrate_line([&w](double x) { return w(x); }, w.support(), quad).value;
  return std::max(value, 0.0);
}

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double required(const std::map<std::string, double>& params, const std::string& family,
                const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw InvalidParams(fmt::format("{} needs parameter '{}'", family, key));
  }
  return it->second;
}

void reject_unknown(const std::map<std::string, double>& params, const std::string& family,
                    std::initializer_list<const char*> known) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : params) {
    if (!allowed.contains(key)) {
      throw InvalidParams(fmt::format("{} has no parameter '{}'", family, key));
    }
    if (!std::isfinite(value)) {
      throw InvalidParams(fmt::format("{}.{} is not finite", family, key));
    }
  }
}

void require_nonnegative(double value, const std::string& what) {
  if (value < 0.0) {
    throw InvalidParams(fmt::format("{} must be nonnegative, got {}", what, value));
  }
}

void require_positive(double value, const std::string& what) {
  if (!(value > 0.0)) {
    throw InvalidParams(fmt::format("{} must be positive, got {}", what, value));
  }
}

}  // namespace

Potential2D builtin_family(const std::string& name, const std::map<std::string, double>& params) {
  constexpr double sqrt_pi = 1.7724538509055160273;
  if (name == "gaussian_ridge") {
    reject_unknown(params, name, {"amplitude", "sigma", "center"});
    const double a = required(params, name, "amplitude");
    const double sigma = required(params, name, "sigma");
    const double c = param_or(params, "center", 0.0);
    require_nonnegative(a, "gaussian_ridge amplitude");
    require_positive(sigma, "gaussian_ridge sigma");
    auto f = [a, sigma, c](double x1, double) {
      const double s = (x1 - c) / sigma;
      return a * std::exp(-s * s);
    };
    return Potential2D::analytic(name, params, f, std::nullopt, a * sigma * sqrt_pi);
  }
  if (name == "square_patch") {
    reject_unknown(params, name, {"amplitude", "x1_min", "x1_max", "x2_min", "x2_max"});
    const double a = required(params, name, "amplitude");
    const double lo = required(params, name, "x1_min");
    const double hi = required(params, name, "x1_max");
    const double y_lo = param_or(params, "x2_min", -std::numeric_limits<double>::infinity());
    const double y_hi = param_or(params, "x2_max", std::numeric_limits<double>::infinity());
    require_nonnegative(a, "square_patch amplitude");
    if (!(hi > lo)) {
      throw InvalidParams("square_patch needs x1_min < x1_max");
    }
    if (!(y_hi > y_lo)) {
      throw InvalidParams("square_patch needs x2_min < x2_max");
    }
    auto f = [a, y_lo, y_hi](double, double x2) { return (x2 >= y_lo && x2 <= y_hi) ? a : 0.0; };
    // The closed form assumes the x2 window meets the strip.
    return Potential2D::analytic(name, params, f, Interval{lo, hi}, a * (hi - lo));
  }
  if (name == "sech2_ridge") {
    reject_unknown(params, name, {"depth", "scale", "center"});
    const double depth = required(params, name, "depth");
    const double scale = param_or(params, "scale", 1.0);
    const double c = param_or(params, "center", 0.0);
    require_nonnegative(depth, "sech2_ridge depth");
    require_positive(scale, "sech2_ridge scale");
    auto f = [depth, scale, c](double x1, double) {
      const double s = 1.0 / std::cosh((x1 - c) / scale);
      return depth * s * s;
    };
    return Potential2D::analytic(name, params, f, std::nullopt, 2.0 * depth * scale);
  }
  if (name == "separable_product") {
    reject_unknown(params, name, {"amplitude", "sigma", "slope", "width", "center"});
    const double a = required(params, name, "amplitude");
    const double sigma = param_or(params, "sigma", 1.0);
    const double slope = param_or(params, "slope", 1.0);
    const double width = param_or(params, "width", 1.0);
    const double c = param_or(params, "center", 0.0);
    require_nonnegative(a, "separable_product amplitude");
    require_positive(sigma, "separable_product sigma");
    require_nonnegative(slope, "separable_product slope");
    require_positive(width, "separable_product width");
    auto f = [a, sigma, slope, width, c](double x1, double x2) {
      const double s = (x1 - c) / sigma;
      return a * std::exp(-s * s) * (1.0 + slope * std::clamp(x2, 0.0, width) / width);
    };
    // max over x2 in [0, width] sits at x2 = width.
    return Potential2D::analytic(name, params, f, std::nullopt,
                                 a * (1.0 + slope) * sigma * sqrt_pi);
  }
  throw UnknownFamily(fmt::format("'{}' (known: gaussian_ridge, square_patch, sech2_ridge, "
                                  "separable_product)",
                                  name));
}

Potential2D load_potential_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open potential CSV '{}'", path.string()));
  }
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "x1,x2,value") {
    throw ConfigError(fmt::format("potential CSV '{}' must start with header x1,x2,value",
                                  path.string()));
  }
  std::map<double, std::map<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x1 = 0.0, x2 = 0.0, value = 0.0;
    if (!(fields >> x1 >> x2 >> value)) {
      throw ConfigError(fmt::format("{}:{}: expected three numbers", path.string(), line_no));
    }
    rows[x1][x2] = value;
  }
  SampledGrid grid;
  for (const auto& [x1, column] : rows) {
    grid.x1.push_back(x1);
    if (grid.x2.empty()) {
      for (const auto& [x2, value] : column) {
        grid.x2.push_back(x2);
      }
    }
    if (column.size() != grid.x2.size()) {
      throw InvalidParams(fmt::format("{}: row x1={} has {} samples, expected {}",
                                      path.string(), x1, column.size(), grid.x2.size()));
    }
    std::size_t j = 0;
    for (const auto& [x2, value] : column) {
      if (x2 != grid.x2[j++]) {
        throw InvalidParams(fmt::format("{}: x2 nodes differ between rows", path.string()));
      }
      grid.values.push_back(value);
    }
  }
  return Potential2D::sampled(std::move(grid));
}

std::vector<double> uniform_grid(double extent, int points) {
  if (points < 2 || !(extent > 0.0)) {
    throw InvalidParams("uniform grid needs extent > 0 and at least two points");
  }
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    x[static_cast<std::size_t>(i)] = -extent + 2.0 * extent * i / (points - 1);
  }
  return x;
}

}  // namespace stripneg
