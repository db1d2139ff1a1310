#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stripneg/quadrature.hpp"

namespace stripneg {

/// Straight strip of constant width d, x2 in [0, d].
class StripGeometry {
 public:
  explicit StripGeometry(double width);
  double width() const noexcept { return width_; }

 private:
  double width_;
};

using Interval = std::pair<double, double>;

/// Rectangular sample grid of a potential over (x1, x2). Values are stored
/// row-major with x2 fastest.
struct SampledGrid {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> values;

  double at(std::size_t i1, std::size_t i2) const { return values[i1 * x2.size() + i2]; }
};

/// Nonnegative electric potential V(x1, x2) on the strip, either an analytic
/// family or a sampled grid. Outside `support_hint` (when present) V is zero.
class Potential2D {
 public:
  using Function = std::function<double(double, double)>;

  static Potential2D analytic(std::string family, std::map<std::string, double> params,
                              Function f, std::optional<Interval> support_hint,
                              std::optional<double> closed_form_norm_x);
  static Potential2D sampled(SampledGrid grid);

  double operator()(double x1, double x2) const;

  bool is_sampled() const noexcept { return grid_.has_value(); }
  const std::string& family() const noexcept { return family_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  const std::optional<Interval>& support_hint() const noexcept { return support_; }
  /// ||V||_X in closed form, for families where one is known.
  const std::optional<double>& closed_form_norm_x() const noexcept { return closed_norm_; }
  const std::optional<SampledGrid>& grid() const noexcept { return grid_; }

 private:
  Potential2D() = default;

  std::string family_;
  std::map<std::string, double> params_;
  Function f_;
  std::optional<Interval> support_;
  std::optional<double> closed_norm_;
  std::optional<SampledGrid> grid_;
};

enum class VariableRole { line, radial };

/// One-dimensional nonnegative profile: the width-wise supremum W(x1) on the
/// line, or a radial profile Q(r). Sampled profiles interpolate linearly
/// between nodes and vanish outside the sampled range.
class Profile1D {
 public:
  static Profile1D analytic(RealFunction f, VariableRole role,
                            std::optional<Interval> support = std::nullopt);
  static Profile1D sampled(std::vector<double> nodes, std::vector<double> values,
                           VariableRole role);
  static Profile1D zero(VariableRole role = VariableRole::line);

  double operator()(double x) const;

  VariableRole role() const noexcept { return role_; }
  bool is_sampled() const noexcept { return !nodes_.empty(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::optional<Interval>& support() const noexcept { return support_; }

  /// Pointwise lambda * W.
  Profile1D scaled(double lambda) const;
  /// Largest value over the sample nodes, or over a dense probe of the
  /// support for analytic profiles.
  double max_value(double probe_half_width = 50.0) const;

 private:
  Profile1D() = default;

  VariableRole role_ = VariableRole::line;
  RealFunction f_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::optional<Interval> support_;
};

/// W(x1) = max over x2 in [0, d] of V(x1, x2) on a dyadically refined x2
/// sample; refinement stops once successive maxima agree to
/// quad.relative_tolerance. Returns a sampled profile on x1_grid.
Profile1D sup_over_width(const Potential2D& v, const StripGeometry& geometry,
                         std::span<const double> x1_grid, const QuadratureConfig& quad = {});

/// ||W||_X = integral of W over the real line.
double norm_x(const Profile1D& w, const QuadratureConfig& quad = {});

/// Families: gaussian_ridge {amplitude, sigma, center},
/// square_patch {amplitude, x1_min, x1_max, x2_min, x2_max},
/// sech2_ridge {depth, scale, center},
/// separable_product {amplitude, sigma, slope, width}.
/// Missing optional parameters take documented defaults (see README).
Potential2D builtin_family(const std::string& name, const std::map<std::string, double>& params);

/// Reads a CSV with header `x1,x2,value` describing a rectangular grid.
Potential2D load_potential_csv(const std::filesystem::path& path);

/// Uniform grid of `points` nodes on [-extent, extent].
std::vector<double> uniform_grid(double extent, int points);

}  // namespace stripneg
