#include "stripneg/bounds.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

double bargmann_rhs(double c, double integral_M) {
  if (c < 0.0 || integral_M < 0.0) {
    throw InvalidParams(fmt::format("bargmann_rhs needs c >= 0 and integral >= 0 (c={}, I={})", c,
                                    integral_M));
  }
  return integral_M / std::sqrt(4.0 * c + 1.0);
}

double strip_term(int k, double phi, double norm_x) {
  const double shifted = k + phi;
  return norm_x / std::sqrt(16.0 * shifted * shifted + 1.0);
}

BoundResult strip_clr_bound(const FluxSpec& flux, double norm_x) {
  if (flux.is_integer_flux) {
    throw IntegerFlux(fmt::format(
        "psi = {} is an integer; the strip estimate holds only for non-integer flux", flux.psi));
  }
  if (norm_x < 0.0 || !std::isfinite(norm_x)) {
    throw InvalidParams(fmt::format("normX must be finite and nonnegative, got {}", norm_x));
  }
  BoundResult result;
  result.formula = "strip_clr";
  // Level n holds k = n and k = -n-1 with |k+phi| = n+phi and n+1-phi.
  // Terms decrease with |k+phi|, so the first term below one ends the sum;
  // its tie partner at phi = 1/2 is dropped with it.
  double cutoff = std::numeric_limits<double>::infinity();
  for (int k : modes_by_level(flux.phi, static_cast<int>(norm_x / 4.0) + 3)) {
    const double distance = std::abs(k + flux.phi);
    if (distance > cutoff) {
      break;
    }
    const double term = strip_term(k, flux.phi, norm_x);
    if (term >= 1.0 && distance < cutoff) {
      result.per_mode_terms[k] = term;
      result.value += term;
    } else {
      ++result.omitted_below_one;
      cutoff = distance;
    }
  }
  return result;
}

BoundResult disk_bound_bel(double total_flux, double radial_integral) {
  if (!std::isfinite(total_flux) || std::abs(total_flux - std::round(total_flux)) <= kIntegerFluxTolerance) {
    throw IntegerFlux(fmt::format("total flux {} is an integer", total_flux));
  }
  if (radial_integral < 0.0 || !std::isfinite(radial_integral)) {
    throw InvalidParams(fmt::format("radial integral must be nonnegative, got {}", radial_integral));
  }
  BoundResult result;
  result.formula = "disk_bel";
  // m + flux ordered by distance from zero: walk outward from the nearest
  // integers on both sides.
  const int below = static_cast<int>(std::floor(-total_flux));  // m with m + flux < 0, nearest
  int up = below + 1;
  int down = below;
  double cutoff = std::numeric_limits<double>::infinity();
  for (;;) {
    const double du = std::abs(up + total_flux);
    const double dd = std::abs(down + total_flux);
    const bool take_up = du <= dd;
    const int m = take_up ? up : down;
    const double distance = take_up ? du : dd;
    if (distance > cutoff) {
      break;
    }
    const double term = radial_integral / (2.0 * distance);
    if (term >= 1.0 && distance < cutoff) {
      result.per_mode_terms[m] = term;
      result.value += term;
    } else {
      ++result.omitted_below_one;
      cutoff = distance;
    }
    if (take_up) {
      ++up;
    } else {
      --down;
    }
  }
  return result;
}

BoundResult disk_bound_bel(double total_flux, const Profile1D& radial_profile,
                           const QuadratureConfig& quad) {
  if (radial_profile.role() != VariableRole::radial) {
    throw InvalidParams("disk bound needs a radial profile Q(r)");
  }
  double upper = std::numeric_limits<double>::infinity();
  double lower = 0.0;
  if (radial_profile.support()) {
    lower = std::max(0.0, radial_profile.support()->first);
    upper = radial_profile.support()->second;
  }
  const double integral =
      integrate([&](double r) { return radial_profile(r) * r; }, lower, upper, quad).value;
  return disk_bound_bel(total_flux, std::max(integral, 0.0));
}

std::map<int, double> per_mode_bargmann_terms(const FluxSpec& flux, double norm_x,
                                              std::span<const int> window) {
  std::map<int, double> terms;
  for (int k : window) {
    terms[k] = strip_term(k, flux.phi, norm_x);
  }
  return terms;
}

}  // namespace stripneg
