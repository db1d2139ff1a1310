#pragma once

#include <map>
#include <span>
#include <string>

#include "stripneg/modes.hpp"
#include "stripneg/potential.hpp"

namespace stripneg {

/// Closed-form bound value with its terms. Only terms >= 1 are kept: a term
/// exactly equal to 1 counts, since the primed sum drops terms below one.
struct BoundResult {
  double value = 0.0;
  std::map<int, double> per_mode_terms;  // retained terms only
  int omitted_below_one = 0;
  std::string formula;
};

/// integral_M / sqrt(4c + 1).
double bargmann_rhs(double c, double integral_M);

/// normX / sqrt(16 (k+phi)^2 + 1) for a single mode.
double strip_term(int k, double phi, double norm_x);

/// Primed sum over k of strip_term, enumerated by increasing (k+phi)^2 until
/// the first level whose terms fall below one. Throws IntegerFlux.
BoundResult strip_clr_bound(const FluxSpec& flux, double norm_x);

/// Primed sum over m of I / (2 |m + total_flux|), I = integral of Q(r) r dr.
/// Throws IntegerFlux when total_flux is an integer.
BoundResult disk_bound_bel(double total_flux, double radial_integral);
BoundResult disk_bound_bel(double total_flux, const Profile1D& radial_profile,
                           const QuadratureConfig& quad = {});

/// strip_term for every k in the window, retained or not.
std::map<int, double> per_mode_bargmann_terms(const FluxSpec& flux, double norm_x,
                                              std::span<const int> window);

}  // namespace stripneg
