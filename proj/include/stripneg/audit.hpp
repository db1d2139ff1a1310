#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stripneg/bounds.hpp"
#include "stripneg/modes.hpp"
#include "stripneg/potential.hpp"

namespace stripneg {

struct AuditConfig {
  ModeCountConfig counting;
  QuadratureConfig quad;
  /// W is sampled on x1_points uniform nodes of [-x1_extent, x1_extent].
  double x1_extent = 20.0;
  int x1_points = 4001;
  /// Also count the reduced operator tau(k) on the half-lines.
  bool tau_counts = false;
};

struct AuditError {
  std::string name;
  std::string message;
  bool numerical = false;
};

struct AuditRow {
  double psi = 0.0;
  double phi = 0.0;
  double norm_x = 0.0;
  double bound_value = 0.0;
  std::vector<int> retained_modes;
  std::vector<int> audited_modes;
  std::map<int, int> per_mode_count;
  int total_count = 0;
  // Prufer total over the audited modes with the truncation doubled; a
  // Dirichlet cut can only lose bound states, so this is >= total_count.
  int doubled_truncation_count = 0;
  std::map<int, double> per_mode_bargmann;
  bool satisfied_main = true;
  std::map<int, bool> satisfied_per_mode;
  std::optional<std::map<int, int>> per_mode_tau_count;
  std::vector<double> borderline;
  std::string notes;
  std::optional<AuditError> error;
};

struct WindowCount {
  std::vector<int> modes;
  std::map<int, ModeCount> per_mode;
  int total = 0;

  std::vector<double> borderline(int k) const;
};

/// Counts fiber by fiber in levels {n, -n-1}, n = 0, 1, ..., stopping once
/// two consecutive levels carry no negative eigenvalue and at least
/// `min_modes` fibers were counted. A level's two fibers run concurrently
/// when config.counting.workers > 1.
WindowCount count_extended_window(const FluxSpec& flux, const Profile1D& w,
                                  const AuditConfig& config, std::size_t min_modes = 0);

/// Compares Neg of the strip operator, summed over an extended window of
/// fibers, with the strip estimate. The window runs past the retained modes
/// until two consecutive levels {n, -n-1} carry no negative eigenvalue.
/// Both fiber counters must agree; otherwise CounterDisagreement is thrown.
AuditRow audit_strip(const FluxSpec& flux, const Potential2D& v, const StripGeometry& geometry,
                     const AuditConfig& config = {});

/// Same, starting from a precomputed W profile.
AuditRow audit_strip_profile(const FluxSpec& flux, const Profile1D& w,
                             const AuditConfig& config = {});

/// audit_strip with failures recorded in the row instead of thrown.
AuditRow audit_strip_row(const FluxSpec& flux, const Profile1D& w, const AuditConfig& config = {});

/// Rows for each psi, sorted by phi (stable in psi order).
std::vector<AuditRow> flux_sweep(std::span<const double> psi_values, const Potential2D& v,
                                 const StripGeometry& geometry, const AuditConfig& config = {});

struct BargmannRow {
  double c = 0.0;
  double integral_m = 0.0;
  int count = 0;
  double rhs = 0.0;
  bool satisfied = true;
};

struct BargmannReport {
  std::vector<BargmannRow> rows;
  double satisfied_fraction = 1.0;
};

/// Neg(-d^2/dx^2 + c/x^2 - M) against int M / sqrt(4c + 1) per instance.
/// Reports n <= rhs; nothing is asserted.
BargmannReport audit_bargmann_family(std::span<const SLProblem> instances,
                                     const QuadratureConfig& quad = {},
                                     const PruferOptions& options = {});

}  // namespace stripneg
