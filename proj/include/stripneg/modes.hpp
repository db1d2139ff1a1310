#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stripneg/potential.hpp"
#include "stripneg/sl_counter.hpp"
#include "stripneg/sl_problem.hpp"

namespace stripneg {

/// Total flux psi and reduced flux phi = min_k |psi - k| in [0, 1/2].
struct FluxSpec {
  double psi = 0.0;
  double phi = 0.0;
  bool is_integer_flux = true;
};

/// Flux within this distance of an integer counts as integer flux.
inline constexpr double kIntegerFluxTolerance = 1e-12;

FluxSpec reduced_flux(double psi);

/// Fiber H_k = -d^2/dx1^2 + (2 phi / i) d/dx1 + (k + phi)^2 - W.
struct ModeOperator {
  int k = 0;
  double phi = 0.0;
  Profile1D profile = Profile1D::zero();
  double transverse_energy = 0.0;

  /// (k + phi)^2 - phi^2: after removing the first-order term by the gauge
  /// factor e^{-i phi x1}, H_k = -d^2/dx1^2 + offset - W.
  double gauge_offset() const noexcept { return transverse_energy - phi * phi; }
};

ModeOperator build_mode_operator(int k, const FluxSpec& flux, Profile1D W);

/// tau(k) = 1/4 ( -d^2/dx1^2 + 4(k+phi)^2 / x1^2 - 4W ).
SLProblem reduce_to_sl(const ModeOperator& mode, double truncation);

/// Mode indices ordered by |k + phi| ascending; ties (phi = 1/2) list the
/// larger k first.
std::vector<int> modes_by_level(double phi, int levels);

/// The k whose bound term normX / sqrt(16 (k+phi)^2 + 1) is >= 1, ordered by
/// |k + phi|. Throws IntegerFlux for integer flux.
std::vector<int> mode_window(const FluxSpec& flux, double norm_x);

struct ModeCountConfig {
  double truncation = 20.0;
  PruferOptions prufer;
  bool use_prufer = true;
  bool use_lattice = true;
  /// Interior points of the fiber lattice before refinement.
  int lattice_points = 4000;
  /// Doublings of lattice_points allowed while the lattice count settles.
  int lattice_refinements = 3;
  std::size_t lattice_cap = 200000;
  /// Concurrent fiber solves; 0 picks the hardware concurrency.
  unsigned workers = 1;
};

struct ModeCount {
  int k = 0;
  std::optional<CountResult> prufer;
  std::optional<CountResult> lattice;

  /// Agreed count. Throws CounterDisagreement when both counters ran and differ.
  int count() const;
};

/// Negative eigenvalues of H_k by the Prufer counter on the gauge-equivalent
/// real form and by the Peierls fiber lattice.
ModeCount count_mode(const ModeOperator& mode, const ModeCountConfig& config);

/// Sum over the window of Neg(H_k); per-mode counts land in `per_mode`.
/// Solver failures are rethrown with the offending k in the message.
CountResult total_mode_count(const FluxSpec& flux, const Profile1D& W, std::span<const int> window,
                             const ModeCountConfig& config = {});

}  // namespace stripneg
