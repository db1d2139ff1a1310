#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stripneg/sl_problem.hpp"
#include "stripneg/tridiagonal.hpp"

namespace stripneg {

/// Negative-eigenvalue count with provenance. Eigenvalues within eps_num of
/// the reference level are listed in `borderline` and excluded from `count`.
struct CountResult {
  int count = 0;
  std::vector<double> borderline;
  std::string method;
  std::map<std::string, double> resolution;
  std::optional<std::map<int, int>> per_mode;
};

struct PruferTrace {
  double theta_final = 0.0;
  int node_count = 0;
  long steps = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

struct PruferOptions {
  /// Local step ceiling h <= step_factor / sqrt(1 + |q|).
  double step_factor = 0.1;
  /// Global ceiling on the x-step.
  double max_step = 0.02;
  /// Halvings allowed before the count is declared unstable.
  int max_refinements = 3;
  /// eps_num = zero_cluster_relative * operator scale.
  double zero_cluster_relative = 1e-9;
};

/// Prufer-angle sweeps of tau u = lambda u at one resolution (step sizes
/// multiplied by step_scale). One trace per segment: a single trace for
/// c = 0, the right then the left half-line for c > 0.
std::vector<PruferTrace> prufer_traces(const SLProblem& problem, double lambda,
                                       double step_scale, const PruferOptions& options = {});

/// Eigenvalues below lambda counted by interior nodes of the principal
/// solution, refined by step halving until two successive counts agree.
/// Throws NonConvergence when the count is still moving after
/// options.max_refinements halvings.
CountResult count_negative_prufer(const SLProblem& problem, double lambda = 0.0,
                                  const PruferOptions& options = {});

/// The second-order finite-difference matrix of the problem: one chain over
/// [-L, L] for c = 0, two chains x = +-ih (i >= 1, Dirichlet at 0) for c > 0.
/// grid_points counts interior nodes over the whole line.
std::vector<Tridiagonal> fd_blocks(const SLProblem& problem, int grid_points);

/// Eigenvalues below lambda by inertia of the finite-difference matrix.
CountResult count_negative_inertia_1d(const SLProblem& problem, int grid_points,
                                      double lambda = 0.0,
                                      double zero_cluster_relative = 1e-9);

/// Eigenvalue number `index` (0-based, ascending) of the scaled operator,
/// inside `bracket`. Bisects on the Prufer node count and refines the step
/// until successive estimates agree within tol. Throws BracketInvalid when
/// the node count does not pass index across the bracket.
double eigenvalue_bisect(const SLProblem& problem, int index, std::pair<double, double> bracket,
                         double tol = 1e-7, const PruferOptions& options = {});

}  // namespace stripneg
