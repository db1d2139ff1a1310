#pragma once

#include <span>
#include <vector>

namespace stripneg {

/// Real symmetric tridiagonal matrix: diagonal d[0..n-1], off-diagonal e[0..n-2].
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::size_t size() const noexcept { return diagonal.size(); }
};

/// Number of eigenvalues strictly below `shift` (Sturm sequence / LDL^T
/// inertia of T - shift I with zero pivots replaced by a tiny negative).
int sturm_count(const Tridiagonal& t, double shift);

/// Eigenvalues of T in (lo, hi) located by bisection on sturm_count.
std::vector<double> bisect_eigenvalues(const Tridiagonal& t, double lo, double hi, double tol);

}  // namespace stripneg
