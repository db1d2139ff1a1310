#include "stripneg/tridiagonal.hpp"

#include <cmath>
#include <limits>

namespace stripneg {

int sturm_count(const Tridiagonal& t, double shift) {
  const std::size_t n = t.size();
  if (n == 0) {
    return 0;
  }
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int negatives = 0;
  double pivot = t.diagonal[0] - shift;
  for (std::size_t i = 0;; ++i) {
    if (pivot == 0.0) {
      pivot = -tiny;
    }
    if (pivot < 0.0) {
      ++negatives;
    }
    if (i + 1 == n) {
      break;
    }
    const double e = t.off_diagonal[i];
    pivot = (t.diagonal[i + 1] - shift) - e * e / pivot;
  }
  return negatives;
}

std::vector<double> bisect_eigenvalues(const Tridiagonal& t, double lo, double hi, double tol) {
  std::vector<double> found;
  const int first = sturm_count(t, lo);
  const int last = sturm_count(t, hi);
  for (int index = first; index < last; ++index) {
    double a = lo;
    double b = hi;
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(t, mid) > index) {
        b = mid;
      } else {
        a = mid;
      }
    }
    found.push_back(0.5 * (a + b));
  }
  return found;
}

}  // namespace stripneg
