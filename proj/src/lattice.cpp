#include "stripneg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

double LatticeGrid::h1() const {
  return x1_boundary == LongitudinalBoundary::dirichlet ? 2.0 * extent / (n1 + 1)
                                                        : 2.0 * extent / n1;
}

std::vector<double> LatticeGrid::x1_nodes() const {
  std::vector<double> x(static_cast<std::size_t>(n1));
  const double h = h1();
  const double offset = x1_boundary == LongitudinalBoundary::dirichlet ? 1.0 : 0.5;
  for (int i = 0; i < n1; ++i) {
    x[static_cast<std::size_t>(i)] = -extent + (i + offset) * h;
  }
  return x;
}

LatticeOperator::LatticeOperator(int n1, int n2, double h1, double h2, int bandwidth)
    : n1_(n1), n2_(n2), h1_(h1), h2_(h2), bandwidth_(bandwidth) {
  if (n1 < 1 || n2 < 1 || bandwidth < 0) {
    throw InvalidParams(fmt::format("bad lattice shape {}x{} (bandwidth {})", n1, n2, bandwidth));
  }
  band_.assign(static_cast<std::size_t>(2 * bandwidth + 1) * static_cast<std::size_t>(n1 * n2),
               Complex{});
}

LatticeOperator::Complex LatticeOperator::operator()(int row, int col) const {
  const int d = col - row;
  if (std::abs(d) > bandwidth_) {
    return {};
  }
  return band_[static_cast<std::size_t>(d + bandwidth_) * static_cast<std::size_t>(dimension()) +
               static_cast<std::size_t>(row)];
}

void LatticeOperator::set(int row, int col, Complex value) {
  const int d = col - row;
  if (std::abs(d) > bandwidth_) {
    throw InvalidParams(fmt::format("entry ({}, {}) lies outside bandwidth {}", row, col,
                                    bandwidth_));
  }
  band_[static_cast<std::size_t>(d + bandwidth_) * static_cast<std::size_t>(dimension()) +
        static_cast<std::size_t>(row)] = value;
}

void LatticeOperator::add(int row, int col, Complex value) { set(row, col, (*this)(row, col) + value); }

double LatticeOperator::hermiticity_defect() const {
  double defect = 0.0;
  const int n = dimension();
  for (int row = 0; row < n; ++row) {
    for (int col = std::max(0, row - bandwidth_); col <= std::min(n - 1, row + bandwidth_); ++col) {
      defect = std::max(defect, std::abs((*this)(row, col) - std::conj((*this)(col, row))));
    }
  }
  return defect;
}

double LatticeOperator::max_abs_diagonal() const {
  double m = 0.0;
  for (int i = 0; i < dimension(); ++i) {
    m = std::max(m, std::abs((*this)(i, i)));
  }
  return m;
}

bool LatticeOperator::is_real(double tol) const {
  return std::all_of(band_.begin(), band_.end(),
                     [tol](const Complex& z) { return std::abs(z.imag()) <= tol; });
}

Eigen::MatrixXcd LatticeOperator::to_dense() const {
  const int n = dimension();
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  for (int row = 0; row < n; ++row) {
    for (int col = std::max(0, row - bandwidth_); col <= std::min(n - 1, row + bandwidth_); ++col) {
      dense(row, col) = (*this)(row, col);
    }
  }
  return dense;
}

void LatticeOperator::dump(std::ostream& out) const {
  const int n = dimension();
  for (int row = 0; row < n; ++row) {
    for (int col = std::max(0, row - bandwidth_); col <= std::min(n - 1, row + bandwidth_); ++col) {
      const Complex z = (*this)(row, col);
      if (z != Complex{}) {
        out << fmt::format("{} {} {:.17g} {:.17g}\n", row, col, z.real(), z.imag());
      }
    }
  }
}

namespace {

using Complex = LatticeOperator::Complex;

void check_cap(std::size_t sites, std::size_t cap) {
  if (sites > cap) {
    throw GridCap(fmt::format("lattice with {} unknowns exceeds the cap of {}", sites, cap));
  }
}

// Adds the bond a--b of a magnetic Laplacian with hop phase theta:
// (H u)_a gets -e^{i theta} u_b / h^2 and the bond's diagonal share.
void add_bond(LatticeOperator& op, int a, int b, double theta, double h) {
  const double inv = 1.0 / (h * h);
  const Complex hop = -std::polar(inv, theta);
  op.add(a, b, hop);
  op.add(b, a, std::conj(hop));
  op.add(a, a, inv);
  op.add(b, b, inv);
}

}  // namespace

LatticeOperator assemble_peierls(const FluxSpec& flux, const Profile1D& W,
                                 const StripGeometry& geometry, const LatticeGrid& grid) {
  if (grid.n1 < 1 || grid.n2 < 1 || !(grid.extent > 0.0)) {
    throw InvalidParams("lattice grid needs n1, n2 >= 1 and extent > 0");
  }
  check_cap(static_cast<std::size_t>(grid.n1) * static_cast<std::size_t>(grid.n2), grid.cap);
  const bool ring = grid.transverse == TransverseModel::flux_ring;
  const double h1 = grid.h1();
  const double h2 = ring ? 2.0 * std::numbers::pi / grid.n2 : geometry.width() / grid.n2;
  const int n2 = grid.n2;
  LatticeOperator op(grid.n1, n2, h1, h2, n2);
  op.psi = flux.psi;
  op.transverse = grid.transverse;
  auto site = [n2](int i1, int i2) { return i1 * n2 + i2; };

  const auto x = grid.x1_nodes();
  for (int i1 = 0; i1 < grid.n1; ++i1) {
    const double w = W(x[static_cast<std::size_t>(i1)]);
    for (int i2 = 0; i2 < n2; ++i2) {
      op.add(site(i1, i2), site(i1, i2), -w);
      if (i1 + 1 < grid.n1) {
        add_bond(op, site(i1, i2), site(i1 + 1, i2), flux.psi * h1, h1);
      }
      if (i2 + 1 < n2) {
        add_bond(op, site(i1, i2), site(i1, i2 + 1), flux.psi * h2, h2);
      } else if (ring && n2 > 1) {
        add_bond(op, site(i1, i2), site(i1, 0), flux.psi * h2, h2);
      }
    }
    if (ring && n2 == 1) {
      // A one-site ring carries the flux through the on-site symbol.
      const double e = (2.0 - 2.0 * std::cos(flux.psi * h2)) / (h2 * h2);
      op.add(site(i1, 0), site(i1, 0), e);
    }
  }
  if (grid.x1_boundary == LongitudinalBoundary::dirichlet) {
    // Bonds to the zero boundary values at the two walls.
    const double inv = 1.0 / (h1 * h1);
    for (int i2 = 0; i2 < n2; ++i2) {
      op.add(site(0, i2), site(0, i2), inv);
      op.add(site(grid.n1 - 1, i2), site(grid.n1 - 1, i2), inv);
    }
  }
  return op;
}

double lattice_symbol_constant(double phi, double h) {
  // 2 - 2 cos(phi h) = 4 sin^2(phi h / 2) avoids cancellation for small phi h.
  const double s = std::sin(0.5 * phi * h);
  return 4.0 * s * s / (h * h);
}

LatticeOperator assemble_fiber(const ModeOperator& mode, double extent, int n1, std::size_t cap) {
  if (n1 < 2 || !(extent > 0.0)) {
    throw InvalidParams("fiber lattice needs n1 >= 2 and extent > 0");
  }
  check_cap(static_cast<std::size_t>(n1), cap);
  const double h = 2.0 * extent / (n1 + 1);
  LatticeOperator op(n1, 1, h, 1.0, 1);
  op.psi = mode.phi;
  const double onsite =
      2.0 / (h * h) + mode.transverse_energy - lattice_symbol_constant(mode.phi, h);
  const Complex hop = -std::polar(1.0 / (h * h), mode.phi * h);
  for (int i = 0; i < n1; ++i) {
    const double x = -extent + (i + 1) * h;
    op.set(i, i, onsite - mode.profile(x));
    if (i + 1 < n1) {
      op.set(i, i + 1, hop);
      op.set(i + 1, i, std::conj(hop));
    }
  }
  return op;
}

LatticeOperator gauge_conjugate_real(const LatticeOperator& op) {
  LatticeOperator out = op;
  if (op.psi == 0.0) {
    return out;
  }
  const int n = op.dimension();
  const int n2 = op.n2();
  const double h2 = op.h2();
  auto chi = [&](int s) { return op.psi * ((s / n2) * op.h1() + (s % n2) * h2); };
  for (int row = 0; row < n; ++row) {
    for (int col = std::max(0, row - op.bandwidth()); col <= std::min(n - 1, row + op.bandwidth());
         ++col) {
      const Complex z = op(row, col);
      if (z == Complex{}) {
        continue;
      }
      Complex conjugated = z * std::polar(1.0, chi(row) - chi(col));
      // Bonds whose phase cancels exactly are stored as exactly real.
      if (std::abs(conjugated.imag()) <= 1e-13 * std::abs(conjugated)) {
        conjugated = {conjugated.real(), 0.0};
      }
      out.set(row, col, conjugated);
    }
  }
  return out;
}

namespace {

// No-pivot band LDL^H of (op - shift I); returns the number of negative
// pivots. Throws FactorizationBreakdown on a zero or non-finite pivot.
template <class Scalar>
int band_ldl_negatives(const LatticeOperator& op, double shift) {
  const int n = op.dimension();
  const int b = op.bandwidth();
  auto conj_if = [](const Scalar& z) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return z;
    } else {
      return std::conj(z);
    }
  };
  auto entry = [&](int r, int c) -> Scalar {
    if constexpr (std::is_same_v<Scalar, double>) {
      return op(r, c).real();
    } else {
      return op(r, c);
    }
  };
  // lower[i * b + (i - j - 1)] = L(i, j) for i - b <= j < i.
  std::vector<Scalar> lower(static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(b, 1)));
  std::vector<double> pivots(static_cast<std::size_t>(n));
  auto L = [&](int i, int j) -> Scalar& {
    return lower[static_cast<std::size_t>(i) * static_cast<std::size_t>(b) +
                 static_cast<std::size_t>(i - j - 1)];
  };
  int negatives = 0;
  for (int k = 0; k < n; ++k) {
    double d = std::real(entry(k, k)) - shift;
    for (int j = std::max(0, k - b); j < k; ++j) {
      d -= std::norm(L(k, j)) * pivots[static_cast<std::size_t>(j)];
    }
    if (d == 0.0 || !std::isfinite(d)) {
      throw FactorizationBreakdown(fmt::format("pivot {} is {} at shift {}", k, d, shift));
    }
    pivots[static_cast<std::size_t>(k)] = d;
    if (d < 0.0) {
      ++negatives;
    }
    for (int i = k + 1; i <= std::min(n - 1, k + b); ++i) {
      Scalar s = entry(i, k);
      for (int j = std::max(0, i - b); j < k; ++j) {
        s -= L(i, j) * conj_if(L(k, j)) * pivots[static_cast<std::size_t>(j)];
      }
      L(i, k) = s / d;
    }
  }
  return negatives;
}

}  // namespace

int band_count_below(const LatticeOperator& op, double shift) {
  return op.is_real() ? band_ldl_negatives<double>(op, shift)
                      : band_ldl_negatives<Complex>(op, shift);
}

std::vector<double> lattice_eigenvalues(const LatticeOperator& op, std::size_t cap) {
  check_cap(static_cast<std::size_t>(op.dimension()), cap);
  std::vector<double> values;
  if (op.is_real()) {
    const Eigen::MatrixXd dense = op.to_dense().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dense.rows());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.to_dense(), Eigen::EigenvaluesOnly);
    values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + op.dimension());
  }
  return values;
}

InertiaReport count_negative_inertia(const LatticeOperator& op, const InertiaOptions& options) {
  const std::size_t n = static_cast<std::size_t>(op.dimension());
  const double eps = options.zero_cluster_relative * op.max_abs_diagonal();

  auto by_eigensolve = [&] {
    const auto values = lattice_eigenvalues(op, options.eigensolve_cap);
    InertiaReport r;
    r.method = "eigensolve";
    r.eps_num = eps;
    for (double v : values) {
      if (v < -eps) {
        ++r.negative;
      } else if (v <= eps) {
        ++r.zero_cluster;
      } else {
        ++r.positive;
      }
    }
    return r;
  };
  auto by_factorization = [&] {
    check_cap(n, options.factorization_cap);
    InertiaReport r;
    r.method = "band_ldl";
    r.eps_num = eps;
    r.negative = band_count_below(op, -eps);
    const int at_most = band_count_below(op, eps);
    r.zero_cluster = at_most - r.negative;
    r.positive = static_cast<int>(n) - at_most;
    return r;
  };

  if (options.path == InertiaOptions::Path::eigensolve) {
    return by_eigensolve();
  }
  InertiaReport report;
  try {
    report = by_factorization();
  } catch (const FactorizationBreakdown&) {
    if (options.path == InertiaOptions::Path::factorization || n > options.eigensolve_cap) {
      throw;
    }
    return by_eigensolve();
  }
  if (options.cross_check && n <= options.eigensolve_cap) {
    const InertiaReport check = by_eigensolve();
    if (check.negative != report.negative || check.zero_cluster != report.zero_cluster) {
      throw CounterDisagreement(fmt::format(
          "band LDL inertia ({}, {}, {}) differs from eigensolve ({}, {}, {})", report.negative,
          report.zero_cluster, report.positive, check.negative, check.zero_cluster,
          check.positive));
    }
  }
  return report;
}

double smallest_eigenvalue(const LatticeOperator& op, const InertiaOptions& options) {
  if (static_cast<std::size_t>(op.dimension()) <= options.eigensolve_cap) {
    return lattice_eigenvalues(op, options.eigensolve_cap).front();
  }
  // Gershgorin bracket, then bisection on the band inertia.
  double lo = 0.0;
  double hi = 0.0;
  const int n = op.dimension();
  for (int row = 0; row < n; ++row) {
    double radius = 0.0;
    for (int col = std::max(0, row - op.bandwidth()); col <= std::min(n - 1, row + op.bandwidth());
         ++col) {
      if (col != row) {
        radius += std::abs(op(row, col));
      }
    }
    const double centre = op(row, row).real();
    lo = row == 0 ? centre - radius : std::min(lo, centre - radius);
    hi = row == 0 ? centre + radius : std::max(hi, centre + radius);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    int below = 0;
    try {
      below = band_count_below(op, mid);
    } catch (const FactorizationBreakdown&) {
      below = band_count_below(op, std::nextafter(mid, hi));
    }
    if (below >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DiamagneticResult diamagnetic_check(const FluxSpec& flux, const Profile1D& W,
                                    const StripGeometry& geometry, const LatticeGrid& grid,
                                    const InertiaOptions& options) {
  const LatticeOperator magnetic = assemble_peierls(flux, W, geometry, grid);
  const LatticeOperator plain = assemble_peierls(FluxSpec{0.0, 0.0, true}, W, geometry, grid);
  DiamagneticResult result;
  result.e0_magnetic = smallest_eigenvalue(magnetic, options);
  result.e0_plain = smallest_eigenvalue(plain, options);
  result.scale = plain.max_abs_diagonal();
  return result;
}

ComplexField seeded_field(std::uint64_t seed, int n, FieldKind kind, double phi) {
  if (n < 5) {
    throw InvalidParams("seeded field needs at least 5 points per side");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int bumps = 3 + static_cast<int>(unit(rng) * 3.0);
  struct Bump {
    double cx, cy, width, weight;
  };
  std::vector<Bump> envelope;
  for (int b = 0; b < bumps; ++b) {
    envelope.push_back({0.2 + 0.6 * unit(rng), 0.2 + 0.6 * unit(rng), 0.1 + 0.2 * unit(rng),
                        0.5 + unit(rng)});
  }
  const double kx = 2.0 * std::numbers::pi * (unit(rng) - 0.5) * 3.0;
  const double ky = 2.0 * std::numbers::pi * (unit(rng) - 0.5) * 3.0;
  const double bend = 4.0 * (unit(rng) - 0.5);

  ComplexField f;
  f.n1 = n;
  f.n2 = n;
  f.h1 = 1.0 / (n - 1);
  f.h2 = 1.0 / (n - 1);
  f.values.resize(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = i * f.h1;
      const double y = j * f.h2;
      double g = 0.05;  // keeps |f| away from zero
      for (const auto& bump : envelope) {
        const double r2 = ((x - bump.cx) * (x - bump.cx) + (y - bump.cy) * (y - bump.cy)) /
                          (bump.width * bump.width);
        g += bump.weight * std::exp(-r2);
      }
      double phase = 0.0;
      switch (kind) {
        case FieldKind::real_positive:
          break;
        case FieldKind::gauge_phase:
          phase = phi * x;
          break;
        case FieldKind::random_phase:
          phase = kx * x + ky * y + bend * std::sin(3.0 * x * y);
          break;
      }
      f.values[static_cast<std::size_t>(i * n + j)] = std::polar(g, phase);
    }
  }
  return f;
}

PointwiseDiamagneticReport pointwise_diamagnetic_sample(const ComplexField& f,
                                                        const FluxSpec& flux) {
  PointwiseDiamagneticReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < f.n1; ++i) {
    for (int j = 1; j + 1 < f.n2; ++j) {
      const double dx_abs = (std::abs(f.at(i + 1, j)) - std::abs(f.at(i - 1, j))) / (2.0 * f.h1);
      const double dy_abs = (std::abs(f.at(i, j + 1)) - std::abs(f.at(i, j - 1))) / (2.0 * f.h2);
      // Covariant differences (e^{iAh} f(x+h) - e^{-iAh} f(x-h)) / 2h approximate
      // grad f + i A f; by the reverse triangle inequality they dominate the
      // differences of |f| exactly.
      const Complex ax = std::polar(1.0, flux.phi * f.h1);
      const Complex ay = std::polar(1.0, flux.phi * f.h2);
      const Complex cx = (ax * f.at(i + 1, j) - std::conj(ax) * f.at(i - 1, j)) / (2.0 * f.h1);
      const Complex cy = (ay * f.at(i, j + 1) - std::conj(ay) * f.at(i, j - 1)) / (2.0 * f.h2);
      const double lhs = std::hypot(dx_abs, dy_abs);
      const double rhs = std::sqrt(std::norm(cx) + std::norm(cy));
      report.max_violation = std::max(report.max_violation, lhs - rhs);
      report.max_lhs = std::max(report.max_lhs, lhs);
      report.max_rhs = std::max(report.max_rhs, rhs);
      ++report.points;
    }
  }
  if (report.points == 0) {
    report.max_violation = 0.0;
  }
  return report;
}

}  // namespace stripneg
