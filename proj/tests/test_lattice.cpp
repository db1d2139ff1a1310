#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stripneg/errors.hpp"
#include "stripneg/lattice.hpp"

using namespace stripneg;

namespace {

constexpr double pi = std::numbers::pi;

Profile1D well_profile(const oracle::RandomWell& well) {
  return Profile1D::analytic([well](double x) { return well(x); }, VariableRole::line);
}

// Spectrum of the free Dirichlet chain plus the free flux ring, in closed form.
std::vector<double> free_ring_spectrum(int n1, int n2, double extent, double psi) {
  const double h1 = 2.0 * extent / (n1 + 1);
  const double h2 = 2.0 * pi / n2;
  std::vector<double> out;
  for (int j = 1; j <= n1; ++j) {
    const double s = std::sin(j * pi / (2.0 * (n1 + 1)));
    for (int m = 0; m < n2; ++m) {
      const double t = std::sin(0.5 * h2 * (m + psi));
      out.push_back(4.0 * s * s / (h1 * h1) + 4.0 * t * t / (h2 * h2));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double max_difference(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("free flux ring matches the closed-form spectrum") {
  LatticeGrid grid;
  grid.extent = 5.0;
  grid.n1 = 12;
  grid.n2 = 6;
  grid.transverse = TransverseModel::flux_ring;
  for (double psi : {0.0, 0.3, 0.5, 1.0, 1.7}) {
    const auto op = assemble_peierls(reduced_flux(psi), Profile1D::zero(), StripGeometry(1.0), grid);
    CHECK(op.hermiticity_defect() < 1e-14);
    auto psi_mod = psi;
    CHECK(max_difference(lattice_eigenvalues(op), free_ring_spectrum(12, 6, 5.0, psi_mod)) < 1e-10);
  }
}

TEST_CASE("Neumann strip spectrum is unchanged by a constant vector potential") {
  LatticeGrid grid;
  grid.n1 = 20;
  grid.n2 = 5;
  std::mt19937_64 rng(4);
  const auto w = well_profile(oracle::random_well(rng));
  const auto plain = lattice_eigenvalues(assemble_peierls(reduced_flux(0.0), w, StripGeometry(1.0), grid));
  for (double psi : {0.2, 0.5, 3.3}) {
    const auto op = assemble_peierls(reduced_flux(psi), w, StripGeometry(1.0), grid);
    CHECK_FALSE(op.is_real());
    CHECK(max_difference(lattice_eigenvalues(op), plain) < 1e-10);
  }
}

TEST_CASE("gauge conjugation removes the phases") {
  LatticeGrid grid;
  grid.n1 = 10;
  grid.n2 = 4;
  const auto w = Profile1D::zero();
  for (double psi : {0.1, 0.37, 0.5}) {
    CHECK(gauge_conjugate_real(assemble_peierls(reduced_flux(psi), w, StripGeometry(1.0), grid)).is_real());
  }
  grid.transverse = TransverseModel::flux_ring;
  CHECK(gauge_conjugate_real(assemble_peierls(reduced_flux(0.5), w, StripGeometry(1.0), grid)).is_real());
  CHECK(gauge_conjugate_real(assemble_peierls(reduced_flux(1.0), w, StripGeometry(1.0), grid)).is_real());
  CHECK_FALSE(
      gauge_conjugate_real(assemble_peierls(reduced_flux(0.3), w, StripGeometry(1.0), grid)).is_real());
}

TEST_CASE("band factorization inertia equals the dense count") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    LatticeGrid grid;
    grid.extent = 6.0;
    grid.n1 = 30;
    grid.n2 = 4 + trial % 3;
    grid.transverse = trial % 2 ? TransverseModel::flux_ring : TransverseModel::neumann;
    const auto w = well_profile(oracle::random_well(rng, 12.0));
    const auto op = assemble_peierls(reduced_flux(u(rng)), w, StripGeometry(0.8), grid);
    const auto values = lattice_eigenvalues(op);
    for (double shift : {-3.0, 0.0, 2.5}) {
      CHECK(band_count_below(op, shift) == oracle::count_below(values, shift));
    }
    InertiaOptions fact{.path = InertiaOptions::Path::factorization};
    InertiaOptions eig{.path = InertiaOptions::Path::eigensolve};
    InertiaOptions both{.cross_check = true};
    const auto a = count_negative_inertia(op, fact);
    const auto b = count_negative_inertia(op, eig);
    CHECK(a.method == "band_ldl");
    CHECK(b.method == "eigensolve");
    CHECK(a.negative == b.negative);
    CHECK(a.negative + a.zero_cluster + a.positive == op.dimension());
    CHECK(count_negative_inertia(op, both).negative == a.negative);
  }
}

TEST_CASE("smallest eigenvalue by bisection matches the dense solve") {
  LatticeGrid grid;
  grid.n1 = 40;
  grid.n2 = 8;
  grid.transverse = TransverseModel::flux_ring;
  std::mt19937_64 rng(8);
  const auto w = well_profile(oracle::random_well(rng));
  const auto op = assemble_peierls(reduced_flux(0.3), w, StripGeometry(1.0), grid);
  InertiaOptions bisect;
  bisect.eigensolve_cap = 10;
  CHECK(smallest_eigenvalue(op, bisect) == doctest::Approx(lattice_eigenvalues(op).front()).epsilon(1e-10));
}

TEST_CASE("magnetic ground energy dominates the plain one") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    LatticeGrid grid;
    grid.n1 = 30;
    grid.n2 = 6;
    grid.transverse = TransverseModel::flux_ring;
    const auto w = well_profile(oracle::random_well(rng));
    const double psi = trial < 3 ? static_cast<double>(trial) : 3.0 * u(rng);
    const auto result = diamagnetic_check(reduced_flux(psi), w, StripGeometry(1.0), grid);
    CHECK(result.holds());
    if (reduced_flux(psi).is_integer_flux) {
      CHECK(std::abs(result.margin()) <= 1e-10 * result.scale);
    } else {
      CHECK(result.margin() > 0.0);
    }
  }
}

TEST_CASE("fiber chain with no potential has the shifted cosine spectrum") {
  const auto mode = build_mode_operator(1, reduced_flux(0.3), Profile1D::zero());
  const int n = 50;
  const double extent = 5.0;
  const auto op = assemble_fiber(mode, extent, n);
  const double h = 2.0 * extent / (n + 1);
  CHECK(op.hermiticity_defect() < 1e-14);
  CHECK(gauge_conjugate_real(op).is_real(1e-12));
  std::vector<double> expected;
  for (int j = 1; j <= n; ++j) {
    expected.push_back(2.0 / (h * h) + 1.69 - lattice_symbol_constant(0.3, h) -
                       2.0 / (h * h) * std::cos(j * pi / (n + 1)));
  }
  std::sort(expected.begin(), expected.end());
  CHECK(max_difference(lattice_eigenvalues(op), expected) < 1e-9);
}

TEST_CASE("lattice symbol tends to phi squared") {
  CHECK(lattice_symbol_constant(0.4, 1e-4) == doctest::Approx(0.16).epsilon(1e-8));
  CHECK(lattice_symbol_constant(0.0, 0.1) == 0.0);
  CHECK(lattice_symbol_constant(0.5, 0.5) < 0.25);
}

TEST_CASE("grid cap is enforced") {
  LatticeGrid grid;
  grid.n1 = 1000;
  grid.n2 = 300;
  CHECK_THROWS_AS(assemble_peierls(reduced_flux(0.5), Profile1D::zero(), StripGeometry(1.0), grid), GridCap);
  const auto mode = build_mode_operator(0, reduced_flux(0.5), Profile1D::zero());
  CHECK_THROWS_AS(assemble_fiber(mode, 10.0, 300000), GridCap);
  LatticeGrid small;
  const auto op = assemble_peierls(reduced_flux(0.5), Profile1D::zero(), StripGeometry(1.0), small);
  CHECK_THROWS_AS(lattice_eigenvalues(op, 10), GridCap);
}

TEST_CASE("operator dump lists every nonzero once") {
  LatticeGrid grid;
  grid.n1 = 4;
  grid.n2 = 3;
  const auto op = assemble_peierls(reduced_flux(0.25), Profile1D::zero(), StripGeometry(1.0), grid);
  std::ostringstream out;
  op.dump(out);
  std::istringstream in(out.str());
  int row, col, lines = 0, nonzero = 0;
  double re, im;
  while (in >> row >> col >> re >> im) {
    ++lines;
    CHECK(op(row, col).real() == re);
    CHECK(op(row, col).imag() == im);
  }
  const auto dense = op.to_dense();
  for (int r = 0; r < dense.rows(); ++r) {
    for (int c = 0; c < dense.cols(); ++c) {
      nonzero += dense(r, c) != std::complex<double>{} ? 1 : 0;
    }
  }
  CHECK(lines == nonzero);
}

TEST_CASE("discrete diamagnetic inequality holds pointwise") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (auto kind : {FieldKind::real_positive, FieldKind::gauge_phase, FieldKind::random_phase}) {
      const auto field = seeded_field(seed, 41, kind, 0.35);
      const auto report = pointwise_diamagnetic_sample(field, reduced_flux(0.35));
      CHECK(report.points == 39 * 39);
      CHECK(report.max_violation <= 1e-12 * std::max(1.0, report.max_rhs));
    }
  }
  CHECK_THROWS_AS(seeded_field(0, 3, FieldKind::real_positive, 0.1), InvalidParams);
}
