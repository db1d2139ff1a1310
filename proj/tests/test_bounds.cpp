#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "stripneg/bounds.hpp"
#include "stripneg/errors.hpp"

using namespace stripneg;

namespace {

std::set<int> keys(const std::map<int, double>& m) {
  std::set<int> out;
  for (const auto& [k, v] : m) {
    out.insert(k);
  }
  return out;
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("strip estimate at phi = 1/2 and norm 10") {
  const BoundResult b = strip_clr_bound(reduced_flux(0.5), 10.0);
  const auto ref = oracle::strip_sum(0.5L, 10.0L);
  CHECK(b.value == doctest::Approx(static_cast<double>(ref.value)).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(12.2322516561063).epsilon(1e-12));
  CHECK(keys(b.per_mode_terms) == std::set<int>{-2, -1, 0, 1});
  CHECK(b.omitted_below_one == 2);
  CHECK(b.formula == "strip_clr");
  CHECK(b.per_mode_terms.at(0) == doctest::Approx(10.0 / std::sqrt(5.0)));
  CHECK(b.per_mode_terms.at(1) == doctest::Approx(10.0 / std::sqrt(37.0)));
}

TEST_CASE("small norm leaves nothing") {
  const BoundResult b = strip_clr_bound(reduced_flux(0.5), 1.0);
  CHECK(b.value == 0.0);
  CHECK(b.per_mode_terms.empty());
  CHECK(strip_clr_bound(reduced_flux(0.3), 0.0).value == 0.0);
}

TEST_CASE("a term equal to one is kept") {
  const BoundResult b = strip_clr_bound(reduced_flux(0.5), std::sqrt(5.0));
  CHECK(b.value == 2.0);
  CHECK(keys(b.per_mode_terms) == std::set<int>{-1, 0});
  CHECK(b.omitted_below_one == 2);
}

TEST_CASE("strip estimate equals brute-force enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phi(1e-3, 0.5), norm(0.0, 60.0);
  for (int i = 0; i < 300; ++i) {
    const FluxSpec flux = reduced_flux(phi(rng));
    const double nx = norm(rng);
    const BoundResult b = strip_clr_bound(flux, nx);
    const auto ref = oracle::strip_sum(flux.phi, nx);
    CHECK(b.value == doctest::Approx(static_cast<double>(ref.value)).epsilon(1e-12));
    CHECK(keys(b.per_mode_terms) == as_set(ref.kept));
    CHECK(as_set(mode_window(flux, nx)) == as_set(ref.kept));
    for (const auto& [k, term] : b.per_mode_terms) {
      CHECK(term >= 1.0);
    }
  }
}

TEST_CASE("strip estimate grows with the norm") {
  const FluxSpec flux = reduced_flux(0.37);
  double previous = 0.0;
  for (double nx = 0.0; nx <= 40.0; nx += 0.25) {
    const double value = strip_clr_bound(flux, nx).value;
    CHECK(value >= previous);
    previous = value;
  }
}

TEST_CASE("per-mode terms cover retained and dropped fibers") {
  const FluxSpec flux = reduced_flux(0.5);
  const std::vector<int> window = {0, -1, 1, -2, 2, -3};
  const auto terms = per_mode_bargmann_terms(flux, 10.0, window);
  CHECK(terms.size() == 6);
  CHECK(terms.at(2) == doctest::Approx(10.0 / std::sqrt(101.0)));
  CHECK(terms.at(2) < 1.0);
  CHECK(strip_term(-3, 0.5, 10.0) == doctest::Approx(terms.at(2)));
}

TEST_CASE("disk estimate at flux 1/2 with radial integral 4") {
  const BoundResult b = disk_bound_bel(0.5, 4.0);
  CHECK(std::abs(b.value - 32.0 / 3.0) < 1e-9);
  CHECK(keys(b.per_mode_terms) == std::set<int>{-2, -1, 0, 1});
  CHECK(b.formula == "disk_bel");
  CHECK(disk_bound_bel(1.5, 4.0).value == doctest::Approx(32.0 / 3.0).epsilon(1e-14));
  CHECK(disk_bound_bel(-0.5, 4.0).value == doctest::Approx(32.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("disk estimate equals brute-force enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> flux(-3.0, 3.0), integral(0.0, 30.0);
  for (int i = 0; i < 300; ++i) {
    double f = flux(rng);
    if (std::abs(f - std::round(f)) < 1e-6) {
      continue;
    }
    const double I = integral(rng);
    const BoundResult b = disk_bound_bel(f, I);
    const auto ref = oracle::disk_sum(f, I);
    CHECK(b.value == doctest::Approx(static_cast<double>(ref.value)).epsilon(1e-12));
    CHECK(keys(b.per_mode_terms) == as_set(ref.kept));
  }
}

TEST_CASE("disk estimate from a radial profile") {
  const Profile1D q = Profile1D::analytic([](double r) { return 8.0 * std::exp(-r); }, VariableRole::radial);
  // int_0^inf 8 e^{-r} r dr = 8.
  CHECK(disk_bound_bel(0.25, q).value == doctest::Approx(disk_bound_bel(0.25, 8.0).value).epsilon(1e-9));
}

TEST_CASE("one-dimensional right-hand side") {
  CHECK(bargmann_rhs(0.0, 24.0) == 24.0);
  CHECK(bargmann_rhs(2.0, 6.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(bargmann_rhs(-1.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(bargmann_rhs(1.0, -1.0), InvalidParams);
}

TEST_CASE("integer flux has no estimate") {
  CHECK_THROWS_AS(strip_clr_bound(reduced_flux(2.0), 10.0), IntegerFlux);
  CHECK_THROWS_AS(disk_bound_bel(1.0, 4.0), IntegerFlux);
  CHECK_THROWS_AS(disk_bound_bel(0.5, -1.0), InvalidParams);
  CHECK_THROWS_AS(strip_clr_bound(reduced_flux(0.5), -1.0), InvalidParams);
}
