#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stripneg/errors.hpp"
#include "stripneg/sl_counter.hpp"

using namespace stripneg;

namespace {

Profile1D sech2(double depth) {
  return Profile1D::analytic(
      [depth](double x) {
        const double s = 1.0 / std::cosh(x);
        return depth * s * s;
      },
      VariableRole::line);
}

Profile1D from_well(const oracle::RandomWell& well) {
  return Profile1D::analytic([well](double x) { return well(x); }, VariableRole::line);
}

// Bound states of the square well of depth v0 on [-a, a], by bracketing the
// even and odd matching conditions on a fine energy scan.
std::vector<double> square_well_levels(double v0, double a) {
  auto even = [&](double e) {
    const double k = std::sqrt(v0 + e), kappa = std::sqrt(-e);
    return k * std::sin(k * a) - kappa * std::cos(k * a);
  };
  auto odd = [&](double e) {
    const double k = std::sqrt(v0 + e), kappa = std::sqrt(-e);
    return k * std::cos(k * a) + kappa * std::sin(k * a);
  };
  std::vector<double> levels;
  for (int parity = 0; parity < 2; ++parity) {
    const int steps = 200000;
    double prev_e = -v0 + 1e-12;
    double prev = parity == 0 ? even(prev_e) : odd(prev_e);
    for (int i = 1; i < steps; ++i) {
      const double e = -v0 + v0 * i / steps;
      const double val = parity == 0 ? even(e) : odd(e);
      if ((val > 0) != (prev > 0)) {
        double lo = prev_e, hi = e;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double vm = parity == 0 ? even(mid) : odd(mid);
          ((vm > 0) == (prev > 0) ? lo : hi) = mid;
        }
        levels.push_back(0.5 * (lo + hi));
      }
      prev = val;
      prev_e = e;
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

}  // namespace

TEST_CASE("sech2 wells: depth 12 binds three states, depth 6 binds two") {
  const auto twelve = SLProblem::make(0.0, sech2(12.0), 20.0);
  const auto six = SLProblem::make(0.0, sech2(6.0), 20.0);
  CHECK(count_negative_prufer(twelve).count == 3);
  CHECK(count_negative_prufer(six).count == 2);
  CHECK(count_negative_inertia_1d(twelve, 8000).count == 3);
  CHECK(count_negative_inertia_1d(six, 8000).count == 2);
}

TEST_CASE("eigenvalue bisection recovers the sech2 levels") {
  const auto problem = SLProblem::make(0.0, sech2(12.0), 20.0);
  const auto exact = oracle::sech2_levels(3.0);
  const auto dense = oracle::fd_lowest_extrapolated(0.0, [](double x) { return 12.0 / std::pow(std::cosh(x), 2); },
                                                    20.0, 6000, 3);
  for (int i = 0; i < 3; ++i) {
    const double found = eigenvalue_bisect(problem, i, {-12.0, -0.5});
    CHECK(std::abs(found - exact[i]) < 1e-4);
    CHECK(std::abs(found - dense[i]) < 1e-4);
  }
}

TEST_CASE("square well of depth one on [-2, 2] has two levels") {
  const auto well = Profile1D::analytic([](double x) { return std::abs(x) <= 2.0 ? 1.0 : 0.0; },
                                        VariableRole::line);
  const auto problem = SLProblem::make(0.0, well, 20.0);
  const auto levels = square_well_levels(1.0, 2.0);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0] == doctest::Approx(-0.7348).epsilon(1e-3));
  CHECK(count_negative_prufer(problem).count == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(eigenvalue_bisect(problem, i, {-1.0, -0.01}) - levels[i]) < 1e-3);
  }
}

TEST_CASE("counting below a shifted level") {
  const auto problem = SLProblem::make(0.0, sech2(12.0), 20.0);
  CHECK(count_negative_prufer(problem, -9.5).count == 0);
  CHECK(count_negative_prufer(problem, -4.5).count == 1);
  CHECK(count_negative_prufer(problem, -3.5).count == 2);
  CHECK(count_negative_prufer(problem, -0.5).count == 3);
}

TEST_CASE("overall scale multiplies the spectrum") {
  const auto problem = SLProblem::make(0.0, sech2(12.0), 20.0, 0.25);
  CHECK(count_negative_prufer(problem, -0.25 * 4.5).count == 1);
  CHECK(eigenvalue_bisect(problem, 0, {-3.0, -0.1}) == doctest::Approx(-9.0 / 4.0).epsilon(1e-4));
}

TEST_CASE("no potential, no bound states") {
  for (double c : {0.0, 0.5, 3.0}) {
    const auto problem = SLProblem::make(c, Profile1D::zero(), 10.0);
    CHECK(count_negative_prufer(problem).count == 0);
    CHECK(count_negative_inertia_1d(problem, 2000).count == 0);
  }
}

TEST_CASE("Prufer traces report one sweep for c = 0 and two for c > 0") {
  const auto line = SLProblem::make(0.0, sech2(12.0), 20.0);
  const auto split = SLProblem::make(2.0, sech2(12.0), 20.0);
  const auto one = prufer_traces(line, 0.0, 0.5);
  const auto two = prufer_traces(split, 0.0, 0.5);
  REQUIRE(one.size() == 1);
  REQUIRE(two.size() == 2);
  CHECK(one[0].node_count == 3);
  CHECK(one[0].steps > 0);
  CHECK(one[0].max_step <= 0.02 * 0.5 + 1e-15);
  CHECK(two[0].node_count + two[1].node_count == count_negative_prufer(split).count);
}

TEST_CASE("Prufer and dense finite differences agree on random wells") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coupling(0.0, 6.0);
  int compared = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const auto well = oracle::random_well(rng);
    const double c = trial % 2 == 0 ? 0.0 : coupling(rng);
    const auto problem = SLProblem::make(c, from_well(well), 15.0);
    // Skip instances with an eigenvalue too close to zero to resolve.
    const int fine = oracle::fd_count_below(c, well, 15.0, 6001, 0.0);
    if (oracle::fd_count_below(c, well, 15.0, 3000, 0.0) != fine ||
        oracle::fd_count_below(c, well, 15.0, 6001, -2e-3) != fine ||
        oracle::fd_count_below(c, well, 15.0, 6001, 2e-3) != fine) {
      continue;
    }
    ++compared;
    CHECK(count_negative_prufer(problem).count == fine);
  }
  CHECK(compared >= 18);
}

TEST_CASE("inverse-square barrier and Dirichlet split can only remove bound states") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const auto well = from_well(oracle::random_well(rng));
    const int free_count = count_negative_prufer(SLProblem::make(0.0, well, 15.0)).count;
    const int barrier = count_negative_prufer(SLProblem::make(0.75, well, 15.0)).count;
    const int stronger = count_negative_prufer(SLProblem::make(4.0, well, 15.0)).count;
    CHECK(barrier <= free_count);
    CHECK(stronger <= barrier);
  }
}

TEST_CASE("count is nondecreasing in the coupling") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const auto well = oracle::random_well(rng);
    int previous = 0;
    for (double g : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto scaled = Profile1D::analytic([well, g](double x) { return g * well(x); }, VariableRole::line);
      const int n = count_negative_prufer(SLProblem::make(0.0, scaled, 15.0)).count;
      CHECK(n >= previous);
      previous = n;
    }
  }
}

TEST_CASE("fd blocks have the requested shape") {
  const auto line = fd_blocks(SLProblem::make(0.0, sech2(1.0), 10.0), 100);
  REQUIRE(line.size() == 1);
  CHECK(line[0].diagonal.size() == 100);
  const auto split = fd_blocks(SLProblem::make(1.0, sech2(1.0), 10.0), 100);
  REQUIRE(split.size() == 2);
  CHECK(split[0].diagonal.size() + split[1].diagonal.size() == 100);
  CHECK_THROWS_AS(fd_blocks(SLProblem::make(0.0, sech2(1.0), 10.0), 4), InvalidParams);
}

TEST_CASE("solver errors") {
  const auto problem = SLProblem::make(0.0, sech2(12.0), 20.0);
  PruferOptions none;
  none.max_refinements = 0;
  CHECK_THROWS_AS(count_negative_prufer(problem, 0.0, none), NonConvergence);
  CHECK_THROWS_AS(eigenvalue_bisect(problem, 0, {-3.0, -2.0}), BracketInvalid);
  CHECK_THROWS_AS(eigenvalue_bisect(problem, 0, {-2.0, -3.0}), BracketInvalid);
  SLProblem bad = problem;
  bad.c = 1.0;
  bad.singular_start = 0.0;
  CHECK_THROWS_AS(count_negative_prufer(bad), SingularitySetup);
  bad.c = -1.0;
  CHECK_THROWS(bad.validate());
}
