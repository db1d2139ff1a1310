#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "stripneg/errors.hpp"
#include "stripneg/potential.hpp"

using namespace stripneg;

namespace {

Profile1D width_max(const Potential2D& v, double width, double extent = 20.0, int points = 4001) {
  return sup_over_width(v, StripGeometry(width), uniform_grid(extent, points));
}

}  // namespace

TEST_CASE("gaussian ridge norm matches its closed form") {
  const auto v = builtin_family("gaussian_ridge", {{"amplitude", 2.5}, {"sigma", 0.7}, {"center", 1.0}});
  REQUIRE(v.closed_form_norm_x());
  CHECK(*v.closed_form_norm_x() == doctest::Approx(2.5 * 0.7 * std::sqrt(std::numbers::pi)));
  CHECK(norm_x(width_max(v, 1.0)) == doctest::Approx(*v.closed_form_norm_x()).epsilon(1e-10));
}

TEST_CASE("sech2 ridge norm is twice depth times scale") {
  const auto v = builtin_family("sech2_ridge", {{"depth", 3.0}, {"scale", 0.5}});
  CHECK(norm_x(width_max(v, 2.0)) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("separable product takes its maximum at the far wall") {
  const auto v = builtin_family("separable_product", {{"amplitude", 1.0}, {"slope", 2.0}, {"width", 1.5}});
  const Profile1D w = width_max(v, 1.5);
  CHECK(w(0.0) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(norm_x(w) == doctest::Approx(*v.closed_form_norm_x()).epsilon(1e-8));
}

TEST_CASE("square patch straddling the strip keeps its full height") {
  const auto v = builtin_family("square_patch", {{"amplitude", 2.0}, {"x1_min", -1.0}, {"x1_max", 1.0},
                                                 {"x2_min", 0.8}, {"x2_max", 3.0}});
  const Profile1D w = width_max(v, 1.0, 4.0, 8001);
  CHECK(w(0.0) == doctest::Approx(2.0));
  CHECK(w(1.5) == 0.0);
  const double h = 8.0 / 8000.0;
  CHECK(std::abs(norm_x(w) - 4.0) <= 2.0 * 2.0 * h);
}

TEST_CASE("zero amplitude gives a zero profile") {
  const auto v = builtin_family("gaussian_ridge", {{"amplitude", 0.0}, {"sigma", 1.0}});
  CHECK(norm_x(width_max(v, 1.0)) == 0.0);
  CHECK(norm_x(Profile1D::zero()) == 0.0);
}

TEST_CASE("family errors") {
  CHECK_THROWS_AS(builtin_family("mexican_hat", {}), UnknownFamily);
  CHECK_THROWS_AS(builtin_family("gaussian_ridge", {{"amplitude", 1.0}}), InvalidParams);
  CHECK_THROWS_AS(builtin_family("gaussian_ridge", {{"amplitude", 1.0}, {"sigma", 1.0}, {"tilt", 1.0}}),
                  InvalidParams);
  CHECK_THROWS_AS(builtin_family("gaussian_ridge", {{"amplitude", -1.0}, {"sigma", 1.0}}),
                  InvalidParams);
  CHECK_THROWS_AS(StripGeometry(0.0), InvalidParams);
}

TEST_CASE("sampled profiles reject bad input") {
  CHECK_THROWS_AS(Profile1D::sampled({}, {}, VariableRole::line), EmptyGrid);
  CHECK_THROWS_AS(Profile1D::sampled({0.0, 1.0}, {1.0, -0.5}, VariableRole::line), NegativeValue);
  CHECK_THROWS_AS(Profile1D::sampled({1.0, 0.0}, {1.0, 1.0}, VariableRole::line), InvalidParams);
  CHECK_THROWS_AS(norm_x(Profile1D::zero(VariableRole::radial)), InvalidParams);
}

TEST_CASE("sampled profile interpolates linearly and vanishes outside") {
  const Profile1D p = Profile1D::sampled({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, VariableRole::line);
  CHECK(p(0.5) == doctest::Approx(1.0));
  CHECK(p(-0.1) == 0.0);
  CHECK(p(2.1) == 0.0);
  CHECK(norm_x(p) == doctest::Approx(2.0));
  CHECK(p.scaled(3.0)(1.0) == doctest::Approx(6.0));
  CHECK(p.max_value() == doctest::Approx(2.0));
}

TEST_CASE("width maximum dominates every sample across the strip") {
  const auto v = builtin_family("separable_product", {{"amplitude", 1.3}, {"slope", 0.7}, {"width", 2.0}});
  const Profile1D w = width_max(v, 2.0, 5.0, 501);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x1(-5.0, 5.0), x2(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double a = x1(rng);
    // Linear interpolation of a concave-ish profile can dip by O(h^2).
    CHECK(w(a) >= v(a, x2(rng)) - 1e-3);
    CHECK(w(a) >= 0.0);
  }
}

TEST_CASE("CSV potentials round-trip") {
  const auto path = std::filesystem::temp_directory_path() / "stripneg_potential_test.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    out << "x1,x2,value\n";
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 4; ++j) {
        const double x1 = -4.0 + 0.2 * i;
        const double x2 = 0.25 * j;
        out << x1 << ',' << x2 << ',' << std::exp(-x1 * x1) * (1.0 + x2) << '\n';
      }
    }
  }
  const Potential2D v = load_potential_csv(path);
  CHECK(v.is_sampled());
  CHECK(v(0.0, 1.0) == doctest::Approx(2.0));
  CHECK(v(0.1, 0.5) == doctest::Approx(0.5 * (1.5 + std::exp(-0.04) * 1.5)).epsilon(1e-12));
  const Profile1D w = sup_over_width(v, StripGeometry(1.0), uniform_grid(4.0, 41));
  CHECK(w(0.0) == doctest::Approx(2.0));
  std::filesystem::remove(path);
}

TEST_CASE("CSV potentials need the header and a full grid") {
  const auto path = std::filesystem::temp_directory_path() / "stripneg_potential_bad.csv";
  {
    std::ofstream out(path);
    out << "a,b,c\n0,0,1\n";
  }
  CHECK_THROWS_AS(load_potential_csv(path), ConfigError);
  {
    std::ofstream out(path);
    out << "x1,x2,value\n0,0,1\n0,1,1\n1,0,1\n";
  }
  CHECK_THROWS_AS(load_potential_csv(path), InvalidParams);
  {
    std::ofstream out(path);
    out << "x1,x2,value\n0,0,1\n0,1,-1\n1,0,1\n1,1,1\n";
  }
  CHECK_THROWS_AS(load_potential_csv(path), NegativeValue);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_potential_csv(path), ConfigError);
}

TEST_CASE("negative analytic samples are rejected") {
  const auto v = Potential2D::analytic("dip", {}, [](double x1, double) { return x1; }, std::nullopt,
                                       std::nullopt);
  CHECK_THROWS_AS(sup_over_width(v, StripGeometry(1.0), uniform_grid(1.0, 5)), NegativeValue);
}
