#include <cmath>

#include "doctest.h"
#include "twoweight/exponents.hpp"
#include "twoweight/families.hpp"

using namespace twoweight;

TEST_SUITE("exponents") {
  TEST_CASE("lebesgue exponents equal the dimension") {
    for (int n : {1, 2}) {
      const auto mu = generate(spec::Lebesgue{}, n, n == 1 ? 12 : 7, unit_cube(n));
      const auto fam = standard_family(unit_cube(n), 1, n == 1 ? 6 : 3, true);
      const auto d = doubling_exponent(mu, kDefaultGrowthScales, fam.cubes);
      const auto r = reverse_doubling_exponent(mu, kDefaultShrinkScales, fam.cubes);
      const auto g = diagonal_reverse_doubling_exponent(mu, mu, kDefaultShrinkScales, fam.cubes);
      CHECK(std::abs(d.exponent - n) <= 1e-6);
      CHECK(std::abs(r.exponent - n) <= 1e-6);
      CHECK(std::abs(g.exponent - 2 * n) <= 1e-6);
      CHECK(g.half_exponent() == doctest::Approx(n));
      CHECK(d.extremal.has_value());
      CHECK(d.scan.size() == kDefaultGrowthScales.size());
      for (const auto& s : r.scan) CHECK(s.worst_ratio <= 1.0);
    }
  }

  TEST_CASE("line measure on axis-centered cubes") {
    const Cube box({-1.0, -1.0}, 2.0);
    const auto line = generate(spec::LineMeasure{}, 2, 8, box);
    const auto fam = axis_centered_family(box, 2, 5);
    CHECK(std::abs(doubling_exponent(line, std::vector<double>{2.0}, fam.cubes).exponent - 1.0) <= 0.05);
    CHECK(std::abs(reverse_doubling_exponent(line, kDefaultShrinkScales, fam.cubes).exponent - 1.0) <= 0.05);
    CHECK(std::abs(diagonal_reverse_doubling_exponent(line, line, kDefaultShrinkScales, fam.cubes).exponent - 2.0) <=
          0.05);
    const auto leb = generate(spec::Lebesgue{}, 2, 8, box);
    CHECK(std::abs(diagonal_reverse_doubling_exponent(leb, line, kDefaultShrinkScales, fam.cubes).exponent - 3.0) <=
          0.05);
  }

  TEST_CASE("a point mass has exponent zero") {
    const Cube box({-1.0}, 2.0);
    const auto delta = generate(spec::PointMasses{{spec::Atom{{0.0}, 1.0}}}, 1, 12, box);
    std::vector<Cube> cubes;
    for (double side : {0.1, 0.05, 0.02}) cubes.push_back(cube_at(std::vector<double>{0.0}, side));
    CHECK(std::abs(doubling_exponent(delta, kDefaultGrowthScales, cubes).exponent) <= 1e-12);
    CHECK(std::abs(reverse_doubling_exponent(delta, kDefaultShrinkScales, cubes).exponent) <= 1e-12);
  }

  TEST_CASE("zero-mass cubes are skipped and counted") {
    const auto delta = generate(spec::PointMasses{{spec::Atom{{0.1}, 1.0}}}, 1, 10, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 2, 4, false);
    const auto d = doubling_exponent(delta, kDefaultGrowthScales, fam.cubes);
    CHECK(d.cubes_skipped > 0);
    CHECK(d.cubes_used + d.cubes_skipped == fam.cubes.size());
  }

  TEST_CASE("doubling_check examples") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 0, 5, false);
    CHECK(doubling_check(leb, 0.5, fam.cubes).gamma == doctest::Approx(0.5));

    const auto delta = generate(spec::PointMasses{{spec::Atom{{0.5}, 1.0}}}, 1, 10, unit_cube(1));
    const std::vector<Cube> centered{unit_cube(1), Cube({0.25}, 0.5)};
    CHECK(doubling_check(delta, 0.5, centered).gamma == doctest::Approx(1.0));

    // Lebesgue on [0, 1/4) and [3/4, 1): nothing in the middle half of [0, 1).
    const auto gap = generate(spec::DensityTable{2, {1.0, 0.0, 0.0, 1.0}}, 1, 6, unit_cube(1));
    const auto check = doubling_check(gap, 0.5, std::vector<Cube>{unit_cube(1)});
    CHECK(check.gamma == 0.0);
    CHECK_FALSE(check.doubling());
  }

  TEST_CASE("diagonal exponent dominates the sum of reverse exponents") {
    const auto leb = generate(spec::Lebesgue{}, 1, 14, unit_cube(1));
    const auto cantor = generate(spec::CantorProduct{1.0 / 3.0}, 1, 14, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 1, 8, true);
    const double r1 = reverse_doubling_exponent(leb, kDefaultShrinkScales, fam.cubes).exponent;
    const double r2 = reverse_doubling_exponent(cantor, kDefaultShrinkScales, fam.cubes).exponent;
    const double diag = diagonal_reverse_doubling_exponent(leb, cantor, kDefaultShrinkScales, fam.cubes).exponent;
    CHECK(diag >= r1 + r2 - 1e-9);
  }

  TEST_CASE("doubling implies a reverse doubling bound") {
    for (int n : {1, 2}) {
      const auto mu = generate(spec::Lebesgue{}, n, n == 1 ? 12 : 7, unit_cube(n));
      const auto fam = standard_family(unit_cube(n), 1, n == 1 ? 6 : 3, false);
      REQUIRE(doubling_check(mu, 1.0 / 3.0, fam.cubes).doubling());
      const double theta = doubling_exponent(mu, kDefaultGrowthScales, fam.cubes).exponent;
      const double bound = 1.0 - (std::pow(3.0, n) - 1.0) * std::pow(5.0, -theta);
      for (const auto& q : fam.cubes) {
        // Cubes whose triple leaves the support see less mass; keep interior ones.
        if (!unit_cube(n).contains(dilate(q, 3.0))) continue;
        CHECK(cube_mass(mu, q) / cube_mass(mu, dilate(q, 3.0)) <= bound + 1e-9);
      }
    }
  }
}
