#include "doctest.h"
#include "twoweight/cube.hpp"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"

using namespace twoweight;

TEST_SUITE("cube") {
  TEST_CASE("dilate keeps the center") {
    const Cube q({0.0}, 1.0);
    const Cube t = dilate(q, 3.0);
    CHECK(t.corner()[0] == doctest::Approx(-1.0));
    CHECK(t.side() == doctest::Approx(3.0));

    const Cube sq({0.0, 0.0}, 1.0);
    CHECK(dilate(sq, 1.0) == sq);

    const Cube h = dilate(Cube({2.0}, 2.0), 0.5);
    CHECK(h.corner()[0] == doctest::Approx(2.5));
    CHECK(h.side() == doctest::Approx(1.0));
    CHECK(h.center() == Cube({2.0}, 2.0).center());
  }

  TEST_CASE("dilate rejects nonpositive factors") {
    CHECK_THROWS_AS(dilate(unit_cube(1), 0.0), InvalidInput);
    CHECK_THROWS_AS(dilate(unit_cube(1), -2.0), InvalidInput);
  }

  TEST_CASE("half-open membership") {
    const Cube q({0.0, 0.0}, 1.0);
    CHECK(q.contains(std::vector<double>{0.0, 0.0}));
    CHECK_FALSE(q.contains(std::vector<double>{1.0, 0.5}));
    CHECK(q.contains(Cube({0.5, 0.5}, 0.5)));
    CHECK_FALSE(q.intersects(Cube({1.0, 0.0}, 1.0)));
    CHECK(q.volume() == 1.0);
  }

  TEST_CASE("invalid cubes") {
    CHECK_THROWS_AS(Cube({0.0}, 0.0), InvalidInput);
    CHECK_THROWS_AS(Cube({0.0}, -1.0), InvalidInput);
  }

  TEST_CASE("families") {
    CHECK(dyadic_cubes(unit_cube(2), 3).size() == 64);
    CHECK(shifted_cubes(unit_cube(1), 2).size() == 5);
    const auto f = standard_family(unit_cube(1), 0, 3, false);
    CHECK(f.cubes.size() == 1 + 2 + 4 + 8);
    CHECK_FALSE(f.description.empty());

    const auto a = random_dyadic_family(unit_cube(2), 1, 4, 50, 3);
    const auto b = random_dyadic_family(unit_cube(2), 1, 4, 50, 3);
    CHECK(a.cubes == b.cubes);
    for (const auto& q : a.cubes) CHECK(unit_cube(2).contains(q));

    const auto c = corner_anchored_family(Cube({0.0, 0.0}, 4.0), 3);
    REQUIRE(c.cubes.size() == 4);
    CHECK(c.cubes[3].side() == doctest::Approx(0.5));

    const auto k = cantor_intervals(1.0 / 3.0, 2);
    CHECK(k.cubes.size() == 1 + 2 + 4);
    CHECK(k.cubes.back().corner()[0] == doctest::Approx(8.0 / 9.0));
  }
}
