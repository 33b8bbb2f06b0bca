#include <cmath>
#include <random>

#include "doctest.h"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/measures.hpp"

using namespace twoweight;

namespace {

GridMeasure random_atoms(int n, int level, std::uint64_t seed, int count = 40) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0), w(0.1, 2.0);
  spec::PointMasses pm;
  for (int i = 0; i < count; ++i) {
    spec::Atom a;
    for (int d = 0; d < n; ++d) a.position.push_back(pos(rng));
    a.weight = w(rng);
    pm.atoms.push_back(a);
  }
  return generate(pm, n, level, unit_cube(n));
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("lebesgue cells carry their volume") {
    const auto mu = generate(spec::Lebesgue{}, 1, 3, unit_cube(1));
    REQUIRE(mu.populated_cells() == 8);
    for (double m : mu.cell_masses()) CHECK(m == 0.125);
    CHECK(mu.total_mass() == doctest::Approx(1.0));
  }

  TEST_CASE("line measure lives on the bottom row") {
    const auto mu = generate(spec::LineMeasure{}, 2, 2, unit_cube(2));
    const auto cells = mu.cells();
    REQUIRE(cells.size() == 4);
    for (const auto& c : cells) {
      CHECK(c.index[1] == 0);
      CHECK(c.mass == doctest::Approx(0.25));
    }
    CHECK_THROWS_AS(generate(spec::LineMeasure{}, 1, 2, unit_cube(1)), InvalidInput);
  }

  TEST_CASE("cantor total mass and symmetry") {
    for (int level = 0; level <= 20; ++level) {
      const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, level, unit_cube(1));
      CHECK(std::abs(mu.total_mass() - 1.0) <= 1e-12);
    }
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 12, unit_cube(1));
    // The first-generation pieces are not grid-aligned; the boundary cell blurs them by at most its mass.
    const double left = cube_mass(mu, Cube({0.0}, 1.0 / 3.0)), right = cube_mass(mu, Cube({2.0 / 3.0}, 1.0 / 3.0));
    CHECK(left == doctest::Approx(right).epsilon(1e-12));
    CHECK(std::abs(left - 0.5) <= 0.01);
    CHECK(cube_mass(mu, Cube({0.0}, 0.5)) == doctest::Approx(cube_mass(mu, Cube({0.5}, 0.5))).epsilon(1e-12));
    CHECK(cantor_dimension(1.0 / 3.0) == doctest::Approx(std::log(2.0) / std::log(3.0)));
  }

  TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(generate(spec::CantorProduct{0.5}, 1, 4, unit_cube(1)), InvalidInput);
    CHECK_THROWS_AS(generate(spec::CantorProduct{0.0}, 1, 4, unit_cube(1)), InvalidInput);
    spec::PointMasses pm{{spec::Atom{{0.5}, -1.0}}};
    CHECK_THROWS_AS(generate(pm, 1, 4, unit_cube(1)), InvalidInput);
    spec::PointMasses outside{{spec::Atom{{1.5}, 1.0}}};
    CHECK_THROWS_AS(generate(outside, 1, 4, unit_cube(1)), InvalidInput);
    CHECK_THROWS_AS(generate(spec::DensityTable{2, {1.0, 1.0}}, 1, 4, unit_cube(1)), InvalidInput);
  }

  TEST_CASE("atoms follow the half-open cell convention") {
    spec::PointMasses pm{{spec::Atom{{0.25}, 1.0}}};
    const auto mu = generate(pm, 1, 2, unit_cube(1));
    REQUIRE(mu.populated_cells() == 1);
    CHECK(mu.unravel(mu.cell_ids()[0])[0] == 1);
  }

  TEST_CASE("cube_mass examples") {
    const auto leb = generate(spec::Lebesgue{}, 1, 8, unit_cube(1));
    CHECK(cube_mass(leb, Cube({0.0}, 0.5)) == doctest::Approx(0.5));
    CHECK(cube_mass(leb, Cube({3.0}, 1.0)) == 0.0);
    CHECK(cube_mass(leb, unit_cube(1)) == doctest::Approx(leb.total_mass()));

    const auto line = generate(spec::LineMeasure{}, 2, 6, unit_cube(2));
    for (double R : {1.0, 0.5, 0.25, 0.125}) CHECK(cube_mass(line, Cube({0.0, 0.0}, R)) == doctest::Approx(R));
  }

  TEST_CASE("non-aligned cubes use the uniform-within-cell model") {
    const auto leb = generate(spec::Lebesgue{}, 1, 3, unit_cube(1));
    CHECK(cube_mass(leb, Cube({0.1}, 0.3)) == doctest::Approx(0.3));
    spec::PointMasses pm{{spec::Atom{{0.6}, 1.0}}};
    const auto atom = generate(pm, 1, 1, unit_cube(1));
    CHECK(cube_mass(atom, Cube({0.5}, 0.25)) == doctest::Approx(0.5));
  }

  TEST_CASE("product_diagonal_mass") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    CHECK(product_diagonal_mass(leb, leb, unit_cube(1)) == doctest::Approx(1.0));
    const auto line = generate(spec::LineMeasure{}, 2, 6, unit_cube(2));
    CHECK(product_diagonal_mass(line, line, Cube({0.0, 0.0}, 0.25)) == doctest::Approx(0.0625));
    CHECK(product_diagonal_mass(line, line, Cube({0.0, 0.5}, 0.25)) == 0.0);
    const auto leb2 = generate(spec::Lebesgue{}, 2, 3, unit_cube(2));
    CHECK_THROWS_AS(product_diagonal_mass(leb, leb2, unit_cube(1)), InvalidInput);
  }

  TEST_CASE("additivity under grid-aligned bisection") {
    for (int n : {1, 2}) {
      const auto mu = random_atoms(n, 7, 11 + n);
      const auto fam = random_dyadic_family(unit_cube(n), 0, 6, 60, 5);
      for (const auto& q : fam.cubes) {
        double parts = 0.0;
        for (const auto& c : dyadic_cubes(q, 1)) parts += cube_mass(mu, c);
        CHECK(parts == doctest::Approx(cube_mass(mu, q)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("monotonicity on nested cubes") {
    const auto mu = random_atoms(2, 6, 99);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      const Cube outer({u(rng) * 0.5, u(rng) * 0.5}, 0.2 + 0.3 * u(rng));
      const double s = outer.side() * u(rng);
      const Cube inner({outer.corner()[0] + (outer.side() - s) * u(rng), outer.corner()[1] + (outer.side() - s) * u(rng)},
                       std::max(s, 1e-6));
      CHECK(cube_mass(mu, inner) <= cube_mass(mu, outer) + 1e-12);
    }
  }

  TEST_CASE("refinement consistency") {
    auto same = [](const GridMeasure& a, const GridMeasure& b) {
      REQUIRE(a.level() == b.level());
      const auto ca = a.cells(), cb = b.cells();
      REQUIRE(ca.size() == cb.size());
      for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].index == cb[i].index);
        CHECK(ca[i].mass == doctest::Approx(cb[i].mass).epsilon(1e-13));
      }
    };
    const Cube plane({-1.0, -1.0}, 2.0);
    for (int L = 1; L <= 6; ++L) {
      same(coarsen(generate(spec::Lebesgue{}, 2, L + 1, unit_cube(2))), generate(spec::Lebesgue{}, 2, L, unit_cube(2)));
      same(coarsen(generate(spec::LineMeasure{}, 2, L + 1, plane)), generate(spec::LineMeasure{}, 2, L, plane));
      same(coarsen(generate(spec::CantorProduct{0.3}, 2, L + 1, unit_cube(2))),
           generate(spec::CantorProduct{0.3}, 2, L, unit_cube(2)));
      same(coarsen(random_atoms(1, L + 1, 8)), random_atoms(1, L, 8));
    }
  }

  TEST_CASE("scaled multiplies every mass") {
    const auto mu = random_atoms(1, 6, 2);
    const auto s = scaled(mu, 2.5);
    CHECK(s.total_mass() == doctest::Approx(2.5 * mu.total_mass()));
    CHECK_THROWS_AS(scaled(mu, -1.0), InvalidInput);
  }

  TEST_CASE("JSON round trip and CSV") {
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 2, 4, Cube({-1.0, 0.0}, 2.0));
    const auto back = measure_from_json(to_json(mu));
    CHECK(back.dimension() == 2);
    CHECK(back.level() == 4);
    CHECK(back.box() == mu.box());
    REQUIRE(back.populated_cells() == mu.populated_cells());
    for (std::size_t i = 0; i < mu.populated_cells(); ++i) {
      CHECK(back.cell_ids()[i] == mu.cell_ids()[i]);
      CHECK(back.cell_masses()[i] == mu.cell_masses()[i]);
    }
    const auto csv = to_csv(mu);
    CHECK(csv.rfind("i0,i1,mass\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == mu.populated_cells() + 1);
    CHECK_THROWS_AS(measure_from_json("{\"dimension\": 1}"), std::exception);
  }
}
