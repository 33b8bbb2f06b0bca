#include <cmath>
#include <random>

#include "doctest.h"
#include "twoweight/bellman.hpp"
#include "twoweight/error.hpp"
#include "twoweight/exponents.hpp"
#include "twoweight/families.hpp"
#include "twoweight/poly_doubling.hpp"

using namespace twoweight;

TEST_SUITE("poly_doubling") {
  TEST_CASE("monomial ordering") {
    CHECK(monomials(1, 3) == std::vector<std::vector<int>>{{0}, {1}, {2}});
    const auto m = monomials(2, 3);
    REQUIRE(m.size() == 6);
    CHECK(m[0] == std::vector<int>{0, 0});
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i][0] + m[i][1] >= m[i - 1][0] + m[i - 1][1]);
  }

  TEST_CASE("q_normalize examples") {
    const Cube q = unit_cube(1);
    const auto two = q_normalize(Polynomial{1, 1, {2.0}}, q);
    CHECK(two.poly.coeffs[0] == doctest::Approx(1.0));
    CHECK(two.factor == doctest::Approx(2.0));
    const auto x = q_normalize(Polynomial{1, 2, {0.0, 1.0}}, q);
    CHECK(x.poly.coeffs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(q_normalize(Polynomial{1, 2, {0.0, 0.0}}, q), InvalidInput);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> c(-3.0, 3.0);
    for (int t = 0; t < 50; ++t) {
      const double a = c(rng), b = c(rng);
      const double exact = std::max(std::abs(a), std::abs(a + b));
      CHECK(sup_norm(Polynomial{1, 2, {a, b}}, q).value == doctest::Approx(exact).epsilon(1e-12));
      const auto n = q_normalize(Polynomial{1, 2, {a, b}}, q);
      CHECK(sup_norm(n.poly, q).value == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("sup norm of a quadratic in the plane") {
    // 1 - (x - 1/2)^2 - (y - 1/2)^2 on [0,1]^2 peaks at the center.
    const Polynomial p{2, 3, {0.5, 1.0, 1.0, -1.0, 0.0, -1.0}};
    const auto s = sup_norm(p, unit_cube(2));
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.argmax[0] == doctest::Approx(0.5).epsilon(1e-4));
  }

  TEST_CASE("kappa = 1 is exactly one") {
    EnergyOptions eo;
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto cantor = generate(spec::CantorProduct{1.0 / 3.0}, 2, 7, unit_cube(2));
    for (const auto& q : random_dyadic_family(unit_cube(1), 0, 6, 20, 2).cubes) CHECK(energy_constant(leb, q, 1, eo).value == 1.0);
    for (const auto& q : standard_family(unit_cube(2), 0, 2, false).cubes) {
      if (cube_mass(cantor, q) > 0.0) CHECK(energy_constant(cantor, q, 1, eo).value == 1.0);
    }
    const auto zero = generate(spec::PointMasses{}, 1, 6, unit_cube(1));
    CHECK_THROWS_AS(energy_constant(zero, unit_cube(1), 1, eo), InvalidInput);
  }

  TEST_CASE("kappa = 2 on Lebesgue matches the endpoint oracle") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto e = energy_constant(leb, unit_cube(1), 2);
    CHECK(e.value == doctest::Approx(4.0).epsilon(0.01));
    CHECK(e.value <= 4.0 + 1e-9);
    CHECK(sup_norm(e.minimizer, unit_cube(1)).value == doctest::Approx(1.0).epsilon(1e-6));
    const auto again = energy_constant(leb, unit_cube(1), 2);
    CHECK(again.value == e.value);
  }

  TEST_CASE("Lebesgue constants are uniform over random cubes") {
    const auto leb = generate(spec::Lebesgue{}, 1, 12, unit_cube(1));
    EnergyOptions eo;
    eo.starts = 8;
    for (const auto& q : random_dyadic_family(unit_cube(1), 0, 8, 50, 4).cubes) {
      const double c = energy_constant(leb, q, 2, eo).value;
      CHECK(c == doctest::Approx(4.0).epsilon(0.01));
    }
  }

  TEST_CASE("gap measure degenerates") {
    EnergyOptions eo;
    const double wide = energy_constant(gap_measure(0.1, 14), unit_cube(1), 2, eo).value;
    const double narrow = energy_constant(gap_measure(0.001, 14), unit_cube(1), 2, eo).value;
    CHECK(narrow >= 10.0 * wide);
    CHECK(energy_constant(gap_measure(0.001, 14), unit_cube(1), 1, eo).value == 1.0);
    // Closed form 12 (1 - eps/2)^2 / eps^2 (affine P vanishing near the gap).
    CHECK(wide == doctest::Approx(12.0 * 0.95 * 0.95 / 0.01).epsilon(0.01));
  }

  TEST_CASE("doubling parameters") {
    const auto a = doubling_from_energy(1.0, 1, 0.5);
    CHECK(a.shrink == doctest::Approx(0.25));
    CHECK(a.gamma == doctest::Approx(0.5));
    CHECK(a.epsilon == doctest::Approx(0.25));
    const auto b = doubling_from_energy(4.0, 2, 0.5);
    CHECK(b.shrink == doctest::Approx(1.0 / 16.0));
    CHECK(b.gamma == doctest::Approx(1.0 / 8192.0));
    CHECK(b.d == doctest::Approx(8.0));
    CHECK(b.epsilon == doctest::Approx(1.0 / (2.0 * (1 + 8 + 64 + 512))));
    CHECK_THROWS_AS(doubling_from_energy(0.5, 1, 0.5), InvalidInput);
    CHECK_THROWS_AS(doubling_from_energy(2.0, 1, 1.0), InvalidInput);
  }

  TEST_CASE("measured constants give valid doubling parameters") {
    EnergyOptions eo;
    eo.starts = 8;
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 0, 5, false);
    const auto scan = energy_constant_sup(leb, fam.cubes, 2, eo);
    const auto p = doubling_from_energy(scan.worst.value, 1, 0.5);
    CHECK(doubling_check(leb, p.shrink, fam.cubes).gamma >= p.gamma);

    const auto cantor = generate(spec::CantorProduct{1.0 / 3.0}, 1, 20, unit_cube(1));
    const auto tri = cantor_intervals(1.0 / 3.0, 4);
    const auto cs = energy_constant_sup(cantor, tri.cubes, 2, eo);
    CHECK(cs.worst.value < 4.0);
    const auto pc = doubling_from_energy(cs.worst.value, 1, 0.1);
    CHECK(doubling_check(cantor, pc.shrink, tri.cubes).gamma >= pc.gamma);
  }

  TEST_CASE("Bellman weights have bounded energy constants") {
    BellmanField f(0.2, 64);
    f = bellman_iterate(std::move(f), 100);
    const auto pair = extract_weight_pair(f, 0.3, 0.3, 10);
    const auto u = pair.leaves_u();
    const auto mu = generate(spec::DensityTable{10, u}, 1, 10, unit_cube(1));
    EnergyOptions eo;
    eo.starts = 6;
    double worst = 0.0;
    for (const auto& q : random_dyadic_family(unit_cube(1), 0, 8, 50, 6).cubes) {
      worst = std::max(worst, energy_constant(mu, q, 2, eo).value);
    }
    CHECK(worst <= 5.0);
  }

  TEST_CASE("gram matrix of Lebesgue") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const auto g = gram_matrix(leb, unit_cube(1), 2);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(std::abs(g[1]) <= 1e-14);
    CHECK(g[3] == doctest::Approx(1.0 / 12.0));
  }
}
