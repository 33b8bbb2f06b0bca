#include <cmath>

#include "doctest.h"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/muckenhoupt.hpp"

using namespace twoweight;

TEST_SUITE("muckenhoupt") {
  TEST_CASE("line measure pair has sqrt(A2) = 1") {
    const auto line = generate(spec::LineMeasure{}, 2, 8, unit_cube(2));
    const auto fam = corner_anchored_family(unit_cube(2), 6);
    const auto r = a2_classical(line, line, 1.0, fam.cubes);
    CHECK(std::abs(std::sqrt(r.constant) - 1.0) <= 0.1);
    CHECK(r.extremal.has_value());
  }

  TEST_CASE("lebesgue pair at alpha = 0") {
    const auto leb = generate(spec::Lebesgue{}, 1, 8, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 0, 5, false);
    CHECK(a2_classical(leb, leb, 0.0, fam.cubes).constant == doctest::Approx(1.0));
  }

  TEST_CASE("cantor pair of matching order stays bounded") {
    const double theta = cantor_dimension(1.0 / 3.0);
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 18, unit_cube(1));
    const auto fam = cantor_intervals(1.0 / 3.0, 8);
    const auto r = a2_classical(mu, mu, 1.0 - theta, fam.cubes);
    CHECK(r.constant > 0.0);
    CHECK(r.constant <= 16.0);
  }

  TEST_CASE("poisson examples") {
    // Atom at the center of Q.
    const Cube q({0.25}, 0.5);
    const auto delta = generate(spec::PointMasses{{spec::Atom{{0.5}, 1.0}}}, 1, 14, unit_cube(1));
    for (double alpha : {0.0, 0.3, 0.7}) {
      CHECK(poisson(q, delta, alpha) == doctest::Approx(std::pow(0.5, alpha - 1.0)).epsilon(1e-3));
    }
    // Lebesgue on a wide box: the integral of l/(l+|x|)^2 over R is 2.
    const auto wide = generate(spec::Lebesgue{}, 1, 14, Cube({-64.0}, 128.0));
    const double p = poisson(Cube({0.0}, 1.0), wide, 0.0);
    CHECK(p < 2.0);
    CHECK(p > 2.0 * (1.0 - 2.0 / 64.0));
    // Far atom: one cell, exact kernel at the cell center.
    const auto far = generate(spec::PointMasses{{spec::Atom{{100.2}, 1.0}}}, 1, 10, Cube({0.0}, 128.0));
    const double center = far.cell_center(far.cell_ids()[0])[0];
    const double d = center - 0.5;
    CHECK(poisson(Cube({0.0}, 1.0), far, 0.0) == doctest::Approx(1.0 / ((1.0 + d) * (1.0 + d))).epsilon(1e-12));
  }

  TEST_CASE("one-tailed examples") {
    const auto leb = generate(spec::Lebesgue{}, 1, 12, Cube({-1.0}, 3.0));
    const std::vector<Cube> unit{Cube({0.0}, 1.0)};
    const double narrow = a2_one_tailed(leb, leb, 0.0, unit).constant;
    const auto wider = generate(spec::Lebesgue{}, 1, 14, Cube({-15.0}, 32.0));
    const double wide = a2_one_tailed(wider, wider, 0.0, unit).constant;
    CHECK(narrow < wide);
    CHECK(wide < 2.0);

    // Far atom: decays like d^{-2(n - alpha)}.
    const Cube box({0.0}, 256.0);
    const auto lw = generate(spec::Lebesgue{}, 1, 12, box);
    auto far = [&](double x) { return generate(spec::PointMasses{{spec::Atom{{x}, 1.0}}}, 1, 12, box); };
    const double a = a2_one_tailed(far(64.0), lw, 0.0, unit).constant;
    const double b = a2_one_tailed(far(128.0), lw, 0.0, unit).constant;
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.03));

    const auto zero = generate(spec::PointMasses{}, 1, 12, box);
    CHECK(a2_one_tailed(lw, zero, 0.0, unit).constant == 0.0);
  }

  TEST_CASE("alpha outside [0, n) is rejected") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const std::vector<Cube> unit{unit_cube(1)};
    CHECK_THROWS_AS(a2_classical(leb, leb, 1.0, unit), InvalidInput);
    CHECK_THROWS_AS(a2_one_tailed(leb, leb, -0.1, unit), InvalidInput);
  }

  TEST_CASE("symmetry, dominance and scaling") {
    const auto sigma = generate(spec::CantorProduct{0.3}, 2, 7, unit_cube(2));
    const auto omega = generate(spec::Lebesgue{}, 2, 7, unit_cube(2));
    const auto fam = standard_family(unit_cube(2), 0, 4, true);
    for (double alpha : {0.0, 0.5, 1.5}) {
      const auto ab = a2_classical(sigma, omega, alpha, fam.cubes);
      const auto ba = a2_classical(omega, sigma, alpha, fam.cubes);
      CHECK(ab.constant == ba.constant);
      const double floor = std::pow(4.0, alpha - 2.0) * ab.constant;
      CHECK(a2_one_tailed(sigma, omega, alpha, fam.cubes).constant >= floor * (1.0 - 1e-9));
      CHECK(a2_one_tailed(sigma, omega, alpha, fam.cubes, true).constant >= floor * (1.0 - 1e-9));
      const auto s3 = scaled(sigma, 3.0);
      CHECK(a2_classical(s3, omega, alpha, fam.cubes).constant == doctest::Approx(3.0 * ab.constant).epsilon(1e-13));
      CHECK(a2_one_tailed(s3, omega, alpha, fam.cubes).constant ==
            doctest::Approx(3.0 * a2_one_tailed(sigma, omega, alpha, fam.cubes).constant).epsilon(1e-13));
    }
  }
}
