#include <cmath>

#include "doctest.h"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/sharpness.hpp"

using namespace twoweight;

TEST_SUITE("sharpness") {
  TEST_CASE("AD window of Lebesgue is [1, 3]") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto w = ad_regularity_check(leb, 1.0, standard_family(unit_cube(1), 0, 5, false).cubes);
    CHECK(w.min == doctest::Approx(1.0));
    CHECK(w.max == doctest::Approx(3.0));
    CHECK(w.pass());
  }

  TEST_CASE("AD window of the Cantor measure") {
    const double theta = cantor_dimension(1.0 / 3.0);
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 18, unit_cube(1));
    const auto fam = standard_family(unit_cube(1), 0, 5, false);
    const auto good = ad_regularity_check(mu, theta, fam.cubes);
    CHECK(good.pass());
    CHECK(good.skipped > 0);

    // The misfit exponent widens the window geometrically with the scale.
    double previous = 0.0;
    for (int k : {2, 4, 6, 8}) {
      const auto bad = ad_regularity_check(mu, 1.0, cantor_intervals(1.0 / 3.0, k).cubes);
      CHECK(bad.ratio() > previous * 2.0);
      previous = bad.ratio();
    }
    CHECK_FALSE(ad_regularity_check(mu, 1.0, cantor_intervals(1.0 / 3.0, 8).cubes).pass());
    CHECK(ad_regularity_check(mu, theta, cantor_intervals(1.0 / 3.0, 8).cubes).pass());
  }

  TEST_CASE("gamma counts") {
    const auto leb = generate(spec::Lebesgue{}, 2, 6, unit_cube(2));
    for (int N = 1; N <= 4; ++N) {
      const auto g = gamma_count(leb, unit_cube(2), N);
      CHECK(g.count == std::size_t{1} << (2 * N));
      CHECK(g.empty.empty());
    }

    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 16, unit_cube(1));
    std::size_t oracle = 0;
    for (int i = 0; i < 16; ++i) oracle += cantor_cdf((i + 1) / 16.0, 1.0 / 3.0) > cantor_cdf(i / 16.0, 1.0 / 3.0);
    const auto g = gamma_count(mu, unit_cube(1), 4);
    CHECK(g.count == oracle);
    CHECK(g.count + g.empty.size() == 16);
    CHECK(static_cast<double>(g.count) <= 4.0 * std::pow(2.0, 4 * cantor_dimension(1.0 / 3.0)));

    const auto delta = generate(spec::PointMasses{{spec::Atom{{0.0}, 1.0}}}, 1, 10, unit_cube(1));
    for (int N = 1; N <= 8; ++N) CHECK(gamma_count(delta, unit_cube(1), N).count == 1);
    CHECK_THROWS_AS(gamma_count(delta, unit_cube(1), 11), InvalidInput);
  }

  TEST_CASE("Cantor accumulation") {
    const double theta = cantor_dimension(1.0 / 3.0);
    const double beta = 0.5 * (1.0 - theta);
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 22, unit_cube(1));
    const Cube q({0.0}, 0.25);
    const auto rep = accumulate_lower_bound(mu, q, beta, 5, 4, Selection::all);
    REQUIRE(rep.energy.size() == 5);
    CHECK(rep.energy[0] == doctest::Approx(rep.c_n * rep.q_mass).epsilon(1e-12));
    CHECK(rep.disjoint);
    CHECK(rep.monotone);
    for (std::size_t m = 1; m < rep.energy.size(); ++m) CHECK(rep.energy[m] > rep.energy[m - 1]);
    for (std::size_t m = 0; m < rep.energy.size(); ++m) {
      CHECK(rep.energy[m] >= 0.9 * (m + 1) * rep.c_n * rep.q_mass);
    }
    REQUIRE(rep.ad_window.has_value());
    CHECK(rep.ad_window->pass());
    CHECK(std::isfinite(rep.a2));
  }

  TEST_CASE("Cantor accumulation picks N and grows it when needed") {
    const double beta = 0.5 * (1.0 - cantor_dimension(1.0 / 3.0));
    const auto mu = generate(spec::CantorProduct{1.0 / 3.0}, 1, 20, unit_cube(1));
    const auto single = accumulate_lower_bound(mu, unit_cube(1), beta, 3, 0, Selection::single);
    CHECK(single.N >= 1);
    CHECK(single.disjoint);
    const auto rep = accumulate_lower_bound(mu, unit_cube(1), beta, 1);
    CHECK(rep.energy.size() == 1);
    CHECK(rep.energy[0] == doctest::Approx(rep.c_n * rep.q_mass));
  }

  TEST_CASE("Lebesgue has no empty subcubes") {
    const auto leb = generate(spec::Lebesgue{}, 1, 12, unit_cube(1));
    CHECK_THROWS_AS(accumulate_lower_bound(leb, unit_cube(1), 0.25, 2), InvalidInput);
  }

  TEST_CASE("line measure divergence") {
    const auto rep = line_measure_divergence(1.0, 10, 10);
    CHECK(std::abs(rep.a2 - 1.0) <= 0.1);
    CHECK(rep.monotone);
    CHECK(rep.r_squared >= 0.98);
    REQUIRE(rep.energy.size() == 10);
    for (std::size_t k = 1; k < rep.energy.size(); ++k) CHECK(rep.energy[k] > rep.energy[k - 1]);
    const auto one = line_measure_divergence(1.0, 1, 6);
    CHECK(one.energy.size() == 1);
    CHECK(std::isfinite(one.energy[0]));
    const auto wide = line_measure_divergence(4.0, 6, 8);
    CHECK(std::abs(wide.a2 - 1.0) <= 0.1);
  }

  TEST_CASE("linear fit") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
  }
}
