#include <cmath>
#include <random>

#include "doctest.h"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/muckenhoupt.hpp"
#include "twoweight/operators.hpp"

using namespace twoweight;

namespace {

std::vector<double> random_leaves(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> val(0.25, 4.0);
  std::vector<double> x(std::size_t{1} << depth);
  for (double& t : x) t = val(rng);
  return x;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("pairing of Lebesgue on [0,1] is 8/3") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto p = fractional_pairing(leb, leb, unit_cube(1), 0.5);
    CHECK(std::abs(p.value - 8.0 / 3.0) <= 0.02 * 8.0 / 3.0);
    CHECK(p.error_bar >= 0.0);
    CHECK(p.error_bar < 0.01);
  }

  TEST_CASE("pairing of two atoms is one kernel value") {
    const Cube box({0.0, 0.0}, 1.0);
    const auto a = generate(spec::PointMasses{{spec::Atom{{0.1, 0.2}, 2.0}}}, 2, 6, box);
    const auto b = generate(spec::PointMasses{{spec::Atom{{0.7, 0.9}, 0.5}}}, 2, 6, box);
    const auto ca = a.cell_center(a.cell_ids()[0]), cb = b.cell_center(b.cell_ids()[0]);
    const double dist = std::hypot(ca[0] - cb[0], ca[1] - cb[1]);
    const double alpha = 0.7;
    CHECK(fractional_pairing(a, b, box, alpha).value == doctest::Approx(1.0 * std::pow(dist, alpha - 2.0)).epsilon(1e-12));
  }

  TEST_CASE("pairing edge cases") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const auto zero = generate(spec::PointMasses{}, 1, 6, unit_cube(1));
    CHECK(fractional_pairing(leb, zero, unit_cube(1), 0.5).value == 0.0);
    CHECK_THROWS_AS(fractional_pairing(leb, leb, unit_cube(1), 0.0), InvalidInput);
    CHECK_THROWS_AS(fractional_pairing(leb, leb, unit_cube(1), 1.0), InvalidInput);
    const auto leb2 = generate(spec::Lebesgue{}, 1, 7, unit_cube(1));
    CHECK_THROWS_AS(fractional_pairing(leb, leb2, unit_cube(1), 0.5), InvalidInput);
  }

  TEST_CASE("shell bound dominates the pairing and the A2 pairing bound holds") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto fam = random_dyadic_family(unit_cube(1), 0, 8, 100, 17);
    std::vector<Cube> a2_family = fam.cubes;
    for (const auto& q : fam.cubes) a2_family.push_back(dilate(q, 9.0));
    const double a2 = a2_classical(leb, leb, 0.5, a2_family).constant;
    const double c = pairing_bound_constant(1, 0.5, 1.0);
    for (const auto& q : fam.cubes) {
      const double p = fractional_pairing(leb, leb, q, 0.5).value;
      CHECK(shell_upper_bound(leb, leb, q, 0.5, 1.0).value >= p);
      CHECK(p <= c * std::sqrt(a2 * cube_mass(leb, q) * cube_mass(leb, q)));
    }
  }

  TEST_CASE("shell bound details") {
    const auto leb = generate(spec::Lebesgue{}, 1, 8, unit_cube(1));
    CHECK_THROWS_AS(shell_upper_bound(leb, leb, unit_cube(1), 0.5, 0.5), InvalidInput);
    const auto zero = generate(spec::PointMasses{}, 1, 8, unit_cube(1));
    CHECK(shell_upper_bound(leb, zero, unit_cube(1), 0.5, 1.0).value == 0.0);

    // Mass in one fine cell: each generation sees it through 1 to 3^n triples.
    const Cube box({0.0, 0.0}, 1.0);
    const auto atom = generate(spec::PointMasses{{spec::Atom{{0.4, 0.6}, 1.0}}}, 2, 5, box);
    const double theta = 1.5, alpha = 1.0, r = theta + alpha - 2.0;
    const auto s = shell_upper_bound(atom, atom, box, alpha, theta);
    REQUIRE(s.grid_generations == 6);
    for (int k = 0; k < s.grid_generations; ++k) {
      const double mult = s.shell_terms[k] / std::pow(2.0, -k * r);
      CHECK(mult >= 1.0 - 1e-12);
      CHECK(mult <= 9.0 + 1e-12);
    }
    CHECK(s.covering_constant == doctest::Approx(std::pow(2.0, 2.0 - alpha)));
  }

  TEST_CASE("pairing bound constant formula") {
    const double n = 2, a = 1.6, t = 1.5;
    const double expect = std::pow(2.0, n - a) * std::pow(3.0, n) * std::pow(9.0, n - a) / (1.0 - std::pow(2.0, -(t + a - n)));
    CHECK(pairing_bound_constant(2, a, t) == doctest::Approx(expect));
  }

  TEST_CASE("maximal energy") {
    const auto leb = generate(spec::Lebesgue{}, 1, 8, unit_cube(1));
    const double e = fractional_maximal_energy(leb, unit_cube(1), 0.5, 6);
    CHECK(std::isfinite(e));
    CHECK(e >= 1.0 - 1e-12);
    const auto zero = generate(spec::PointMasses{}, 1, 8, unit_cube(1));
    CHECK(fractional_maximal_energy(zero, unit_cube(1), 0.5, 6) == 0.0);
    const auto profile = fractional_maximal_energy_profile(leb, unit_cube(1), 0.5, 6);
    REQUIRE(profile.size() == 7);
    CHECK(profile[6] == doctest::Approx(e));
    for (std::size_t k = 1; k < profile.size(); ++k) CHECK(profile[k] >= profile[k - 1]);
    CHECK_THROWS_AS(fractional_maximal_energy(leb, unit_cube(1), 0.5, 9), InvalidInput);
  }

  TEST_CASE("line measure energy grows linearly in the cutoff") {
    const auto line = generate(spec::LineMeasure{}, 2, 9, unit_cube(2));
    const auto p = fractional_maximal_energy_profile(line, unit_cube(2), 0.5, 8);
    std::vector<double> inc;
    for (std::size_t k = 2; k < p.size(); ++k) inc.push_back(p[k] - p[k - 1]);
    for (double d : inc) {
      CHECK(d > 0.0);
      CHECK(d == doctest::Approx(inc.back()).epsilon(0.05));
    }
  }

  TEST_CASE("haar tree examples") {
    const HaarTree one(std::vector<double>(8, 1.0));
    for (int j = 0; j < 3; ++j) {
      for (std::int64_t i = 0; i < (1 << j); ++i) {
        CHECK(one.average(j, i) == 1.0);
        CHECK(one.difference(j, i) == 0.0);
      }
    }
    const HaarTree step(std::vector<double>{1.0, 0.0});
    CHECK(step.average(0, 0) == 0.5);
    CHECK(step.difference(0, 0) == 1.0);
    CHECK_THROWS_AS(HaarTree(std::vector<double>{1.0, 2.0, 3.0}), InvalidInput);
  }

  TEST_CASE("haar midpoint identity and reconstruction") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      const auto leaves = random_leaves(rng, 8);
      const auto tree = haar_tree(leaves);
      for (int j = 0; j < 8; ++j) {
        for (std::int64_t i = 0; i < (std::int64_t{1} << j); ++i) {
          const double mid = 0.5 * (tree.average(j + 1, 2 * i) + tree.average(j + 1, 2 * i + 1));
          CHECK(std::abs(tree.average(j, i) - mid) <= 1e-12);
        }
      }
      const auto back = reconstruct_leaves(tree);
      for (std::size_t i = 0; i < leaves.size(); ++i) CHECK(std::abs(back[i] - leaves[i]) <= 1e-12);
    }
  }

  TEST_CASE("dyadic hilbert pairing") {
    const HaarTree u(std::vector<double>(4, 1.0)), v(std::vector<double>{1.0, 1.0, 0.0, 0.0});
    CHECK(haar_pairing(u, v) == doctest::Approx(0.5));
    const HaarTree c(std::vector<double>(4, 3.0));
    CHECK(haar_pairing(v, c) == 0.0);
    CHECK(dyadic_hilbert(v, 0.1) == doctest::Approx(0.5));
    CHECK(dyadic_hilbert(v, 0.9) == doctest::Approx(0.5));
    CHECK_THROWS_AS(haar_pairing(u, HaarTree(std::vector<double>(8, 1.0))), InvalidInput);

    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
      const HaarTree a(random_leaves(rng, 8)), b(random_leaves(rng, 8));
      const double direct = haar_pairing_direct(a, b);
      CHECK(std::abs(haar_pairing(a, b) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }

  TEST_CASE("dyadic hilbert pointwise sum") {
    std::mt19937_64 rng(2);
    const HaarTree v(random_leaves(rng, 5));
    for (double x : {0.0, 0.3, 0.51, 0.99}) {
      double sum = 0.0;
      for (int j = 0; j < 5; ++j) sum += v.difference(j, static_cast<std::int64_t>(std::floor(x * (1 << j))));
      CHECK(dyadic_hilbert(v, x) == doctest::Approx(0.5 * sum));
    }
  }
}
