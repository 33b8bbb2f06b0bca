#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/kernel.hpp"
#include "twoweight/muckenhoupt.hpp"
#include "twoweight/operators.hpp"
#include "twoweight/testing.hpp"

using namespace twoweight;

namespace {

double dense_norm(const GridMeasure& sigma, const GridMeasure& omega, double alpha) {
  std::size_t rows = 0, cols = 0;
  const auto m = operator_matrix(sigma, omega, alpha, rows, cols);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
      m.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

}  // namespace

TEST_SUITE("testing") {
  TEST_CASE("BCT of Lebesgue on [0,1]") {
    const auto leb = generate(spec::Lebesgue{}, 1, 9, unit_cube(1));
    const auto r = bct_fractional(leb, leb, 0.5, std::vector<Cube>{unit_cube(1)});
    CHECK(std::abs(r.value - 8.0 / 3.0) <= 0.02 * 8.0 / 3.0);
    CHECK(r.name == "BCT");
    CHECK(r.extremal_cube.has_value());
  }

  TEST_CASE("BCT of the line measure grows by a constant per level") {
    std::vector<double> values;
    for (int L = 4; L <= 8; ++L) {
      const auto line = generate(spec::LineMeasure{}, 2, L, unit_cube(2));
      values.push_back(bct_fractional(line, line, 1.0, std::vector<Cube>{unit_cube(2)}).value);
    }
    for (std::size_t i = 2; i < values.size(); ++i) {
      const double d = values[i] - values[i - 1];
      CHECK(d > 0.0);
      CHECK(d == doctest::Approx(values[i - 1] - values[i - 2]).epsilon(0.05));
    }
  }

  TEST_CASE("zero measures") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const auto zero = generate(spec::PointMasses{}, 1, 6, unit_cube(1));
    const std::vector<Cube> unit{unit_cube(1)};
    const auto b = bct_fractional(leb, zero, 0.5, unit);
    CHECK(b.value == 0.0);
    CHECK(b.skipped == 1);
    CHECK(cube_testing(zero, leb, 0.5, unit).value == 0.0);
    CHECK(cancellation_constant(zero, leb, 0.5, default_cancellation_samples(unit_cube(1), 2)).value == 0.0);
  }

  TEST_CASE("cube testing of Lebesgue against the quadrature oracle") {
    // I(1)(x) = 2 (sqrt x + sqrt(1 - x)) and its square integrates to 4 + pi.
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const auto r = cube_testing(leb, leb, 0.5, std::vector<Cube>{unit_cube(1)});
    CHECK(r.extra.at("squared") == doctest::Approx(4.0 + std::numbers::pi).epsilon(0.02));
    CHECK(r.value == doctest::Approx(std::sqrt(r.extra.at("squared"))));
  }

  TEST_CASE("cube testing of a centered atom") {
    // n = 1, alpha = 3/4: integral of |x - 1/2|^{-1/2} over [0,1] is 2 sqrt 2.
    const auto leb = generate(spec::Lebesgue{}, 1, 12, unit_cube(1));
    const auto atom = generate(spec::PointMasses{{spec::Atom{{0.5}, 1.0}}}, 1, 12, unit_cube(1));
    const auto r = cube_testing(atom, leb, 0.75, std::vector<Cube>{unit_cube(1)});
    CHECK(r.extra.at("squared") == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(0.05));
  }

  TEST_CASE("cancellation constant against the quadrature oracle") {
    const auto leb = generate(spec::Lebesgue{}, 1, 10, unit_cube(1));
    const std::vector<CancellationSample> one{{{0.5}, 0.125, 0.5}};
    const auto r = cancellation_constant(leb, leb, 0.5, one);
    auto g = [](double b) { return b > 0.125 ? 2.0 * (std::sqrt(b) - std::sqrt(0.125)) : 0.0; };
    double oracle = 0.0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) {
      const double x = (i + 0.5) / steps;
      const double f = g(std::min(0.5, 1.0 - x)) + g(std::min(0.5, x));
      oracle += f * f / steps;
    }
    CHECK(r.value == doctest::Approx(oracle).epsilon(0.02));

    const std::vector<CancellationSample> empty{{{0.5}, 0.25, 0.25}};
    CHECK(cancellation_constant(leb, leb, 0.5, empty).value == 0.0);
    const std::vector<CancellationSample> bad{{{0.5}, 0.5, 0.25}};
    CHECK_THROWS_AS(cancellation_constant(leb, leb, 0.5, bad), InvalidInput);
  }

  TEST_CASE("operator norm against a dense SVD") {
    const auto leb = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const auto cantor = generate(spec::CantorProduct{1.0 / 3.0}, 1, 6, unit_cube(1));
    for (const auto* omega : {&leb, &cantor}) {
      const auto r = operator_norm(leb, *omega, 0.5);
      CHECK(r.extra.at("converged") == 1.0);
      CHECK(r.value == doctest::Approx(dense_norm(leb, *omega, 0.5)).epsilon(1e-6));
    }
    const auto leb2 = generate(spec::Lebesgue{}, 2, 4, unit_cube(2));
    CHECK(operator_norm(leb2, leb2, 1.2).value == doctest::Approx(dense_norm(leb2, leb2, 1.2)).epsilon(1e-6));
  }

  TEST_CASE("operator norm refines consistently") {
    const auto l6 = generate(spec::Lebesgue{}, 1, 6, unit_cube(1));
    const auto l8 = generate(spec::Lebesgue{}, 1, 8, unit_cube(1));
    CHECK(operator_norm(l8, l8, 0.5).value == doctest::Approx(dense_norm(l6, l6, 0.5)).epsilon(0.01));
  }

  TEST_CASE("operator matrix entries") {
    const auto s = generate(spec::CantorProduct{0.3}, 1, 5, unit_cube(1));
    const auto w = generate(spec::Lebesgue{}, 1, 5, unit_cube(1));
    std::size_t rows = 0, cols = 0;
    const auto m = operator_matrix(s, w, 0.5, rows, cols);
    REQUIRE(rows == w.populated_cells());
    REQUIRE(cols == s.populated_cells());
    const auto k = grid_kernel(w, 0.5);
    for (std::size_t i = 0; i < rows; i += 5) {
      for (std::size_t j = 0; j < cols; j += 3) {
        const auto ci = w.unravel(w.cell_ids()[i]), cj = s.unravel(s.cell_ids()[j]);
        const double expect = k->entry(ci, cj) * std::sqrt(s.cell_masses()[j]) * std::sqrt(w.cell_masses()[i]);
        CHECK(m[i * cols + j] == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("one-cell atoms give the self value") {
    const auto a = generate(spec::PointMasses{{spec::Atom{{0.3}, 2.0}}}, 1, 4, unit_cube(1));
    const auto k = grid_kernel(a, 0.5);
    const CellIndex c = a.unravel(a.cell_ids()[0]);
    CHECK(operator_norm(a, a, 0.5).value == doctest::Approx(2.0 * k->entry(c, c)));
  }

  TEST_CASE("BCT is below the testing constants and the norm") {
    const Cube plane({-1.0, -1.0}, 2.0);
    struct Pair {
      GridMeasure s, w;
      double alpha;
      CubeFamily fam;
    };
    std::vector<Pair> pairs;
    pairs.push_back({generate(spec::Lebesgue{}, 1, 7, unit_cube(1)), generate(spec::CantorProduct{1.0 / 3.0}, 1, 7, unit_cube(1)),
                     0.5, standard_family(unit_cube(1), 0, 5, true)});
    pairs.push_back({generate(spec::Lebesgue{}, 2, 5, plane), generate(spec::LineMeasure{}, 2, 5, plane), 1.5,
                     standard_family(plane, 0, 3, true)});
    for (const auto& p : pairs) {
      const auto bct = bct_fractional(p.s, p.w, p.alpha, p.fam.cubes);
      const auto tf = cube_testing(p.s, p.w, p.alpha, p.fam.cubes);
      const auto tb = cube_testing(p.s, p.w, p.alpha, p.fam.cubes, true);
      const auto norm = operator_norm(p.s, p.w, p.alpha);
      CHECK(bct.value <= tf.value * (1 + 1e-12));
      CHECK(bct.value <= tb.value * (1 + 1e-12));
      CHECK(bct.value <= norm.value * (1 + 1e-9));
      // BCT finite on the scan forces A2 finite on the same scan.
      CHECK(std::isfinite(a2_classical(p.s, p.w, p.alpha, p.fam.cubes).constant));
      for (const auto& q : p.fam.cubes) {
        const double ms = cube_mass(p.s, q), mw = cube_mass(p.w, q);
        if (!(ms > 0.0 && mw > 0.0)) continue;
        const double pairing = fractional_pairing(p.s, p.w, q, p.alpha).value;
        const double t = cube_testing(p.s, p.w, p.alpha, std::vector<Cube>{q}).value;
        CHECK(pairing <= t * std::sqrt(ms * mw) * (1 + 1e-12));
      }
    }
  }
}
