#include "twoweight/exponents.hpp"

#include <cmath>
#include <limits>

#include "twoweight/error.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

std::string direction_name(ExponentDirection d) {
  switch (d) {
    case ExponentDirection::doubling:
      return "doubling";
    case ExponentDirection::reverse:
      return "reverse";
    case ExponentDirection::diagonal_reverse:
      return "diagonal-reverse";
  }
  return "unknown";
}

namespace {

// Generic scan. `mass(q)` is the (possibly product) mass of a cube; a cube is
// used only when mass(q) > 0. For growth scales the worst ratio is the sup,
// for shrink scales it is the max as well (reverse exponents need the largest
// surviving fraction); the fit direction differs.
template <typename Mass>
ExponentEstimate scan(ExponentDirection dir, std::span<const double> scales, std::span<const Cube> cubes,
                      Mass&& mass) {
  require(!scales.empty(), "need at least one scale");
  const bool growth = dir == ExponentDirection::doubling;
  for (double s : scales) {
    if (growth) {
      require(s > 1.0 && std::isfinite(s), "doubling scales must exceed 1");
    } else {
      require(s > 0.0 && s < 1.0, "reverse doubling scales must lie in (0, 1)");
    }
  }

  std::vector<double> base(cubes.size());
  for_each_chunk(cubes.size(), 64, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) base[i] = mass(cubes[i]);
  });

  ExponentEstimate est;
  est.direction = dir;
  for (double m : base) (m > 0.0 ? est.cubes_used : est.cubes_skipped)++;

  est.exponent = growth ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (double s : scales) {
    auto best = parallel_argmax(cubes.size(), [&](std::size_t i) {
      if (!(base[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      return mass(dilate(cubes[i], s)) / base[i];
    });
    ScaleSample sample;
    sample.scale = s;
    if (best.found()) {
      sample.worst_ratio = best.value;
      sample.extremal = cubes[best.index];
      sample.slope = best.value > 0.0 ? std::log(best.value) / std::log(s) : std::numeric_limits<double>::infinity();
      const bool better = growth ? sample.slope > est.exponent : sample.slope < est.exponent;
      if (better) {
        est.exponent = sample.slope;
        est.extremal = sample.extremal;
      }
    }
    est.scan.push_back(std::move(sample));
  }
  if (!est.extremal) est.exponent = std::numeric_limits<double>::quiet_NaN();
  return est;
}

}  // namespace

ExponentEstimate doubling_exponent(const GridMeasure& mu, std::span<const double> scales,
                                   std::span<const Cube> cubes) {
  return scan(ExponentDirection::doubling, scales, cubes, [&](const Cube& q) { return cube_mass(mu, q); });
}

ExponentEstimate reverse_doubling_exponent(const GridMeasure& mu, std::span<const double> scales,
                                           std::span<const Cube> cubes) {
  return scan(ExponentDirection::reverse, scales, cubes, [&](const Cube& q) { return cube_mass(mu, q); });
}

ExponentEstimate diagonal_reverse_doubling_exponent(const GridMeasure& sigma, const GridMeasure& omega,
                                                    std::span<const double> scales, std::span<const Cube> cubes) {
  require(sigma.dimension() == omega.dimension(), "sigma and omega must share a dimension");
  return scan(ExponentDirection::diagonal_reverse, scales, cubes,
              [&](const Cube& q) { return product_diagonal_mass(sigma, omega, q); });
}

DoublingCheck doubling_check(const GridMeasure& mu, double beta, std::span<const Cube> cubes) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  DoublingCheck out;
  out.beta = beta;
  auto worst = parallel_argmax(cubes.size(), [&](std::size_t i) {
    const double m = cube_mass(mu, cubes[i]);
    if (!(m > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return -cube_mass(mu, dilate(cubes[i], beta)) / m;
  });
  out.cubes_used = worst.evaluated;
  out.cubes_skipped = cubes.size() - worst.evaluated;
  if (worst.found()) {
    out.gamma = -worst.value;
    out.extremal = cubes[worst.index];
  } else {
    out.gamma = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace twoweight
