#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

enum class ExponentDirection { doubling, reverse, diagonal_reverse };

std::string direction_name(ExponentDirection d);

struct ScaleSample {
  double scale = 0.0;
  double worst_ratio = 0.0;  // sup (doubling) or max (reverse) of the mass ratio
  double slope = 0.0;        // log(worst_ratio) / log(scale)
  std::optional<Cube> extremal;
};

struct ExponentEstimate {
  ExponentDirection direction = ExponentDirection::doubling;
  double exponent = 0.0;
  std::vector<ScaleSample> scan;
  std::optional<Cube> extremal;
  std::size_t cubes_used = 0;
  std::size_t cubes_skipped = 0;  // zero-mass cubes, ratio undefined
  /// Diagonal direction only: theta = exponent / 2 as used by the pairing bound.
  double half_exponent() const { return 0.5 * exponent; }
};

inline const std::vector<double> kDefaultGrowthScales{2.0, 4.0, 8.0, 16.0};
inline const std::vector<double> kDefaultShrinkScales{0.5, 0.25, 0.125, 0.0625};

/// max over t of log(sup_Q |tQ|/|Q|) / log t.
ExponentEstimate doubling_exponent(const GridMeasure& mu, std::span<const double> scales,
                                   std::span<const Cube> cubes);

/// min over s of log(max_Q |sQ|/|Q|) / log s.
ExponentEstimate reverse_doubling_exponent(const GridMeasure& mu, std::span<const double> scales,
                                           std::span<const Cube> cubes);

/// Reverse exponent of sigma x omega tested on diagonal cubes Q x Q.
ExponentEstimate diagonal_reverse_doubling_exponent(const GridMeasure& sigma, const GridMeasure& omega,
                                                    std::span<const double> scales, std::span<const Cube> cubes);

struct DoublingCheck {
  double beta = 0.0;
  double gamma = 0.0;  // inf |beta Q| / |Q| over positive-mass cubes
  std::optional<Cube> extremal;
  std::size_t cubes_used = 0;
  std::size_t cubes_skipped = 0;
  bool doubling() const { return gamma > 0.0; }
};

DoublingCheck doubling_check(const GridMeasure& mu, double beta, std::span<const Cube> cubes);

}  // namespace twoweight
