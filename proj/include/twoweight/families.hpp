#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twoweight/cube.hpp"

namespace twoweight {

/// A finite list of cubes plus a short description of how it was built,
/// carried into every report as scan metadata.
struct CubeFamily {
  std::vector<Cube> cubes;
  std::string description;
};

/// The 2^{nk} dyadic subcubes of `box` at generation k.
std::vector<Cube> dyadic_cubes(const Cube& box, int k);

/// Generation-k dyadic grid of `box` shifted by half a side in every
/// coordinate; (2^k + 1)^n cubes, the outer ones straddle the box boundary.
std::vector<Cube> shifted_cubes(const Cube& box, int k);

/// Dyadic cubes of generations [k_min, k_max], optionally with the shifted grids.
CubeFamily standard_family(const Cube& box, int k_min, int k_max, bool shifted = true);

/// Plane cubes of side 2^{-k} * side(box) centered on the axis {x2 = 0}, with
/// centers on the generation-(k+1) grid of the box, kept only when they lie
/// inside the box. Generations [k_min, k_max].
CubeFamily axis_centered_family(const Cube& box, int k_min, int k_max);

/// `count` dyadic subcubes of `box` with generation uniform in [k_min, k_max]
/// and position uniform; reproducible from the seed.
CubeFamily random_dyadic_family(const Cube& box, int k_min, int k_max, std::size_t count, std::uint64_t seed);

/// Cubes [corner, corner + 2^{-j} side)^n for j in [0, j_max], all sharing
/// the corner of `base`.
CubeFamily corner_anchored_family(const Cube& base, int j_max);

/// Construction intervals of the Cantor set on [0,1] keeping the two outer
/// pieces of relative length `ratio`: the 2^j intervals of length ratio^j for
/// j in [0, j_max].
CubeFamily cantor_intervals(double ratio, int j_max);

}  // namespace twoweight
