#pragma once

#include <optional>
#include <span>
#include <string>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

enum class A2Variant { classical, one_tailed_forward, one_tailed_backward };

std::string variant_name(A2Variant v);

struct MuckenhouptReport {
  A2Variant variant = A2Variant::classical;
  double alpha = 0.0;
  double constant = 0.0;
  std::optional<Cube> extremal;
  std::size_t cubes_scanned = 0;
};

/// Reproducing Poisson integral P^alpha(Q, mu) under the cell-uniform model.
double poisson(const Cube& q, const GridMeasure& mu, double alpha);

/// sup_Q |Q|_sigma |Q|_omega / l(Q)^{2(n - alpha)}.
MuckenhouptReport a2_classical(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                               std::span<const Cube> cubes);

/// sup_Q P^alpha(Q, sigma) |Q|_omega / l(Q)^{n - alpha}; backward swaps the roles.
MuckenhouptReport a2_one_tailed(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                std::span<const Cube> cubes, bool backward = false);

}  // namespace twoweight
