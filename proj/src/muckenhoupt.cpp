#include "twoweight/muckenhoupt.hpp"

#include <cmath>

#include "twoweight/error.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

std::string variant_name(A2Variant v) {
  switch (v) {
    case A2Variant::classical:
      return "classical";
    case A2Variant::one_tailed_forward:
      return "one-tailed-forward";
    case A2Variant::one_tailed_backward:
      return "one-tailed-backward";
  }
  return "unknown";
}

namespace {

void check_alpha(double alpha, int n) {
  require(alpha >= 0.0 && alpha < static_cast<double>(n), "alpha must lie in [0, n)");
}

}  // namespace

double poisson(const Cube& q, const GridMeasure& mu, double alpha) {
  const int n = mu.dimension();
  require(q.dimension() == n, "cube dimension does not match measure dimension");
  check_alpha(alpha, n);
  const double ell = q.side();
  const double p = 2.0 * (n - alpha);
  const auto xq = q.center();
  const auto ids = mu.cell_ids();
  const auto masses = mu.cell_masses();
  const double h = mu.cell_side();
  const unsigned children = 1u << n;

  auto kernel = [&](std::span<const double> c) {
    double d2 = 0.0;
    for (int d = 0; d < n; ++d) d2 += (c[d] - xq[d]) * (c[d] - xq[d]);
    return std::pow(ell / (ell + std::sqrt(d2)), p);
  };

  const double sum = parallel_sum(ids.size(), [&](std::size_t k) {
    auto c = mu.cell_center(ids[k]);
    if (!mu.cell_cube(ids[k]).intersects(q)) return masses[k] * kernel(c);
    // Refine cells meeting Q one dyadic level.
    double acc = 0.0;
    std::vector<double> child(c.size());
    for (unsigned mask = 0; mask < children; ++mask) {
      for (int d = 0; d < n; ++d) child[d] = c[d] + (((mask >> d) & 1u) ? 0.25 : -0.25) * h;
      acc += kernel(child);
    }
    return masses[k] * acc / static_cast<double>(children);
  });
  return sum / std::pow(ell, n - alpha);
}

MuckenhouptReport a2_classical(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                               std::span<const Cube> cubes) {
  require(sigma.dimension() == omega.dimension(), "sigma and omega must share a dimension");
  const int n = sigma.dimension();
  check_alpha(alpha, n);
  MuckenhouptReport r;
  r.variant = A2Variant::classical;
  r.alpha = alpha;
  r.cubes_scanned = cubes.size();
  auto best = parallel_argmax(cubes.size(), [&](std::size_t i) {
    const Cube& q = cubes[i];
    return product_diagonal_mass(sigma, omega, q) / std::pow(q.side(), 2.0 * (n - alpha));
  });
  if (best.found()) {
    r.constant = best.value;
    r.extremal = cubes[best.index];
  }
  return r;
}

MuckenhouptReport a2_one_tailed(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                std::span<const Cube> cubes, bool backward) {
  require(sigma.dimension() == omega.dimension(), "sigma and omega must share a dimension");
  const int n = sigma.dimension();
  check_alpha(alpha, n);
  const GridMeasure& tail = backward ? omega : sigma;
  const GridMeasure& local = backward ? sigma : omega;
  MuckenhouptReport r;
  r.variant = backward ? A2Variant::one_tailed_backward : A2Variant::one_tailed_forward;
  r.alpha = alpha;
  r.cubes_scanned = cubes.size();
  // Cubes are scanned serially here since poisson() already parallelizes over cells.
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const Cube& q = cubes[i];
    const double m = cube_mass(local, q);
    if (!(m > 0.0)) continue;
    const double v = poisson(q, tail, alpha) * m / std::pow(q.side(), n - alpha);
    if (!r.extremal || v > r.constant) {
      r.constant = v;
      r.extremal = q;
    }
  }
  return r;
}

}  // namespace twoweight
