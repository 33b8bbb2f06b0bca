#include "twoweight/families.hpp"

#include <cmath>
#include <random>

#include "twoweight/error.hpp"

namespace twoweight {

namespace {

// Calls fn(corner) for every point corner0 + step * j, j in [0, count)^n.
template <typename Fn>
void for_each_grid_corner(const std::vector<double>& corner0, double step, std::int64_t count, Fn&& fn) {
  const int n = static_cast<int>(corner0.size());
  std::vector<std::int64_t> j(static_cast<std::size_t>(n), 0);
  std::vector<double> corner(corner0);
  while (true) {
    for (int d = 0; d < n; ++d) corner[d] = corner0[d] + step * static_cast<double>(j[d]);
    fn(corner);
    int d = 0;
    while (d < n && ++j[d] == count) j[d++] = 0;
    if (d == n) break;
  }
}

}  // namespace

std::vector<Cube> dyadic_cubes(const Cube& box, int k) {
  require(k >= 0 && k <= 30, "dyadic generation must lie in [0, 30]");
  const std::int64_t per_axis = std::int64_t{1} << k;
  const double side = box.side() / static_cast<double>(per_axis);
  std::vector<Cube> out;
  for_each_grid_corner(box.corner(), side, per_axis, [&](const std::vector<double>& c) { out.emplace_back(c, side); });
  return out;
}

std::vector<Cube> shifted_cubes(const Cube& box, int k) {
  require(k >= 0 && k <= 30, "dyadic generation must lie in [0, 30]");
  const std::int64_t per_axis = std::int64_t{1} << k;
  const double side = box.side() / static_cast<double>(per_axis);
  std::vector<double> start(box.corner());
  for (double& x : start) x -= 0.5 * side;
  std::vector<Cube> out;
  for_each_grid_corner(start, side, per_axis + 1, [&](const std::vector<double>& c) { out.emplace_back(c, side); });
  return out;
}

CubeFamily standard_family(const Cube& box, int k_min, int k_max, bool shifted) {
  require(0 <= k_min && k_min <= k_max, "need 0 <= k_min <= k_max");
  CubeFamily f;
  for (int k = k_min; k <= k_max; ++k) {
    auto d = dyadic_cubes(box, k);
    f.cubes.insert(f.cubes.end(), d.begin(), d.end());
    if (shifted) {
      auto s = shifted_cubes(box, k);
      f.cubes.insert(f.cubes.end(), s.begin(), s.end());
    }
  }
  f.description = std::string(shifted ? "dyadic+shifted" : "dyadic") + " generations " + std::to_string(k_min) +
                  ".." + std::to_string(k_max);
  return f;
}

CubeFamily axis_centered_family(const Cube& box, int k_min, int k_max) {
  require(box.dimension() == 2, "axis-centered cubes are planar");
  require(0 <= k_min && k_min <= k_max && k_max <= 30, "need 0 <= k_min <= k_max <= 30");
  CubeFamily f;
  for (int k = k_min; k <= k_max; ++k) {
    const double side = std::ldexp(box.side(), -k);
    const double step = 0.5 * side;
    const std::int64_t count = (std::int64_t{1} << (k + 1)) + 1;
    for (std::int64_t j = 0; j < count; ++j) {
      std::vector<double> corner{box.corner()[0] + step * static_cast<double>(j) - 0.5 * side, -0.5 * side};
      Cube q(std::move(corner), side);
      if (box.contains(q)) f.cubes.push_back(std::move(q));
    }
  }
  f.description = "axis-centered generations " + std::to_string(k_min) + ".." + std::to_string(k_max);
  return f;
}

CubeFamily random_dyadic_family(const Cube& box, int k_min, int k_max, std::size_t count, std::uint64_t seed) {
  require(0 <= k_min && k_min <= k_max && k_max <= 30, "need 0 <= k_min <= k_max <= 30");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gen(k_min, k_max);
  CubeFamily f;
  f.cubes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int k = gen(rng);
    const std::int64_t per_axis = std::int64_t{1} << k;
    std::uniform_int_distribution<std::int64_t> pos(0, per_axis - 1);
    const double side = box.side() / static_cast<double>(per_axis);
    std::vector<double> corner(box.corner());
    for (double& x : corner) x += side * static_cast<double>(pos(rng));
    f.cubes.emplace_back(std::move(corner), side);
  }
  f.description = "random dyadic generations " + std::to_string(k_min) + ".." + std::to_string(k_max) +
                  " seed " + std::to_string(seed);
  return f;
}

CubeFamily corner_anchored_family(const Cube& base, int j_max) {
  require(j_max >= 0 && j_max <= 30, "j_max must lie in [0, 30]");
  CubeFamily f;
  for (int j = 0; j <= j_max; ++j) f.cubes.emplace_back(base.corner(), std::ldexp(base.side(), -j));
  f.description = "corner-anchored [c, c + 2^-j side), j = 0.." + std::to_string(j_max);
  return f;
}

CubeFamily cantor_intervals(double ratio, int j_max) {
  require(ratio > 0.0 && ratio < 0.5, "ratio must lie in (0, 1/2)");
  require(j_max >= 0 && j_max <= 20, "generation must lie in [0, 20]");
  CubeFamily f;
  std::vector<double> starts{0.0};
  double len = 1.0;
  for (int j = 0; j <= j_max; ++j) {
    for (double a : starts) f.cubes.emplace_back(std::vector<double>{a}, len);
    std::vector<double> next;
    for (double a : starts) {
      next.push_back(a);
      next.push_back(a + len * (1.0 - ratio));
    }
    starts = std::move(next);
    len *= ratio;
  }
  f.description = "cantor intervals ratio " + std::to_string(ratio) + " generations 0.." + std::to_string(j_max);
  return f;
}

}  // namespace twoweight
