#include "twoweight/sharpness.hpp"

#include <cmath>
#include <limits>

#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/muckenhoupt.hpp"
#include "twoweight/operators.hpp"

namespace twoweight {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "fit needs at least two points");
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

RatioWindow ad_regularity_check(const GridMeasure& mu, double theta, std::span<const Cube> cubes, double bound) {
  require(theta >= 0.0, "theta must be nonnegative");
  require(bound >= 1.0, "comparability bound must be at least 1");
  RatioWindow w;
  w.bound = bound;
  for (const Cube& q : cubes) {
    if (!(cube_mass(mu, q) > 0.0)) {
      ++w.skipped;
      continue;
    }
    const double r = cube_mass(mu, dilate(q, 3.0)) / std::pow(q.side(), theta);
    if (!w.min_cube || r < w.min) {
      w.min = r;
      w.min_cube = q;
    }
    if (!w.max_cube || r > w.max) {
      w.max = r;
      w.max_cube = q;
    }
    ++w.used;
  }
  return w;
}

namespace {

void check_depth(const GridMeasure& mu, const Cube& q, int depth) {
  require(depth >= 0 && depth <= 30, "subcube depth must lie in [0, 30]");
  require(std::ldexp(q.side(), -depth) >= mu.cell_side() * (1.0 - 1e-9), "subcubes finer than the measure grid");
}

}  // namespace

GammaCount gamma_count(const GridMeasure& mu, const Cube& q, int N) {
  require(q.dimension() == mu.dimension(), "cube dimension does not match measure dimension");
  require(N >= 1, "N must be at least 1");
  check_depth(mu, q, N);
  GammaCount g;
  for (const Cube& c : dyadic_cubes(q, N)) {
    ++g.total;
    if (cube_mass(mu, c) > 0.0) {
      ++g.count;
    } else {
      g.empty.push_back(c);
    }
  }
  return g;
}

namespace {

struct RoundResult {
  bool complete = true;  // every positive parent had an empty subcube
  double value = 0.0;
  std::vector<Cube> region;
  std::vector<Cube> positive;  // parents of the next round
};

RoundResult run_round(const GridMeasure& mu, std::span<const Cube> parents, int N, double beta, Selection selection) {
  const int n = mu.dimension();
  RoundResult r;
  for (const Cube& p : parents) {
    const double mass = cube_mass(mu, p);
    const double lower = std::pow(p.side(), beta - n) * mass;  // inf over P of M^beta(1_P mu)
    bool found = false;
    for (const Cube& c : dyadic_cubes(p, N)) {
      if (cube_mass(mu, c) > 0.0) {
        r.positive.push_back(c);
        continue;
      }
      if (found && selection == Selection::single) continue;
      found = true;
      r.value += std::pow(c.side(), n) * lower * lower;
      r.region.push_back(c);
    }
    if (!found) r.complete = false;
  }
  return r;
}

// Marks the grid cells of each region; false if two regions share a cell.
bool regions_disjoint(const GridMeasure& mu, const std::vector<std::vector<Cube>>& regions,
                      std::vector<std::size_t>& cells, std::vector<std::string>& warnings) {
  const int n = mu.dimension();
  const std::int64_t per = mu.cells_per_axis();
  double total = 1.0;
  for (int d = 0; d < n; ++d) total *= static_cast<double>(per);
  cells.assign(regions.size(), 0);
  if (total > static_cast<double>(std::int64_t{1} << 26)) {
    warnings.push_back("grid too large for the cell-level disjointness check; region counts omitted");
    return true;
  }
  std::vector<std::uint8_t> owner(static_cast<std::size_t>(total), 0);
  const double h = mu.cell_side();
  bool ok = true;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    for (const Cube& c : regions[k]) {
      const auto span = static_cast<std::int64_t>(std::llround(c.side() / h));
      std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), j(static_cast<std::size_t>(n), 0);
      for (int d = 0; d < n; ++d) lo[d] = std::llround((c.corner()[d] - mu.box().corner()[d]) / h);
      while (true) {
        std::int64_t id = 0, stride = 1;
        for (int d = 0; d < n; ++d) {
          id += (lo[d] + j[d]) * stride;
          stride *= per;
        }
        auto& o = owner[static_cast<std::size_t>(id)];
        if (o != 0) ok = false;
        o = static_cast<std::uint8_t>(k + 1);
        ++cells[k];
        int d = 0;
        while (d < n && ++j[d] == span) j[d++] = 0;
        if (d == n) break;
      }
    }
  }
  return ok;
}

}  // namespace

SharpnessReport accumulate_lower_bound(const GridMeasure& mu, const Cube& q, double beta, int rounds, int N,
                                       Selection selection) {
  const int n = mu.dimension();
  require(q.dimension() == n, "cube dimension does not match measure dimension");
  require(beta > 0.0 && beta < 0.5 * n, "beta must lie in (0, n/2)");
  require(rounds >= 1 && rounds <= 64, "rounds must lie in [1, 64]");
  require(N >= 0, "N must be nonnegative");

  SharpnessReport rep;
  rep.scenario = "cantor-ad";
  rep.q_mass = cube_mass(mu, q);
  require(rep.q_mass > 0.0, "Q must carry positive mass");

  // AD regularity of order n - 2 beta on the subcubes of Q down to 6 generations.
  const int finest = static_cast<int>(std::floor(std::log2(q.side() / mu.cell_side()) + 1e-9));
  {
    std::vector<Cube> scan;
    for (int k = 0; k <= std::min(5, finest); ++k) {
      auto d = dyadic_cubes(q, k);
      scan.insert(scan.end(), d.begin(), d.end());
    }
    rep.ad_window = ad_regularity_check(mu, n - 2.0 * beta, scan);
    if (!rep.ad_window->pass()) rep.warnings.push_back("measure fails the AD regularity window on Q");
    rep.a2 = a2_classical(mu, mu, 2.0 * beta, scan).constant;
  }

  int depth_n = N;
  if (depth_n == 0) {
    // Smallest N with an empty subcube in Q (the first round's parent).
    depth_n = 1;
    while (depth_n <= finest && gamma_count(mu, q, depth_n).empty.empty()) ++depth_n;
  }
  while (true) {
    require(depth_n >= 1 && depth_n * rounds <= finest,
            "no N with rounds * N within the grid leaves an empty subcube in every positive cube");
    std::vector<std::vector<Cube>> regions;
    std::vector<double> values;
    std::vector<Cube> parents{q};
    bool complete = true;
    for (int j = 0; j < rounds && complete; ++j) {
      auto r = run_round(mu, parents, depth_n, beta, selection);
      complete = r.complete;
      values.push_back(r.value);
      regions.push_back(std::move(r.region));
      parents = std::move(r.positive);
    }
    if (!complete) {
      rep.warnings.push_back("N = " + std::to_string(depth_n) + " leaves a positive cube without empty subcubes; N incremented");
      ++depth_n;
      continue;
    }
    rep.N = depth_n;
    rep.c_n = values.front() / rep.q_mass;
    double acc = 0.0;
    for (double v : values) {
      acc += v;
      rep.increments.push_back(v);
      if (!(v > 0.0)) rep.monotone = false;
      rep.energy.push_back(acc);
    }
    rep.disjoint = regions_disjoint(mu, regions, rep.region_cells, rep.warnings);
    break;
  }
  std::vector<double> xs;
  for (std::size_t k = 0; k < rep.energy.size(); ++k) xs.push_back(static_cast<double>(k + 1));
  if (xs.size() >= 2) {
    const auto f = linear_fit(xs, rep.energy);
    rep.slope = f.slope;
    rep.intercept = f.intercept;
    rep.r_squared = f.r_squared;
  }
  return rep;
}

SharpnessReport line_measure_divergence(double R, int k_max, int level) {
  require(R > 0.0 && std::isfinite(R), "R must be positive");
  require(k_max >= 1 && k_max <= level, "need 1 <= k_max <= level");
  const Cube q({0.0, 0.0}, R);
  const GridMeasure mu = generate(spec::LineMeasure{}, 2, level, q);
  SharpnessReport rep;
  rep.scenario = "line-measure";
  rep.q_mass = cube_mass(mu, q);
  const auto family = corner_anchored_family(q, level);
  rep.a2 = std::sqrt(a2_classical(mu, mu, 1.0, family.cubes).constant);
  const auto profile = fractional_maximal_energy_profile(mu, q, 0.5, k_max);
  std::vector<double> xs;
  for (int k = 1; k <= k_max; ++k) {
    rep.energy.push_back(profile[static_cast<std::size_t>(k)] / rep.q_mass);
    xs.push_back(static_cast<double>(k));
  }
  for (std::size_t k = 1; k < rep.energy.size(); ++k) {
    const double d = rep.energy[k] - rep.energy[k - 1];
    rep.increments.push_back(d);
    if (!(d > 0.0)) rep.monotone = false;
  }
  if (xs.size() >= 2) {
    const auto f = linear_fit(xs, rep.energy);
    rep.slope = f.slope;
    rep.intercept = f.intercept;
    rep.r_squared = f.r_squared;
  }
  return rep;
}

}  // namespace twoweight
