#include "twoweight/operators.hpp"

#include <cmath>

#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/kernel.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

namespace {

void check_open_alpha(double alpha, int n) {
  require(alpha > 0.0 && alpha < static_cast<double>(n), "alpha must lie in (0, n)");
}

}  // namespace

PairingResult fractional_pairing(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q, double alpha,
                                 int self_depth) {
  require_shared_grid(sigma, omega);
  check_open_alpha(alpha, sigma.dimension());
  const auto rs = restrict_to(sigma, q);
  const auto rw = restrict_to(omega, q);
  PairingResult r;
  r.sigma_cells = rs.index.size();
  r.omega_cells = rw.index.size();
  if (rs.index.empty() || rw.index.empty()) return r;
  const auto kernel = grid_kernel(sigma, alpha, self_depth);
  const auto f = kernel->apply(rw.index, rs.index, rs.weight);
  for (std::size_t i = 0; i < f.size(); ++i) r.value += rw.weight[i] * f[i];
  r.error_bar = kernel->near_error(rw.index, rw.weight, rs.index, rs.weight);
  return r;
}

double pairing_bound_constant(int n, double alpha, double theta) {
  check_open_alpha(alpha, n);
  const double r = theta + alpha - n;
  require(r > 0.0, "theta must exceed n - alpha");
  return std::pow(2.0, n - alpha) * std::pow(3.0, n) * std::pow(9.0, n - alpha) / (1.0 - std::pow(2.0, -r));
}

ShellBound shell_upper_bound(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q, double alpha,
                             double theta) {
  require(sigma.dimension() == omega.dimension() && q.dimension() == sigma.dimension(),
          "measures and cube must share a dimension");
  const int n = sigma.dimension();
  check_open_alpha(alpha, n);
  const double r = theta + alpha - n;
  require(r > 0.0, "theta must exceed n - alpha (the shell series diverges otherwise)");

  ShellBound out;
  out.covering_constant = std::pow(2.0, n - alpha);
  const double ell = q.side();
  const double mass_s = cube_mass(sigma, q);
  const double mass_w = cube_mass(omega, q);
  if (!(mass_s > 0.0) || !(mass_w > 0.0)) return out;

  const double h = std::min(sigma.cell_side(), omega.cell_side());
  const int k_grid = std::max(0, static_cast<int>(std::floor(std::log2(ell / h) + 1e-9)));
  require(k_grid <= 24, "cube too large relative to the grid for the shell sum");
  out.grid_generations = k_grid + 1;

  double series = 0.0;
  for (int k = 0; k <= k_grid; ++k) {
    const auto subcubes = dyadic_cubes(q, k);
    std::vector<double> part_s(chunk_count(subcubes.size(), 256), 0.0), part_w(part_s.size(), 0.0);
    for_each_chunk(subcubes.size(), 256, [&](std::size_t b, std::size_t e, std::size_t c) {
      std::vector<double> l(static_cast<std::size_t>(n)), u(static_cast<std::size_t>(n));
      double as = 0.0, aw = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        const Cube& I = subcubes[i];
        for (int d = 0; d < n; ++d) {
          l[d] = std::max(I.corner()[d] - I.side(), q.corner()[d]);
          u[d] = std::min(I.corner()[d] + 2.0 * I.side(), q.corner()[d] + ell);
        }
        as += sigma.box_mass(l, u);
        aw += omega.box_mass(l, u);
      }
      part_s[c] = as;
      part_w[c] = aw;
    });
    double ss = 0.0, sw = 0.0;
    for (std::size_t c = 0; c < part_s.size(); ++c) {
      ss += part_s[c];
      sw += part_w[c];
    }
    const double term = std::pow(2.0, -k * r) * std::sqrt(ss * sw);
    out.shell_terms.push_back(term);
    series += term;
  }
  out.tail = std::pow(3.0, n) * std::sqrt(mass_s * mass_w) * std::pow(2.0, -(k_grid + 1) * r) / (1.0 - std::pow(2.0, -r));
  series += out.tail;

  const Cube q9 = dilate(q, 9.0);
  const double big = std::sqrt(cube_mass(sigma, q9) * cube_mass(omega, q9));
  out.value = out.covering_constant * std::pow(ell, alpha - n) * big * series;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> fractional_maximal_energy_profile(const GridMeasure& mu, const Cube& q, double beta,
                                                      int max_cutoff) {
  const int n = mu.dimension();
  require(q.dimension() == n, "cube dimension does not match measure dimension");
  require(beta > 0.0 && beta < static_cast<double>(n), "beta must lie in (0, n)");
  require(max_cutoff >= 0, "cutoff must be nonnegative");
  const double ell = q.side();
  const double h = mu.cell_side();
  require(std::ldexp(ell, -max_cutoff) >= h * (1.0 - 1e-12), "cutoff finer than the measure grid");
  require(static_cast<double>(n) * max_cutoff <= 24.0, "cutoff too deep for the candidate tables");

  // Candidate values side^{beta-n} |R & Q|_mu per generation: dyadic grid of Q
  // and the grid shifted by half a side (one extra cube per axis).
  std::vector<std::vector<double>> dyadic(static_cast<std::size_t>(max_cutoff + 1));
  std::vector<std::vector<double>> shifted(dyadic.size());
  for (int k = 0; k <= max_cutoff; ++k) {
    const std::int64_t per = std::int64_t{1} << k;
    const double side = std::ldexp(ell, -k);
    const double scale = std::pow(side, beta - n);
    for (int pass = 0; pass < 2; ++pass) {
      const std::int64_t count_axis = pass == 0 ? per : per + 1;
      const double offset = pass == 0 ? 0.0 : -0.5 * side;
      std::int64_t total = 1;
      for (int d = 0; d < n; ++d) total *= count_axis;
      auto& values = pass == 0 ? dyadic[k] : shifted[k];
      values.resize(static_cast<std::size_t>(total));
      for_each_chunk(values.size(), 1024, [&](std::size_t b, std::size_t e, std::size_t) {
        std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
        for (std::size_t t = b; t < e; ++t) {
          auto r = static_cast<std::int64_t>(t);
          for (int d = 0; d < n; ++d) {
            const double start = q.corner()[d] + offset + side * static_cast<double>(r % count_axis);
            r /= count_axis;
            lo[d] = std::max(start, q.corner()[d]);
            hi[d] = std::min(start + side, q.corner()[d] + ell);
          }
          values[t] = scale * mu.box_mass(lo, hi);
        }
      });
    }
  }

  // Sample points: centers of the grid of Q whose spacing matches the measure grid.
  const int m = std::max(max_cutoff, static_cast<int>(std::floor(std::log2(ell / h) + 1e-9)));
  require(static_cast<double>(n) * m <= 26.0, "too many sample points for the energy integral");
  const std::int64_t per_axis = std::int64_t{1} << m;
  std::int64_t points = 1;
  for (int d = 0; d < n; ++d) points *= per_axis;
  const double volume = std::pow(std::ldexp(ell, -m), n);
  const std::size_t levels = dyadic.size();
  const std::size_t chunk = 4096;
  std::vector<std::vector<double>> partial(chunk_count(static_cast<std::size_t>(points), chunk),
                                           std::vector<double>(levels, 0.0));
  for_each_chunk(static_cast<std::size_t>(points), chunk, [&](std::size_t b, std::size_t e, std::size_t c) {
    std::vector<double> u(static_cast<std::size_t>(n));
    auto& acc = partial[c];
    for (std::size_t p = b; p < e; ++p) {
      auto r = static_cast<std::int64_t>(p);
      for (int d = 0; d < n; ++d) {
        u[d] = std::ldexp(static_cast<double>(r % per_axis) + 0.5, -m);
        r /= per_axis;
      }
      double best = 0.0;
      for (std::size_t k = 0; k < levels; ++k) {
        const std::int64_t per = std::int64_t{1} << k;
        std::int64_t id_d = 0, id_s = 0, stride_d = 1, stride_s = 1;
        for (int d = 0; d < n; ++d) {
          const double t = u[d] * static_cast<double>(per);
          const auto i_d = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(t)), 0, per - 1);
          const auto i_s = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(t + 0.5)), 0, per);
          id_d += i_d * stride_d;
          id_s += i_s * stride_s;
          stride_d *= per;
          stride_s *= per + 1;
        }
        best = std::max({best, dyadic[k][static_cast<std::size_t>(id_d)], shifted[k][static_cast<std::size_t>(id_s)]});
        acc[k] += best * best * volume;
      }
    }
  });
  std::vector<double> energy(levels, 0.0);
  for (const auto& part : partial) {
    for (std::size_t k = 0; k < levels; ++k) energy[k] += part[k];
  }
  return energy;
}

double fractional_maximal_energy(const GridMeasure& mu, const Cube& q, double beta, int cutoff) {
  return fractional_maximal_energy_profile(mu, q, beta, cutoff).back();
}

// ---------------------------------------------------------------------------

HaarTree::HaarTree(std::vector<double> leaves) {
  const std::size_t count = leaves.size();
  require(count >= 1 && (count & (count - 1)) == 0, "leaf count must be a power of two");
  for (double x : leaves) require(std::isfinite(x), "leaf values must be finite");
  depth_ = 0;
  while ((std::size_t{1} << depth_) < count) ++depth_;
  require(depth_ <= 26, "tree depth must not exceed 26");
  nodes_.assign(2 * count - 1, 0.0);
  std::copy(leaves.begin(), leaves.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(count - 1));
  for (std::size_t k = count - 1; k-- > 0;) nodes_[k] = 0.5 * (nodes_[2 * k + 1] + nodes_[2 * k + 2]);
}

double HaarTree::average(int level, std::int64_t i) const {
  require(level >= 0 && level <= depth_ && i >= 0 && i < (std::int64_t{1} << level), "node outside the tree");
  return nodes_[static_cast<std::size_t>((std::int64_t{1} << level) - 1 + i)];
}

double HaarTree::difference(int level, std::int64_t i) const {
  require(level < depth_, "leaves have no difference");
  return average(level + 1, 2 * i) - average(level + 1, 2 * i + 1);
}

std::span<const double> HaarTree::leaves() const {
  const std::size_t count = std::size_t{1} << depth_;
  return std::span<const double>(nodes_).subspan(count - 1, count);
}

HaarTree haar_tree(std::span<const double> leaves) { return HaarTree(std::vector<double>(leaves.begin(), leaves.end())); }

std::vector<double> reconstruct_leaves(const HaarTree& t) {
  std::vector<double> level{t.average(0, 0)};
  for (int j = 0; j < t.depth(); ++j) {
    std::vector<double> next(level.size() * 2);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const double delta = t.difference(j, static_cast<std::int64_t>(i));
      next[2 * i] = level[i] + 0.5 * delta;
      next[2 * i + 1] = level[i] - 0.5 * delta;
    }
    level = std::move(next);
  }
  return level;
}

double dyadic_hilbert(const HaarTree& v, double x) {
  require(x >= 0.0 && x < 1.0, "x must lie in [0, 1)");
  double acc = 0.0;
  for (int j = 0; j < v.depth(); ++j) {
    const auto i = static_cast<std::int64_t>(std::ldexp(x, j));
    acc += v.difference(j, i);
  }
  return 0.5 * acc;
}

double haar_pairing(const HaarTree& u, const HaarTree& v) {
  require(u.depth() == v.depth(), "trees must have equal depth");
  double acc = 0.0;
  for (int j = 0; j < v.depth(); ++j) {
    const std::int64_t count = std::int64_t{1} << j;
    const double len = std::ldexp(1.0, -j);
    for (std::int64_t i = 0; i < count; ++i) acc += v.difference(j, i) * u.average(j, i) * len;
  }
  return 0.5 * acc;
}

double haar_pairing_direct(const HaarTree& u, const HaarTree& v) {
  require(u.depth() == v.depth(), "trees must have equal depth");
  const auto leaves = u.leaves();
  const double len = std::ldexp(1.0, -u.depth());
  double acc = 0.0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    acc += dyadic_hilbert(v, (static_cast<double>(k) + 0.5) * len) * leaves[k] * len;
  }
  return acc;
}

}  // namespace twoweight
