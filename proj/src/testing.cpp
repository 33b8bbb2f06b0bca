#include "twoweight/testing.hpp"

#include <cmath>
#include <limits>

#include "twoweight/error.hpp"
#include "twoweight/kernel.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

namespace {

void check_alpha(double alpha, int n) {
  require(alpha > 0.0 && alpha < static_cast<double>(n), "alpha must lie in (0, n)");
}

struct AllCells {
  std::vector<CellIndex> index;
  std::vector<double> weight;
};

AllCells all_cells(const GridMeasure& mu) {
  AllCells out;
  const auto ids = mu.cell_ids();
  const auto masses = mu.cell_masses();
  out.index.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out.index.push_back(mu.unravel(ids[k]));
    out.weight.push_back(masses[k]);
  }
  return out;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

ConstantReport bct_fractional(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                              std::span<const Cube> cubes) {
  require_shared_grid(sigma, omega);
  check_alpha(alpha, sigma.dimension());
  const auto kernel = grid_kernel(sigma, alpha);
  ConstantReport r;
  r.name = "BCT";
  r.scanned = cubes.size();
  for (const Cube& q : cubes) {
    const auto rs = restrict_to(sigma, q);
    const auto rw = restrict_to(omega, q);
    if (!(rs.total > 0.0) || !(rw.total > 0.0)) {
      ++r.skipped;
      continue;
    }
    const auto f = kernel->apply(rw.index, rs.index, rs.weight);
    double pairing = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) pairing += rw.weight[i] * f[i];
    const double v = pairing / std::sqrt(rs.total * rw.total);
    if (!r.extremal_cube || v > r.value) {
      r.value = v;
      r.extremal_cube = q;
      r.extra["pairing"] = pairing;
    }
  }
  return r;
}

ConstantReport cube_testing(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                            std::span<const Cube> cubes, bool backward) {
  require_shared_grid(sigma, omega);
  check_alpha(alpha, sigma.dimension());
  const GridMeasure& src = backward ? omega : sigma;
  const GridMeasure& dst = backward ? sigma : omega;
  const auto kernel = grid_kernel(sigma, alpha);
  ConstantReport r;
  r.name = backward ? "T-backward" : "T-forward";
  r.scanned = cubes.size();
  double best_sq = 0.0;
  for (const Cube& q : cubes) {
    const auto rs = restrict_to(src, q);
    if (!(rs.total > 0.0)) {
      ++r.skipped;
      continue;
    }
    const auto rw = restrict_to(dst, q);
    const auto f = kernel->apply(rw.index, rs.index, rs.weight);
    double energy = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) energy += rw.weight[i] * f[i] * f[i];
    const double sq = energy / rs.total;
    if (!r.extremal_cube || sq > best_sq) {
      best_sq = sq;
      r.extremal_cube = q;
    }
  }
  r.value = std::sqrt(best_sq);
  r.extra["squared"] = best_sq;
  return r;
}

ConstantReport cancellation_constant(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                     std::span<const CancellationSample> samples, bool backward) {
  require_shared_grid(sigma, omega);
  const int n = sigma.dimension();
  check_alpha(alpha, n);
  const GridMeasure& src = backward ? omega : sigma;
  const GridMeasure& dst = backward ? sigma : omega;
  const auto kernel = grid_kernel(sigma, alpha);
  const auto s_cells = all_cells(src);
  const auto d_cells = all_cells(dst);
  auto centers_of = [&](const GridMeasure& mu, const AllCells& c) {
    std::vector<std::vector<double>> out;
    out.reserve(c.index.size());
    for (const auto& idx : c.index) out.push_back(mu.cell_center(mu.linear_id(idx)));
    return out;
  };
  const auto s_centers = centers_of(src, s_cells);
  const auto d_centers = centers_of(dst, d_cells);
  auto dist = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
  };

  ConstantReport r;
  r.name = backward ? "A-cancel-backward" : "A-cancel-forward";
  r.scanned = samples.size();
  for (const auto& smp : samples) {
    require(static_cast<int>(smp.center.size()) == n, "sample center has wrong dimension");
    require(smp.inner > 0.0 && smp.inner <= smp.outer, "need 0 < eps <= N");
    double rhs = 0.0;
    for (std::size_t j = 0; j < s_cells.index.size(); ++j) {
      if (dist(s_centers[j], smp.center) < smp.outer) rhs += s_cells.weight[j];
    }
    const double lhs = parallel_sum(
        d_cells.index.size(),
        [&](std::size_t i) {
          if (!(dist(d_centers[i], smp.center) < smp.outer)) return 0.0;
          double inner = 0.0;
          for (std::size_t j = 0; j < s_cells.index.size(); ++j) {
            const double d = dist(d_centers[i], s_centers[j]);
            if (d > smp.inner && d < smp.outer) inner += kernel->entry(d_cells.index[i], s_cells.index[j]) * s_cells.weight[j];
          }
          return d_cells.weight[i] * inner * inner;
        },
        32);
    double v = 0.0;
    if (rhs > 0.0) {
      v = lhs / rhs;
    } else if (lhs > 0.0) {
      v = std::numeric_limits<double>::infinity();
    }
    if (!r.extremal_sample || v > r.value) {
      r.value = v;
      r.extremal_sample = smp;
    }
  }
  return r;
}

std::vector<CancellationSample> default_cancellation_samples(const Cube& box, int k) {
  require(k >= 0 && k <= 10, "sample generation must lie in [0, 10]");
  const int n = box.dimension();
  const std::int64_t per = std::int64_t{1} << k;
  const double step = box.side() / static_cast<double>(per);
  std::vector<CancellationSample> out;
  std::vector<std::int64_t> j(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> c(box.corner());
    for (int d = 0; d < n; ++d) c[d] += (static_cast<double>(j[d]) + 0.5) * step;
    for (int a = 1; a <= 3; ++a) {
      const double outer = std::ldexp(box.side(), -a);
      for (int b = 1; b <= 3; ++b) out.push_back({c, std::ldexp(outer, -b), outer});
    }
    int d = 0;
    while (d < n && ++j[d] == per) j[d++] = 0;
    if (d == n) break;
  }
  return out;
}

ConstantReport operator_norm(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                             const NormOptions& options) {
  require_shared_grid(sigma, omega);
  check_alpha(alpha, sigma.dimension());
  require(options.tolerance > 0.0 && options.max_iterations >= 1, "invalid power-iteration options");
  const auto kernel = grid_kernel(sigma, alpha, options.self_depth);
  const auto s_cells = all_cells(sigma);
  const auto w_cells = all_cells(omega);
  ConstantReport r;
  r.name = "Norm";
  r.scanned = s_cells.index.size() * w_cells.index.size();
  if (s_cells.index.empty() || w_cells.index.empty()) {
    r.extra["converged"] = 1.0;
    r.extra["iterations"] = 0.0;
    return r;
  }
  std::vector<double> sqrt_s(s_cells.weight.size()), sqrt_w(w_cells.weight.size());
  for (std::size_t j = 0; j < sqrt_s.size(); ++j) sqrt_s[j] = std::sqrt(s_cells.weight[j]);
  for (std::size_t i = 0; i < sqrt_w.size(); ++i) sqrt_w[i] = std::sqrt(w_cells.weight[i]);

  std::vector<double> v(sqrt_s.size(), 1.0 / std::sqrt(static_cast<double>(sqrt_s.size())));
  std::vector<double> tmp(v.size());
  double estimate = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    for (std::size_t j = 0; j < v.size(); ++j) tmp[j] = sqrt_s[j] * v[j];
    auto mv = kernel->apply(w_cells.index, s_cells.index, tmp);
    for (std::size_t i = 0; i < mv.size(); ++i) mv[i] *= sqrt_w[i];
    const double next = norm2(mv);
    if (!(next > 0.0)) break;
    for (std::size_t i = 0; i < mv.size(); ++i) mv[i] *= sqrt_w[i];
    auto back = kernel->apply(s_cells.index, w_cells.index, mv);
    for (std::size_t j = 0; j < back.size(); ++j) back[j] *= sqrt_s[j];
    const double len = norm2(back);
    if (!(len > 0.0)) break;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = back[j] / len;
    const bool done = it > 0 && std::abs(next - estimate) <= options.tolerance * next;
    estimate = next;
    if (done) {
      converged = true;
      ++it;
      break;
    }
  }
  r.value = estimate;
  r.extra["converged"] = converged ? 1.0 : 0.0;
  r.extra["iterations"] = static_cast<double>(it);
  return r;
}

std::vector<double> operator_matrix(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                    std::size_t& rows, std::size_t& cols, int self_depth) {
  require_shared_grid(sigma, omega);
  check_alpha(alpha, sigma.dimension());
  const auto kernel = grid_kernel(sigma, alpha, self_depth);
  const auto s_cells = all_cells(sigma);
  const auto w_cells = all_cells(omega);
  rows = w_cells.index.size();
  cols = s_cells.index.size();
  require(rows * cols <= (std::size_t{1} << 26), "matrix too large for a dense copy");
  std::vector<double> m(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m[i * cols + j] = std::sqrt(w_cells.weight[i]) * kernel->entry(w_cells.index[i], s_cells.index[j]) *
                        std::sqrt(s_cells.weight[j]);
    }
  }
  return m;
}

}  // namespace twoweight
