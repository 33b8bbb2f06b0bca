#include "twoweight/kernel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "twoweight/error.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

namespace {

constexpr int kRecursionRadius = 2;  // offsets beyond this go straight to quadrature
constexpr std::int64_t kMaxFarTable = std::int64_t{1} << 22;

double center_kernel(std::span<const std::int64_t> o, double exponent) {
  double d2 = 0.0;
  for (auto x : o) d2 += static_cast<double>(x) * static_cast<double>(x);
  return std::pow(std::sqrt(d2), exponent);
}

std::int64_t inf_norm(std::span<const std::int64_t> o) {
  std::int64_t m = 0;
  for (auto x : o) m = std::max<std::int64_t>(m, x < 0 ? -x : x);
  return m;
}

// Average of |x - y|^exponent over x in [0,1)^n, y in o + [0,1)^n by a
// 4-point Gauss-Legendre product rule in each of the 2n variables.
double gauss_average(std::span<const std::int64_t> o, double exponent) {
  static constexpr double node[4] = {0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                                     0.9305681557970263};
  static constexpr double weight[4] = {0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                                       0.1739274225687269};
  const int n = static_cast<int>(o.size());
  // One-dimensional difference u = y - x has the same distribution for every
  // coordinate pattern, so tabulate the 16 (difference, weight) pairs per axis.
  double diff[3][16], w[3][16];
  for (int d = 0; d < n; ++d) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        diff[d][a * 4 + b] = static_cast<double>(o[d]) + node[b] - node[a];
        w[d][a * 4 + b] = weight[a] * weight[b];
      }
    }
  }
  double acc = 0.0;
  int pick[3] = {0, 0, 0};
  while (true) {
    double d2 = 0.0, wt = 1.0;
    for (int d = 0; d < n; ++d) {
      d2 += diff[d][pick[d]] * diff[d][pick[d]];
      wt *= w[d][pick[d]];
    }
    acc += wt * std::pow(d2, 0.5 * exponent);
    int d = 0;
    while (d < n && ++pick[d] == 16) pick[d++] = 0;
    if (d == n) break;
  }
  return acc;
}

}  // namespace

NearFieldTable::NearFieldTable(int dimension, double alpha, int depth) : n_(dimension), alpha_(alpha), depth_(depth) {
  require(dimension >= 1 && dimension <= 3, "near-field table supports dimension 1..3");
  require(alpha > 0.0 && alpha < dimension, "alpha must lie in (0, n)");
  require(depth >= 1 && depth <= 8, "self-subdivision depth must lie in [1, 8]");

  const int width = 2 * kRecursionRadius + 1;
  int states = 1;
  for (int d = 0; d < n_; ++d) states *= width;
  const double exponent = alpha - n_;
  const double level_factor = std::pow(2.0, n_ - alpha) / std::pow(4.0, n_);
  const double self_factor = level_factor / (1.0 - std::pow(2.0, -alpha));
  const unsigned kids = 1u << n_;

  std::vector<double> memo(static_cast<std::size_t>((depth + 1) * states), std::numeric_limits<double>::quiet_NaN());
  auto encode = [&](std::span<const std::int64_t> o) {
    int code = 0, stride = 1;
    for (int d = 0; d < n_; ++d) {
      code += static_cast<int>(o[d] + kRecursionRadius) * stride;
      stride *= width;
    }
    return code;
  };

  std::map<std::vector<std::int64_t>, double> floor_cache;
  auto floor_value = [&](const std::vector<std::int64_t>& o) {
    auto it = floor_cache.find(o);
    if (it != floor_cache.end()) return it->second;
    const double v = gauss_average(o, exponent);
    floor_cache.emplace(o, v);
    return v;
  };

  std::function<double(int, const std::vector<std::int64_t>&)> G = [&](int lvl, const std::vector<std::int64_t>& o) {
    const std::int64_t norm = inf_norm(o);
    if (norm > kRecursionRadius) return floor_value(o);
    double& slot = memo[static_cast<std::size_t>(lvl * states + encode(o))];
    if (!std::isnan(slot)) return slot;
    std::vector<std::int64_t> child(static_cast<std::size_t>(n_));
    double acc = 0.0;
    if (norm == 0) {
      // Coincident cells: the 2^n diagonal child pairs reproduce G(0) at half
      // scale, which closes the recursion exactly.
      for (unsigned a = 0; a < kids; ++a) {
        for (unsigned b = 0; b < kids; ++b) {
          if (a == b) continue;
          for (int d = 0; d < n_; ++d) child[d] = static_cast<std::int64_t>((b >> d) & 1u) - ((a >> d) & 1u);
          acc += lvl == 0 ? floor_value(child) : G(lvl - 1, child);
        }
      }
      slot = self_factor * acc;
      return slot;
    }
    if (lvl == 0) {
      slot = floor_value(o);
      return slot;
    }
    for (unsigned a = 0; a < kids; ++a) {
      for (unsigned b = 0; b < kids; ++b) {
        for (int d = 0; d < n_; ++d) child[d] = 2 * o[d] + static_cast<std::int64_t>((b >> d) & 1u) - ((a >> d) & 1u);
        acc += G(lvl - 1, child);
      }
    }
    slot = level_factor * acc;
    return slot;
  };

  int near_states = 1;
  for (int d = 0; d < n_; ++d) near_states *= 3;
  near_.resize(static_cast<std::size_t>(near_states));
  error_.resize(static_cast<std::size_t>(near_states));
  std::vector<std::int64_t> o(static_cast<std::size_t>(n_));
  for (int code = 0; code < near_states; ++code) {
    int c = code;
    for (int d = 0; d < n_; ++d) {
      o[d] = c % 3 - 1;
      c /= 3;
    }
    const double fine = G(depth, o);
    const double coarse = G(depth - 1, o);
    near_[static_cast<std::size_t>(code)] = fine;
    error_[static_cast<std::size_t>(code)] = std::abs(fine - coarse);
  }
}

int NearFieldTable::index_of(std::span<const std::int64_t> offset) const {
  int code = 0, stride = 1;
  for (int d = 0; d < n_; ++d) {
    code += static_cast<int>(offset[d] + 1) * stride;
    stride *= 3;
  }
  return code;
}

double NearFieldTable::value(std::span<const std::int64_t> offset) const {
  if (inf_norm(offset) > 1) return center_kernel(offset, alpha_ - n_);
  return near_[static_cast<std::size_t>(index_of(offset))];
}

double NearFieldTable::error(std::span<const std::int64_t> offset) const {
  if (inf_norm(offset) > 1) return 0.0;
  return error_[static_cast<std::size_t>(index_of(offset))];
}

// ---------------------------------------------------------------------------

RestrictedCells restrict_to(const GridMeasure& mu, const Cube& q) {
  require(q.dimension() == mu.dimension(), "cube dimension does not match measure dimension");
  RestrictedCells out;
  const int n = mu.dimension();
  const auto ids = mu.cell_ids();
  const auto masses = mu.cell_masses();
  const double h = mu.cell_side();
  const auto& box = mu.box().corner();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    auto idx = mu.unravel(ids[k]);
    double frac = 1.0;
    for (int d = 0; d < n && frac > 0.0; ++d) {
      const double lo = box[d] + static_cast<double>(idx[d]) * h;
      const double a = std::max(lo, q.corner()[d]);
      const double b = std::min(lo + h, q.corner()[d] + q.side());
      frac *= b > a ? std::min(1.0, (b - a) / h) : 0.0;
    }
    if (frac <= 0.0) continue;
    const double w = masses[k] * frac;
    out.linear.push_back(ids[k]);
    out.index.push_back(std::move(idx));
    out.weight.push_back(w);
    out.total += w;
  }
  return out;
}

void require_shared_grid(const GridMeasure& a, const GridMeasure& b) {
  require(a.dimension() == b.dimension(), "measures must share a dimension");
  require(a.level() == b.level() && a.box() == b.box(), "measures must live on the same grid (box and level)");
}

// ---------------------------------------------------------------------------

DiscreteRiesz::DiscreteRiesz(int dimension, int level, double cell_side, double alpha, int self_depth)
    : n_(dimension),
      alpha_(alpha),
      cells_per_axis_(std::int64_t{1} << level),
      scale_(std::pow(cell_side, alpha - dimension)),
      near_(dimension, alpha, self_depth) {
  const std::int64_t P = 2 * cells_per_axis_ - 1;
  std::int64_t entries = 1;
  for (int d = 0; d < n_ && entries <= kMaxFarTable; ++d) entries *= P;
  if (entries > kMaxFarTable) return;
  far_.resize(static_cast<std::size_t>(entries));
  for_each_chunk(static_cast<std::size_t>(entries), 4096, [&](std::size_t b, std::size_t e, std::size_t) {
    std::vector<std::int64_t> o(static_cast<std::size_t>(n_));
    for (std::size_t t = b; t < e; ++t) {
      auto r = static_cast<std::int64_t>(t);
      for (int d = 0; d < n_; ++d) {
        o[d] = r % P - (cells_per_axis_ - 1);
        r /= P;
      }
      far_[t] = near_.value(o);
    }
  });
}

std::int64_t DiscreteRiesz::table_offset(std::span<const std::int64_t> i, std::span<const std::int64_t> j,
                                         bool& near) const {
  const std::int64_t P = 2 * cells_per_axis_ - 1;
  std::int64_t t = 0, stride = 1;
  near = true;
  for (int d = 0; d < n_; ++d) {
    const std::int64_t o = i[d] - j[d];
    if (o > 1 || o < -1) near = false;
    t += (o + cells_per_axis_ - 1) * stride;
    stride *= P;
  }
  return t;
}

double DiscreteRiesz::entry(std::span<const std::int64_t> i, std::span<const std::int64_t> j) const {
  if (!far_.empty()) {
    bool near = false;
    return scale_ * far_[static_cast<std::size_t>(table_offset(i, j, near))];
  }
  std::vector<std::int64_t> o(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) o[d] = i[d] - j[d];
  return scale_ * near_.value(o);
}

double DiscreteRiesz::error(std::span<const std::int64_t> i, std::span<const std::int64_t> j) const {
  std::vector<std::int64_t> o(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) o[d] = i[d] - j[d];
  return scale_ * near_.error(o);
}

std::vector<double> DiscreteRiesz::apply(const std::vector<CellIndex>& targets, const std::vector<CellIndex>& sources,
                                         std::span<const double> weights) const {
  require(sources.size() == weights.size(), "one weight per source cell");
  std::vector<double> f(targets.size(), 0.0);
  if (targets.empty() || sources.empty()) return f;
  if (!far_.empty()) {
    const std::int64_t P = 2 * cells_per_axis_ - 1;
    auto coord = [&](const CellIndex& c) {
      std::int64_t t = 0, stride = 1;
      for (int d = 0; d < n_; ++d) {
        t += c[d] * stride;
        stride *= P;
      }
      return t;
    };
    std::int64_t center = 0, stride = 1;
    for (int d = 0; d < n_; ++d) {
      center += (cells_per_axis_ - 1) * stride;
      stride *= P;
    }
    std::vector<std::int64_t> src(sources.size());
    for (std::size_t j = 0; j < sources.size(); ++j) src[j] = center - coord(sources[j]);
    const double* table = far_.data();
    for_each_chunk(targets.size(), 32, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        const std::int64_t ti = coord(targets[i]);
        double acc = 0.0;
        for (std::size_t j = 0; j < src.size(); ++j) acc += table[ti + src[j]] * weights[j];
        f[i] = scale_ * acc;
      }
    });
    return f;
  }
  for_each_chunk(targets.size(), 32, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < sources.size(); ++j) acc += entry(targets[i], sources[j]) * weights[j];
      f[i] = acc;
    }
  });
  return f;
}

double DiscreteRiesz::near_error(const std::vector<CellIndex>& targets, std::span<const double> u,
                                 const std::vector<CellIndex>& sources, std::span<const double> w) const {
  return parallel_sum(
      targets.size(),
      [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sources.size(); ++j) {
          bool near = true;
          for (int d = 0; d < n_ && near; ++d) {
            const std::int64_t o = targets[i][d] - sources[j][d];
            near = o >= -1 && o <= 1;
          }
          if (near) acc += error(targets[i], sources[j]) * w[j];
        }
        return u[i] * acc;
      },
      32);
}

namespace {

// Building the offset table costs (2S-1)^n kernel evaluations, so scans over
// many cubes share one instance per grid.
std::shared_ptr<const DiscreteRiesz> cached_kernel(int n, int level, double h, double alpha, int depth) {
  using Key = std::tuple<int, int, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const DiscreteRiesz>> cache;
  const Key key{n, level, h, alpha, depth};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto k = std::make_shared<const DiscreteRiesz>(n, level, h, alpha, depth);
  std::lock_guard lock(mutex);
  if (cache.size() >= 8) cache.clear();
  cache.emplace(key, k);
  return k;
}

}  // namespace

std::shared_ptr<const DiscreteRiesz> grid_kernel(const GridMeasure& mu, double alpha, int self_depth) {
  return cached_kernel(mu.dimension(), mu.level(), mu.cell_side(), alpha, self_depth);
}

}  // namespace twoweight
