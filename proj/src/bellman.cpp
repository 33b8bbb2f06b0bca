#include "twoweight/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "twoweight/error.hpp"
#include "twoweight/operators.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

std::vector<Move> default_moves(double tau) {
  const double c = tau / 20.0;
  std::vector<Move> out;
  for (double r1 : {0.0, c, -c}) {
    for (double r2 : {c, -c, 0.5 * c, -0.5 * c}) out.push_back({r1, r2});
  }
  return out;
}

bool in_omega(double x1, double x2) { return x1 > 0.0 && x2 > 0.0 && x1 * x2 < 1.0; }

BellmanField::BellmanField(double tau, int size, double lo, double hi, std::vector<Move> moves)
    : tau_(tau), size_(size), moves_(std::move(moves)) {
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(size >= 2 && size <= 4096, "grid size must lie in [2, 4096]");
  require(lo > 0.0 && hi > lo, "need 0 < lo < hi");
  if (moves_.empty()) moves_ = default_moves(tau);
  require(moves_.size() < 32000, "too many moves");
  for (const auto& m : moves_) {
    require(std::abs(m.r1) <= tau / 20.0 * (1.0 + 1e-12) && std::abs(m.r2) <= tau / 20.0 * (1.0 + 1e-12),
            "moves must satisfy 2|y_i|/x_i <= tau/10");
  }
  log_lo_ = std::log(lo);
  step_ = (std::log(hi) - log_lo_) / static_cast<double>(size - 1);
  values_.assign(static_cast<std::size_t>(size) * size, 0.0);
  argmax_.assign(values_.size(), -1);
}

double BellmanField::coordinate(int i) const { return std::exp(log_lo_ + step_ * i); }

bool BellmanField::active(int i, int j) const { return in_omega(coordinate(i), coordinate(j)); }

double BellmanField::interpolate_in(const std::vector<double>& values, double x1, double x2) const {
  const double top = static_cast<double>(size_ - 1);
  const double u = std::clamp((std::log(x1) - log_lo_) / step_, 0.0, top);
  const double w = std::clamp((std::log(x2) - log_lo_) / step_, 0.0, top);
  const int i = std::min(static_cast<int>(u), size_ - 2);
  const int j = std::min(static_cast<int>(w), size_ - 2);
  const double a = u - i, b = w - j;
  const auto at = [&](int p, int q) { return values[static_cast<std::size_t>(p) * size_ + q]; };
  return (1.0 - a) * ((1.0 - b) * at(i, j) + b * at(i, j + 1)) + a * ((1.0 - b) * at(i + 1, j) + b * at(i + 1, j + 1));
}

double BellmanField::interpolate(double x1, double x2) const { return interpolate_in(values_, x1, x2); }

bool BellmanField::admissible(double x1, double x2, const Move& m) const {
  if (std::abs(m.r1) > tau_ / 20.0 * (1.0 + 1e-12) || std::abs(m.r2) > tau_ / 20.0 * (1.0 + 1e-12)) return false;
  return in_omega(x1 * (1.0 + m.r1), x2 * (1.0 + m.r2)) && in_omega(x1 * (1.0 - m.r1), x2 * (1.0 - m.r2));
}

std::pair<double, int> BellmanField::best_move(double x1, double x2) const {
  double best = 0.0;
  int index = -1;
  for (std::size_t k = 0; k < moves_.size(); ++k) {
    const Move& m = moves_[k];
    if (!admissible(x1, x2, m)) continue;
    const double gain = 2.0 * std::abs(m.r2 * x2) * x1;
    const double v = gain + 0.5 * (interpolate(x1 * (1.0 + m.r1), x2 * (1.0 + m.r2)) +
                                   interpolate(x1 * (1.0 - m.r1), x2 * (1.0 - m.r2)));
    if (index < 0 || v > best) {
      best = v;
      index = static_cast<int>(k);
    }
  }
  return {best, index};
}

void BellmanField::sweep() {
  std::vector<double> next(values_);
  std::vector<std::int16_t> choice(argmax_);
  for_each_chunk(static_cast<std::size_t>(size_), 4, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const double x1 = coordinate(static_cast<int>(i));
      for (int j = 0; j < size_; ++j) {
        const double x2 = coordinate(j);
        if (!in_omega(x1, x2)) continue;
        const auto [v, k] = best_move(x1, x2);
        if (k < 0) continue;  // frozen
        const std::size_t at = i * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j);
        next[at] = v;
        choice[at] = static_cast<std::int16_t>(k);
      }
    }
  });
  values_ = std::move(next);
  argmax_ = std::move(choice);
  ++sweeps_;
}

double BellmanField::max_ratio(int* best_i, int* best_j) const {
  double best = 0.0;
  int bi = -1, bj = -1;
  for (int i = 0; i < size_; ++i) {
    const double x1 = coordinate(i);
    for (int j = 0; j < size_; ++j) {
      const double x2 = coordinate(j);
      if (!in_omega(x1, x2)) continue;
      const double r = value(i, j) / std::sqrt(x1 * x2);
      if (bi < 0 || r > best) {
        best = r;
        bi = i;
        bj = j;
      }
    }
  }
  if (best_i) *best_i = bi;
  if (best_j) *best_j = bj;
  return best;
}

BellmanField bellman_iterate(BellmanField field, int sweeps) {
  require(sweeps >= 0, "sweep count must be nonnegative");
  for (int t = 0; t < sweeps; ++t) field.sweep();
  return field;
}

DivergenceRun iterate_until(BellmanField& field, double target, int max_sweeps) {
  require(max_sweeps >= 0, "sweep budget must be nonnegative");
  DivergenceRun run;
  run.max_ratio = field.max_ratio(&run.best_i, &run.best_j);
  while (run.max_ratio <= target && field.sweeps() < max_sweeps) {
    field.sweep();
    run.max_ratio = field.max_ratio(&run.best_i, &run.best_j);
    run.history.push_back(run.max_ratio);
  }
  run.sweeps = field.sweeps();
  run.reached = run.max_ratio > target;
  return run;
}

double concavity_defect(const BellmanField& field, double x1, double x2, double y1, double y2) {
  require(in_omega(x1, x2) && in_omega(x1 + y1, x2 + y2) && in_omega(x1 - y1, x2 - y2),
          "x, x + y and x - y must lie in Omega");
  return 0.5 * (field.interpolate(x1 + y1, x2 + y2) + field.interpolate(x1 - y1, x2 - y2)) +
         2.0 * std::abs(y2) * x1 - field.interpolate(x1, x2);
}

// ---------------------------------------------------------------------------

namespace {

void expand(const WeightPair& pair, bool take_u, std::vector<double>& out) {
  require(pair.depth <= 22, "expansion limited to depth 22");
  out.assign(std::size_t{1} << pair.depth, 0.0);
  struct Frame {
    std::int32_t node;
    int level;
    std::size_t first;
    double scale;
  };
  std::vector<Frame> stack{{pair.root, 0, 0, pair.root_scale}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const PairNode& n = pair.nodes[static_cast<std::size_t>(f.node)];
    const std::size_t span = std::size_t{1} << (pair.depth - f.level);
    if (n.left < 0 || f.level == pair.depth) {
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(f.first), span, take_u ? n.u * f.scale : n.v / f.scale);
      continue;
    }
    stack.push_back({n.right, f.level + 1, f.first + span / 2, f.scale * n.right_scale});
    stack.push_back({n.left, f.level + 1, f.first, f.scale * n.left_scale});
  }
}

// Nodes in an order where every parent precedes its children.
std::vector<std::int32_t> topological_order(const WeightPair& pair) {
  std::vector<std::int32_t> order(pair.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<std::int32_t>(k);
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return pair.nodes[static_cast<std::size_t>(a)].level < pair.nodes[static_cast<std::size_t>(b)].level;
  });
  return order;
}

}  // namespace

std::vector<double> WeightPair::leaves_u() const {
  std::vector<double> out;
  expand(*this, true, out);
  return out;
}

std::vector<double> WeightPair::leaves_v() const {
  std::vector<double> out;
  expand(*this, false, out);
  return out;
}

WeightPair pair_from_leaves(const std::vector<double>& u, const std::vector<double>& v) {
  require(u.size() == v.size(), "leaf tables must have equal length");
  const HaarTree tu(u), tv(v);
  WeightPair pair;
  pair.depth = tu.depth();
  for (int j = 0; j <= pair.depth; ++j) {
    const std::int64_t count = std::int64_t{1} << j;
    for (std::int64_t i = 0; i < count; ++i) {
      PairNode n;
      n.u = tu.average(j, i);
      n.v = tv.average(j, i);
      n.level = j;
      if (j < pair.depth) {
        const std::int64_t child = (std::int64_t{1} << (j + 1)) - 1 + 2 * i;
        n.left = static_cast<std::int32_t>(child);
        n.right = static_cast<std::int32_t>(child + 1);
      }
      pair.nodes.push_back(n);
    }
  }
  pair.root = 0;
  return pair;
}

WeightPair extract_weight_pair(const BellmanField& field, double x1, double x2, int depth, std::size_t max_nodes) {
  require(in_omega(x1, x2), "start point must lie in Omega");
  require(depth >= 0 && depth <= 100000, "depth must lie in [0, 100000]");

  // Shared nodes sit on the diagonal u = v = sqrt(p), p = x1 x2. p is the start
  // product times factors 1 +- r, keyed by how often each factor occurs.
  std::vector<double> factors;
  auto factor_id = [&](double f) {
    if (f == 1.0) return -1;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (factors[k] == f) return static_cast<int>(k);
    }
    factors.push_back(f);
    return static_cast<int>(factors.size() - 1);
  };
  struct MoveFactors {
    int plus1, plus2, minus1, minus2;
  };
  std::vector<MoveFactors> mf;
  for (const auto& m : field.moves()) {
    mf.push_back({factor_id(1.0 + m.r1), factor_id(1.0 + m.r2), factor_id(1.0 - m.r1), factor_id(1.0 - m.r2)});
  }
  using Key = std::vector<std::int32_t>;  // level, then one count per factor
  const double p0 = x1 * x2;
  auto product_of = [&](const Key& key) {
    double p = p0;
    for (std::size_t k = 0; k < factors.size(); ++k) p *= std::pow(factors[k], key[1 + k]);
    return p;
  };

  WeightPair pair;
  pair.depth = depth;
  std::map<Key, std::int32_t> index;
  std::vector<Key> keys;
  auto intern = [&](const Key& key) {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    require(pair.nodes.size() < max_nodes, "weight pair exceeds the node budget");
    const double s = std::sqrt(product_of(key));
    PairNode n;
    n.u = s;
    n.v = s;
    n.level = key[0];
    const auto id = static_cast<std::int32_t>(pair.nodes.size());
    pair.nodes.push_back(n);
    keys.push_back(key);
    index.emplace(key, id);
    return id;
  };
  auto bump = [](Key& key, int id) {
    if (id >= 0) key[1 + static_cast<std::size_t>(id)]++;
  };

  pair.root = intern(Key(1 + factors.size(), 0));
  pair.root_scale = x1 / pair.nodes[static_cast<std::size_t>(pair.root)].u;
  // Nodes are appended in level order, so a single forward pass expands them.
  for (std::size_t next = 0; next < pair.nodes.size(); ++next) {
    const Key key = keys[next];
    if (key[0] >= depth) continue;
    const double s = pair.nodes[next].u;
    const int k = field.best_move(s, s).second;
    if (k < 0) continue;
    const Move& m = field.moves()[static_cast<std::size_t>(k)];
    if (m.r2 == 0.0 && m.r1 == 0.0) continue;
    Key plus = key, minus = key;
    plus[0] = minus[0] = key[0] + 1;
    bump(plus, mf[k].plus1);
    bump(plus, mf[k].plus2);
    bump(minus, mf[k].minus1);
    bump(minus, mf[k].minus2);
    const auto id_plus = intern(plus);
    const auto id_minus = intern(minus);
    // Child states are s(1 + r1), s(1 + r2) and s(1 - r1), s(1 - r2).
    const double scale_plus = s * (1.0 + m.r1) / pair.nodes[static_cast<std::size_t>(id_plus)].u;
    const double scale_minus = s * (1.0 - m.r1) / pair.nodes[static_cast<std::size_t>(id_minus)].u;
    // I- takes the child with the larger V average so that Delta_I V >= 0.
    const bool plus_first = m.r2 >= 0.0;
    PairNode& n = pair.nodes[next];
    n.left = plus_first ? id_plus : id_minus;
    n.right = plus_first ? id_minus : id_plus;
    n.left_scale = plus_first ? scale_plus : scale_minus;
    n.right_scale = plus_first ? scale_minus : scale_plus;
  }
  return pair;
}

namespace {

struct ChildValues {
  double lu, lv, ru, rv;
};

ChildValues child_values(const WeightPair& pair, const PairNode& n) {
  const PairNode& l = pair.nodes[static_cast<std::size_t>(n.left)];
  const PairNode& r = pair.nodes[static_cast<std::size_t>(n.right)];
  return {l.u * n.left_scale, l.v / n.left_scale, r.u * n.right_scale, r.v / n.right_scale};
}

}  // namespace

std::vector<double> functional_by_level(const WeightPair& pair) {
  // Each term (Delta_I V)(E_I U)|I| is unchanged by the subtree scale, so
  // every node only needs the share of [0,1) it covers.
  std::vector<double> weight(pair.nodes.size(), 0.0);
  weight[static_cast<std::size_t>(pair.root)] = 1.0;
  std::vector<double> levels(static_cast<std::size_t>(pair.depth), 0.0);
  for (const auto id : topological_order(pair)) {
    const PairNode& n = pair.nodes[static_cast<std::size_t>(id)];
    const double w = weight[static_cast<std::size_t>(id)];
    if (n.left < 0 || w == 0.0 || n.level >= pair.depth) continue;
    const auto c = child_values(pair, n);
    levels[static_cast<std::size_t>(n.level)] += w * (c.lv - c.rv) * n.u;
    weight[static_cast<std::size_t>(n.left)] += 0.5 * w;
    weight[static_cast<std::size_t>(n.right)] += 0.5 * w;
  }
  return levels;
}

Certificate verify_certificate(const WeightPair& pair, double tau, double gamma) {
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(!pair.nodes.empty(), "empty weight pair");
  Certificate c;
  c.gamma = gamma;
  c.tau = tau;
  c.depth = pair.depth;
  c.dag_nodes = pair.nodes.size();
  const PairNode& root = pair.nodes[static_cast<std::size_t>(pair.root)];
  c.root_u = root.u * pair.root_scale;
  c.root_v = root.v / pair.root_scale;

  // Reachable nodes and the first dyadic index at which each occurs; -1 once
  // the index no longer fits.
  const auto order = topological_order(pair);
  std::vector<char> reached(pair.nodes.size(), 0);
  std::vector<std::int64_t> first(pair.nodes.size(), -1);
  reached[static_cast<std::size_t>(pair.root)] = 1;
  first[static_cast<std::size_t>(pair.root)] = 0;

  c.positive = true;
  c.product_ok = true;
  c.ratios_ok = true;
  c.averages_ok = true;
  c.max_product = 0.0;
  c.worst_ratio_margin = std::numeric_limits<double>::infinity();
  c.min_delta_v = std::numeric_limits<double>::infinity();
  for (const auto id : order) {
    if (!reached[static_cast<std::size_t>(id)]) continue;
    const PairNode& n = pair.nodes[static_cast<std::size_t>(id)];
    if (!(n.u > 0.0) || !(n.v > 0.0)) c.positive = false;
    const double prod = n.u * n.v;
    c.max_product = std::max(c.max_product, prod);
    if (prod > 1.0 && c.product_ok) {
      c.product_ok = false;
      c.offending = std::pair{static_cast<int>(n.level), first[static_cast<std::size_t>(id)]};
    }
    if (n.left < 0 || n.level >= pair.depth) continue;
    if (!(n.left_scale > 0.0) || !(n.right_scale > 0.0)) c.positive = false;
    const std::int64_t mine = first[static_cast<std::size_t>(id)];
    for (const auto child : {n.left, n.right}) {
      const bool right = child == n.right && n.left != n.right;
      const std::int64_t cand = (mine < 0 || n.level >= 61) ? -1 : 2 * mine + (right ? 1 : 0);
      auto& f = first[static_cast<std::size_t>(child)];
      if (!reached[static_cast<std::size_t>(child)]) {
        f = cand;
      } else if (cand >= 0 && f >= 0 && cand < f) {
        f = cand;
      }
      reached[static_cast<std::size_t>(child)] = 1;
    }
    const auto v = child_values(pair, n);
    const double tol = 1e-12 * std::max({1.0, std::abs(n.u), std::abs(n.v)});
    if (std::abs(n.u - 0.5 * (v.lu + v.ru)) > tol || std::abs(n.v - 0.5 * (v.lv + v.rv)) > tol) c.averages_ok = false;
    for (const double ratio : {v.lu / v.ru, v.lv / v.rv}) {
      const double margin = std::min(ratio - (1.0 - tau), (1.0 + tau) - ratio);
      c.worst_ratio_margin = std::min(c.worst_ratio_margin, margin);
      if (!(margin > 0.0)) c.ratios_ok = false;
    }
    c.min_delta_v = std::min(c.min_delta_v, v.lv - v.rv);
  }
  if (!std::isfinite(c.min_delta_v)) c.min_delta_v = 0.0;
  if (!std::isfinite(c.worst_ratio_margin)) c.worst_ratio_margin = tau;

  double total = 0.0;
  for (double x : functional_by_level(pair)) total += x;
  c.functional = total;
  c.half_functional = 0.5 * total;
  const double scale = std::sqrt(c.root_u * c.root_v);
  c.gamma_achieved = scale > 0.0 ? total / scale : 0.0;
  c.functional_ok = total > gamma * scale;
  if (pair.depth <= 16) c.haar_check = haar_pairing(HaarTree(pair.leaves_u()), HaarTree(pair.leaves_v()));
  return c;
}

CertifiedPair certify_weight_pair(const BellmanField& field, double x1, double x2, double gamma, int max_depth) {
  require(in_omega(x1, x2), "start point must lie in Omega");
  require(max_depth >= 1, "max depth must be positive");
  const double scale = std::sqrt(x1 * x2);
  CertifiedPair out;
  int depth = max_depth;
  for (int probe = std::min(64, max_depth);; probe = std::min(2 * probe, max_depth)) {
    out.probe_depth = probe;
    const auto levels = functional_by_level(extract_weight_pair(field, x1, x2, probe));
    double acc = 0.0;
    int found = -1;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      acc += levels[j];
      if (acc > gamma * scale * (1.0 + 1e-9)) {
        found = static_cast<int>(j) + 1;
        break;
      }
    }
    if (found > 0) {
      depth = found;
      break;
    }
    if (probe == max_depth) break;
  }
  out.pair = extract_weight_pair(field, x1, x2, depth);
  out.certificate = verify_certificate(out.pair, field.tau(), gamma);
  return out;
}

RescaleCheck rescale_invariance_check(const std::vector<double>& u, const std::vector<double>& v, int k,
                                      std::int64_t l) {
  require(k <= 0 && k >= -20, "rescaling needs -20 <= k <= 0 so the target stays dyadic in [0,1)");
  require(l >= 0 && l < (std::int64_t{1} << -k), "target interval must lie in [0, 1)");
  const HaarTree tu(u), tv(v);
  const int M = tu.depth();
  require(tv.depth() == M, "leaf tables must have equal length");
  require(M - k <= 24, "transplanted tree too deep");

  auto functional = [](const HaarTree& a, const HaarTree& b, int top, std::int64_t first, int levels) {
    double acc = 0.0;
    for (int j = 0; j < levels; ++j) {
      const std::int64_t count = std::int64_t{1} << j;
      const double len = std::ldexp(1.0, -(top + j));
      for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t at = (first << j) + i;
        acc += std::abs(b.difference(top + j, at)) * a.average(top + j, at) * len;
      }
    }
    return acc;
  };

  RescaleCheck out;
  out.original = functional(tu, tv, 0, 0, M);

  // S f(x) = f((x - b)/a) on T J; positive filler elsewhere.
  const int total_depth = M - k;
  const std::size_t count = std::size_t{1} << total_depth;
  std::vector<double> su(count, 1.0), sv(count, 1.0);
  const std::size_t offset = static_cast<std::size_t>(l) << M;
  std::copy(u.begin(), u.end(), su.begin() + static_cast<std::ptrdiff_t>(offset));
  std::copy(v.begin(), v.end(), sv.begin() + static_cast<std::ptrdiff_t>(offset));
  const HaarTree ru(su), rv(sv);
  out.rescaled = functional(ru, rv, -k, l, M) / std::ldexp(1.0, k);

  for (int j = 0; j <= M; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t at = (l << j) + i;
      out.average_error = std::max({out.average_error, std::abs(ru.average(j - k, at) - tu.average(j, i)),
                                    std::abs(rv.average(j - k, at) - tv.average(j, i))});
    }
  }
  const double scale = std::max(1.0, std::abs(out.original));
  out.pass = std::abs(out.rescaled - out.original) <= 1e-12 * scale && out.average_error <= 1e-12 * scale;
  return out;
}

}  // namespace twoweight
