#include "twoweight/poly_doubling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "twoweight/error.hpp"
#include "twoweight/parallel.hpp"

namespace twoweight {

std::vector<std::vector<int>> monomials(int n, int kappa) {
  require(n >= 1 && n <= 3, "dimension must lie in [1, 3]");
  require(kappa >= 1 && kappa <= 8, "kappa must lie in [1, 8]");
  std::vector<std::vector<int>> out;
  for (int deg = 0; deg < kappa; ++deg) {
    std::vector<int> b(static_cast<std::size_t>(n), 0);
    // All exponent vectors of total degree deg, last coordinate varying fastest.
    std::vector<std::vector<int>> level;
    auto rec = [&](auto&& self, int d, int left) -> void {
      if (d == n - 1) {
        b[d] = left;
        level.push_back(b);
        return;
      }
      for (int k = left; k >= 0; --k) {
        b[d] = k;
        self(self, d + 1, left - k);
      }
    };
    rec(rec, 0, deg);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

namespace {

double monomial_value(const std::vector<int>& b, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t d = 0; d < b.size(); ++d) {
    for (int k = 0; k < b[d]; ++k) v *= x[d];
  }
  return v;
}

void check_poly(const Polynomial& p) {
  require(p.coeffs.size() == monomials(p.n, p.kappa).size(), "coefficient count does not match (n, kappa)");
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(m), 0.0);
  w.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Golden-section maximization of f on [a, b].
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Grid points of Q with `per` points per axis, endpoints included.
template <typename Fn>
void for_each_sample(const Cube& q, int per, Fn&& fn) {
  const int n = q.dimension();
  std::vector<int> j(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    for (int d = 0; d < n; ++d) x[d] = q.corner()[d] + q.side() * j[d] / static_cast<double>(per - 1);
    fn(x);
    int d = 0;
    while (d < n && ++j[d] == per) j[d++] = 0;
    if (d == n) break;
  }
}

}  // namespace

double evaluate(const Polynomial& p, std::span<const double> x) {
  check_poly(p);
  require(static_cast<int>(x.size()) == p.n, "point has wrong dimension");
  const auto mons = monomials(p.n, p.kappa);
  double v = 0.0;
  for (std::size_t k = 0; k < mons.size(); ++k) v += p.coeffs[k] * monomial_value(mons[k], x);
  return v;
}

SupNorm sup_norm(const Polynomial& p, const Cube& q, int samples_per_axis) {
  check_poly(p);
  require(q.dimension() == p.n, "cube dimension does not match polynomial");
  require(samples_per_axis >= 2, "need at least two samples per axis");
  const auto mons = monomials(p.n, p.kappa);
  auto abs_at = [&](std::span<const double> x) {
    double v = 0.0;
    for (std::size_t k = 0; k < mons.size(); ++k) v += p.coeffs[k] * monomial_value(mons[k], x);
    return std::abs(v);
  };
  SupNorm s;
  s.value = -1.0;
  for_each_sample(q, samples_per_axis, [&](const std::vector<double>& x) {
    const double v = abs_at(x);
    if (v > s.value) {
      s.value = v;
      s.argmax = x;
    }
  });
  // Coordinate search in the neighbouring sample cells.
  const double step = q.side() / (samples_per_axis - 1);
  std::vector<double> x = s.argmax;
  for (int pass = 0; pass < 3; ++pass) {
    for (int d = 0; d < p.n; ++d) {
      const double lo = std::max(q.corner()[d], x[d] - step);
      const double hi = std::min(q.corner()[d] + q.side(), x[d] + step);
      auto [t, v] = golden_max(
          [&](double t) {
            std::vector<double> y = x;
            y[d] = t;
            return abs_at(y);
          },
          lo, hi);
      if (v > s.value) {
        s.value = v;
        x[d] = t;
        s.argmax = x;
      }
    }
  }
  return s;
}

QPolynomial q_normalize(const Polynomial& p, const Cube& q, int samples_per_axis) {
  const auto s = sup_norm(p, q, samples_per_axis);
  require(s.value > 0.0, "cannot normalize the zero polynomial");
  QPolynomial out;
  out.q = q;
  out.factor = s.value;
  out.poly = p;
  for (double& c : out.poly.coeffs) c /= s.value;
  return out;
}

std::vector<double> gram_matrix(const GridMeasure& mu, const Cube& q, int kappa) {
  const int n = mu.dimension();
  require(q.dimension() == n, "cube dimension does not match measure dimension");
  const auto mons = monomials(n, kappa);
  const std::size_t m = mons.size();
  std::vector<double> gx, gw;
  gauss_legendre(kappa, gx, gw);
  const std::size_t per = gx.size();
  std::size_t nodes = 1;
  for (int d = 0; d < n; ++d) nodes *= per;

  const auto ids = mu.cell_ids();
  const auto masses = mu.cell_masses();
  const double cell_vol = mu.cell_volume();
  const std::vector<double> center = q.center();
  const std::size_t chunk = 4096;
  std::vector<std::vector<double>> partial(chunk_count(ids.size(), chunk), std::vector<double>(m * m, 0.0));
  for_each_chunk(ids.size(), chunk, [&](std::size_t b, std::size_t e, std::size_t c) {
    auto& g = partial[c];
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)),
        phi(m);
    for (std::size_t t = b; t < e; ++t) {
      const Cube cell = mu.cell_cube(ids[t]);
      double vol = 1.0;
      for (int d = 0; d < n; ++d) {
        lo[d] = std::max(cell.corner()[d], q.corner()[d]);
        hi[d] = std::min(cell.corner()[d] + cell.side(), q.corner()[d] + q.side());
        vol *= std::max(0.0, hi[d] - lo[d]);
      }
      if (!(vol > 0.0)) continue;
      const double density = masses[t] / cell_vol;
      for (std::size_t node = 0; node < nodes; ++node) {
        std::size_t r = node;
        double w = density * vol;
        for (int d = 0; d < n; ++d) {
          const std::size_t k = r % per;
          r /= per;
          const double x = 0.5 * (lo[d] + hi[d]) + 0.5 * (hi[d] - lo[d]) * gx[k];
          y[d] = (x - center[d]) / q.side();
          w *= 0.5 * gw[k];
        }
        for (std::size_t a = 0; a < m; ++a) phi[a] = monomial_value(mons[a], y);
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t bb = 0; bb < m; ++bb) g[a * m + bb] += w * phi[a] * phi[bb];
        }
      }
    }
  });
  std::vector<double> out(m * m, 0.0);
  for (const auto& g : partial) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += g[k];
  }
  return out;
}

namespace {

// sum_b c_b ((x - center)/side)^b rewritten in global monomials.
Polynomial to_global(const std::vector<double>& local, const Cube& q, int kappa) {
  const int n = q.dimension();
  const auto mons = monomials(n, kappa);
  std::map<std::vector<int>, std::size_t> where;
  for (std::size_t k = 0; k < mons.size(); ++k) where[mons[k]] = k;
  const auto center = q.center();
  Polynomial p;
  p.n = n;
  p.kappa = kappa;
  p.coeffs.assign(mons.size(), 0.0);
  auto binom = [](int a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  for (std::size_t k = 0; k < mons.size(); ++k) {
    if (local[k] == 0.0) continue;
    const auto& b = mons[k];
    // Product over axes of sum_j C(b_d, j) x^j (-c_d)^{b_d - j} / side^{b_d}.
    std::vector<int> j(static_cast<std::size_t>(n), 0);
    while (true) {
      double coef = local[k];
      for (int d = 0; d < n; ++d) {
        coef *= binom(b[d], j[d]) * std::pow(-center[d], b[d] - j[d]) / std::pow(q.side(), b[d]);
      }
      p.coeffs[where.at(j)] += coef;
      int d = 0;
      while (d < n && ++j[d] > b[d]) j[d++] = 0;
      if (d == n) break;
    }
  }
  return p;
}

struct LocalProblem {
  std::size_t m = 0;
  std::vector<double> gram;    // m x m
  std::vector<double> sample;  // samples x m, local monomials on [-1/2, 1/2]^n
  std::size_t samples = 0;

  double energy(std::span<const double> c) const {
    double e = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < m; ++b) row += gram[a * m + b] * c[b];
      e += c[a] * row;
    }
    return e;
  }
  double sup(std::span<const double> c) const {
    double s = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      double v = 0.0;
      for (std::size_t a = 0; a < m; ++a) v += sample[i * m + a] * c[a];
      s = std::max(s, std::abs(v));
    }
    return s;
  }
  double objective(std::span<const double> c) const {
    const double s = sup(c);
    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
    return energy(c) / (s * s);
  }
};

struct SearchResult {
  std::vector<double> c;
  double value = 0.0;
  bool converged = false;
};

SearchResult nelder_mead(const LocalProblem& prob, std::vector<double> start, int max_evals) {
  const std::size_t m = start.size();
  std::vector<std::vector<double>> simplex{start};
  for (std::size_t k = 0; k < m; ++k) {
    auto v = start;
    v[k] += 0.25;
    simplex.push_back(v);
  }
  std::vector<double> f;
  for (const auto& v : simplex) f.push_back(prob.objective(v));
  int evals = static_cast<int>(f.size());
  bool converged = false;
  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::abs(f[worst] - f[best]) <= 1e-13 * std::max(1e-300, std::abs(f[best]))) {
      converged = true;
      break;
    }
    std::vector<double> centroid(m, 0.0);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < m; ++d) centroid[d] += simplex[k][d] / static_cast<double>(m);
    }
    auto along = [&](double t) {
      std::vector<double> v(m);
      for (std::size_t d = 0; d < m; ++d) v[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return v;
    };
    auto xr = along(-1.0);
    const double fr = prob.objective(xr);
    ++evals;
    if (fr < f[best]) {
      auto xe = along(-2.0);
      const double fe = prob.objective(xe);
      ++evals;
      if (fe < fr) {
        simplex[worst] = xe;
        f[worst] = fe;
      } else {
        simplex[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[second]) {
      simplex[worst] = xr;
      f[worst] = fr;
    } else {
      auto xc = along(fr < f[worst] ? -0.5 : 0.5);
      const double fc = prob.objective(xc);
      ++evals;
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = xc;
        f[worst] = fc;
      } else {
        for (std::size_t k = 0; k < simplex.size(); ++k) {
          if (k == best) continue;
          for (std::size_t d = 0; d < m; ++d) simplex[k][d] = simplex[best][d] + 0.5 * (simplex[k][d] - simplex[best][d]);
          f[k] = prob.objective(simplex[k]);
          ++evals;
        }
      }
    }
    // Keep the scale-free simplex from drifting in size.
    const double s = prob.sup(simplex[best]);
    if (s > 0.0 && (s > 1e3 || s < 1e-3)) {
      for (auto& v : simplex) {
        for (double& x : v) x /= s;
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] < f[best]) best = k;
  }
  return {simplex[best], f[best], converged};
}

}  // namespace

EnergyConstant energy_constant(const GridMeasure& mu, const Cube& q, int kappa, const EnergyOptions& options) {
  const int n = mu.dimension();
  require(q.dimension() == n, "cube dimension does not match measure dimension");
  require(n <= 2, "energy_constant supports n <= 2");
  require(kappa >= 1 && kappa <= 4, "kappa must lie in [1, 4]");
  require(options.starts >= 1 && options.max_evaluations >= 10, "invalid optimizer options");
  const auto mons = monomials(n, kappa);
  const std::size_t m = mons.size();

  EnergyConstant out;
  LocalProblem prob;
  prob.m = m;
  prob.gram = gram_matrix(mu, q, kappa);
  out.mass = prob.gram[0];
  require(out.mass > 0.0, "Q must carry positive mass");
  out.starts = options.starts;

  if (kappa == 1) {
    // Only the constants +-1 are normalized.
    out.energy = out.mass;
    out.value = 1.0;
    out.minimizer = {n, 1, {1.0}};
    return out;
  }

  const int coarse = options.coarse_samples > 0 ? options.coarse_samples : (n == 1 ? 257 : 33);
  const int fine = options.fine_samples > 0 ? options.fine_samples : (n == 1 ? 1000 : 300);
  const Cube local(std::vector<double>(static_cast<std::size_t>(n), -0.5), 1.0);
  for_each_sample(local, coarse, [&](const std::vector<double>& y) {
    for (const auto& b : mons) prob.sample.push_back(monomial_value(b, y));
    ++prob.samples;
  });

  std::vector<std::vector<double>> starts;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int s = 0; s < options.starts; ++s) {
    std::vector<double> c(m);
    for (double& x : c) x = uni(rng);
    starts.push_back(c);
  }
  std::vector<SearchResult> found(starts.size());
  for_each_chunk(starts.size(), 1, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t k = b; k < e; ++k) found[k] = nelder_mead(prob, starts[k], options.max_evaluations);
  });

  // Re-measure each candidate's sup norm finely; the coarse sup can only be smaller.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : found) {
    if (!r.converged) out.lower_bound = true;
    Polynomial g = to_global(r.c, q, kappa);
    const auto s = sup_norm(g, q, fine);
    if (!(s.value > 0.0)) continue;
    const double e = prob.energy(r.c) / (s.value * s.value);
    if (e < best) {
      best = e;
      for (double& x : g.coeffs) x /= s.value;
      out.minimizer = g;
    }
  }
  require(std::isfinite(best) && best > 0.0, "optimizer found no admissible polynomial");
  out.energy = best;
  out.value = out.mass / best;
  return out;
}

EnergyScan energy_constant_sup(const GridMeasure& mu, std::span<const Cube> cubes, int kappa,
                               const EnergyOptions& options) {
  EnergyScan scan;
  bool any = false;
  for (const Cube& q : cubes) {
    if (!(cube_mass(mu, q) > 0.0)) {
      ++scan.skipped;
      continue;
    }
    ++scan.used;
    auto c = energy_constant(mu, q, kappa, options);
    if (!any || c.value > scan.worst.value) {
      scan.worst = std::move(c);
      scan.extremal = q;
      any = true;
    }
  }
  return scan;
}

DoublingParameters doubling_from_energy(double c_kappa, int n, double beta) {
  require(c_kappa >= 1.0 && std::isfinite(c_kappa), "C_kappa must be finite and at least 1");
  require(n >= 1, "dimension must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  DoublingParameters p;
  p.d = std::ldexp(c_kappa, n - 1);
  p.shrink = std::pow(beta, 2 * n - 2) * (1.0 - beta) * (1.0 - beta);
  p.gamma = 1.0 / (2.0 * std::pow(p.d, 2 * n));
  double sum = 0.0;
  for (int i = 0; i < 2 * n; ++i) sum += std::pow(p.d, i);
  p.epsilon = 1.0 / (2.0 * sum);
  return p;
}

GridMeasure gap_measure(double eps, int level) {
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  require(level >= 0 && level <= 24, "level must lie in [0, 24]");
  const std::int64_t cells = std::int64_t{1} << level;
  spec::DensityTable t;
  t.level = level;
  t.values.resize(static_cast<std::size_t>(cells));
  for (std::int64_t i = 0; i < cells; ++i) {
    const double a = std::ldexp(static_cast<double>(i), -level), b = std::ldexp(static_cast<double>(i + 1), -level);
    t.values[static_cast<std::size_t>(i)] = std::clamp((eps - a) / (b - a), 0.0, 1.0);
  }
  return generate(t, 1, level, unit_cube(1));
}

}  // namespace twoweight
