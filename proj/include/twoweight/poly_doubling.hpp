#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

/// Exponents of the monomials x^b with |b| < kappa, graded then lexicographic.
std::vector<std::vector<int>> monomials(int n, int kappa);

/// Polynomial of total degree < kappa in global coordinates, coefficients in
/// monomials(n, kappa) order.
struct Polynomial {
  int n = 1;
  int kappa = 1;
  std::vector<double> coeffs;
};

double evaluate(const Polynomial& p, std::span<const double> x);

struct SupNorm {
  double value = 0.0;
  std::vector<double> argmax;
};

/// sup over Q of |P|: a grid of samples_per_axis points per axis (endpoints
/// included) followed by a coordinate search around the best sample.
SupNorm sup_norm(const Polynomial& p, const Cube& q, int samples_per_axis = 1000);

struct QPolynomial {
  Polynomial poly;      // normalized: sup over q of |poly| = 1
  Cube q;
  double factor = 1.0;  // original sup, the coefficients were divided by it
};

QPolynomial q_normalize(const Polynomial& p, const Cube& q, int samples_per_axis = 1000);

struct EnergyOptions {
  int starts = 24;
  int max_evaluations = 4000;
  int coarse_samples = 0;  // per axis during the search; 0 picks a default
  int fine_samples = 0;    // per axis for the final sup; 0 picks a default
  std::uint64_t seed = 1;
};

struct EnergyConstant {
  double value = 0.0;     // |Q|_mu / inf energy
  double mass = 0.0;      // |Q|_mu
  double energy = 0.0;    // integral of |P|^2 dmu for the best P found
  Polynomial minimizer;   // Q-normalized
  bool lower_bound = false;  // some start hit the evaluation budget
  int starts = 0;
};

/// C = |Q|_mu / inf int_Q |P|^2 dmu over Q-normalized P of degree < kappa.
/// The inf is searched with multistart Nelder-Mead over coefficient
/// directions, so the reported C never exceeds the true constant.
EnergyConstant energy_constant(const GridMeasure& mu, const Cube& q, int kappa, const EnergyOptions& options = {});

struct EnergyScan {
  EnergyConstant worst;
  Cube extremal;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Largest energy_constant over the positive-mass cubes of a family.
EnergyScan energy_constant_sup(const GridMeasure& mu, std::span<const Cube> cubes, int kappa,
                               const EnergyOptions& options = {});

struct DoublingParameters {
  double shrink = 0.0;   // beta^{2n-2} (1 - beta)^2
  double gamma = 0.0;    // 1 / (2 D^{2n})
  double epsilon = 0.0;  // 1 / (2 (1 + D + ... + D^{2n-1}))
  double d = 0.0;        // 2^{n-1} C
};

DoublingParameters doubling_from_energy(double c_kappa, int n, double beta);

/// Gram matrix of the local monomials ((x - c_Q)/l(Q))^b against mu on Q,
/// row-major; exact under the cell-uniform model.
std::vector<double> gram_matrix(const GridMeasure& mu, const Cube& q, int kappa);

/// Lebesgue measure restricted to [0, eps] on the level-`level` grid of [0,1];
/// the cell holding eps gets its covered fraction.
GridMeasure gap_measure(double eps, int level);

}  // namespace twoweight
