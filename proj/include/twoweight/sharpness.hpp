#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

struct RatioWindow {
  double min = 0.0;
  double max = 0.0;
  double bound = 16.0;
  std::optional<Cube> min_cube;
  std::optional<Cube> max_cube;
  std::size_t used = 0;
  std::size_t skipped = 0;  // zero-mass cubes
  double ratio() const { return min > 0.0 ? max / min : 0.0; }
  bool pass() const { return used > 0 && min > 0.0 && ratio() <= bound; }
};

/// min and max of |3Q|_mu / l(Q)^theta over the positive-mass cubes.
RatioWindow ad_regularity_check(const GridMeasure& mu, double theta, std::span<const Cube> cubes, double bound = 16.0);

struct GammaCount {
  std::size_t count = 0;      // positive-mass subcubes of side 2^{-N} l(Q)
  std::size_t total = 0;      // 2^{nN}
  std::vector<Cube> empty;    // the zero-mass ones
};

/// Throws when 2^{-N} l(Q) is finer than the grid cells.
GammaCount gamma_count(const GridMeasure& mu, const Cube& q, int N);

enum class Selection { single, all };

struct SharpnessReport {
  std::string scenario;
  double a2 = 0.0;                 // sqrt(A2) for the line scenario, A2 over Q's subcubes for cantor
  std::vector<double> energy;      // per cutoff level, or cumulative per round
  std::vector<double> increments;  // successive differences (per-round values for cantor)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int N = 0;
  double c_n = 0.0;
  double q_mass = 0.0;
  std::vector<std::size_t> region_cells;  // grid cells in each Omega_k
  bool disjoint = true;
  bool monotone = true;
  std::optional<RatioWindow> ad_window;
  std::vector<std::string> warnings;
};

/// Steps 2-4 of the Ahlfors-David construction. Round j integrates the lower
/// bound l(P)^{2(beta - n)} |P|_mu^2 over the empty subcubes of side
/// 2^{-jN} l(Q) inside each positive P of side 2^{-(j-1)N} l(Q). `single`
/// takes one empty subcube per P, `all` every one. N = 0 picks the smallest
/// N with an empty subcube in every positive cube of Q; when some round has
/// none, N grows by one and the construction restarts (with a warning).
SharpnessReport accumulate_lower_bound(const GridMeasure& mu, const Cube& q, double beta, int rounds, int N = 0,
                                       Selection selection = Selection::all);

/// Line measure in the plane on the box [0, R]^2 at grid level `level`,
/// alpha = 1, beta = 1/2: the normalized maximal energy for cutoffs 1..k_max
/// with a linear fit, and sqrt(A2) over the cubes [0, 2^{-j} R]^2.
SharpnessReport line_measure_divergence(double R, int k_max, int level = 10);

/// Least-squares line through (x_i, y_i): slope, intercept, R^2.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace twoweight
