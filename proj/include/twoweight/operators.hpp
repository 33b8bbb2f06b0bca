#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

struct PairingResult {
  double value = 0.0;
  double error_bar = 0.0;  // near-field subdivision uncertainty
  std::size_t sigma_cells = 0;
  std::size_t omega_cells = 0;
};

/// Double integral of |x - y|^{alpha - n} over Q x Q against sigma x omega,
/// evaluated with the discrete Riesz matrix of the shared grid.
PairingResult fractional_pairing(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q, double alpha,
                                 int self_depth = 4);

struct ShellBound {
  double value = 0.0;
  double covering_constant = 0.0;  // 2^{n - alpha}
  double tail = 0.0;               // contribution of generations below the grid
  int grid_generations = 0;        // shells summed from the measure
  std::vector<double> shell_terms; // per-generation summands (before the prefactor)
};

/// Dyadic-shell majorant of the pairing on a grid-aligned dyadic cube:
///   2^{n-a} l^{a-n} sqrt(|9Q|_s |9Q|_w) sum_k 2^{-k(theta+a-n)}
///     (sum_I |3I & Q|_s)^{1/2} (sum_I |3I & Q|_w)^{1/2}
/// over dyadic I in Q of side 2^{-k} l. Generations finer than the grid use
/// sum_I |3I & Q| <= 3^n |Q|.
ShellBound shell_upper_bound(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q, double alpha,
                             double theta);

/// C_{theta,alpha,n} = 2^{n-a} 3^n 9^{n-a} / (1 - 2^{-(theta+a-n)}), so that
/// pairing <= C sqrt(A2) sqrt(|Q|_s |Q|_w) whenever 9Q is in the A2 family.
double pairing_bound_constant(int n, double alpha, double theta);

/// integral over Q of M^beta(1_Q mu)^2, with M^beta taken over dyadic and
/// half-shifted subcubes of Q of generations 0..cutoff, sampled at cell centers.
double fractional_maximal_energy(const GridMeasure& mu, const Cube& q, double beta, int cutoff);

/// Same quantity for every cutoff 0..max_cutoff in one pass.
std::vector<double> fractional_maximal_energy_profile(const GridMeasure& mu, const Cube& q, double beta,
                                                      int max_cutoff);

// ---------------------------------------------------------------------------
// Haar / dyadic Hilbert transform on [0, 1)

/// Averages of a step function on the dyadic tree of [0,1) to depth M.
/// Node (j, i) is the interval [i 2^{-j}, (i+1) 2^{-j}); I- is the left child.
class HaarTree {
 public:
  explicit HaarTree(std::vector<double> leaves);

  int depth() const { return depth_; }
  double average(int level, std::int64_t i) const;
  /// Delta_I = E_{I-} - E_{I+}; defined for level < depth.
  double difference(int level, std::int64_t i) const;
  std::span<const double> leaves() const;

 private:
  int depth_;
  std::vector<double> nodes_;  // heap order: level j starts at 2^j - 1
};

HaarTree haar_tree(std::span<const double> leaves);

/// Rebuilds the leaves from the root average and all differences.
std::vector<double> reconstruct_leaves(const HaarTree& t);

/// H v(x) = (1/2) sum_{I containing x} Delta_I v.
double dyadic_hilbert(const HaarTree& v, double x);

/// Integral of H v times u over [0,1) = (1/2) sum_I Delta_I v E_I u |I|.
double haar_pairing(const HaarTree& u, const HaarTree& v);

/// Leafwise sum of (H v)(leaf) u(leaf) 2^{-M}, the direct oracle for haar_pairing.
double haar_pairing_direct(const HaarTree& u, const HaarTree& v);

}  // namespace twoweight
