#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

/// Averages of |x - y|^{alpha - n} over pairs of unit cells at integer offset
/// o with |o|_inf <= 1, built by `depth` levels of dyadic subdivision. The
/// coincident-cell value is closed by self-similarity; the bottom of the
/// recursion uses a Gauss-Legendre product rule.
/// error(o) = |G_depth(o) - G_{depth-1}(o)|.
class NearFieldTable {
 public:
  NearFieldTable(int dimension, double alpha, int depth = 4);

  int dimension() const { return n_; }
  double alpha() const { return alpha_; }
  int depth() const { return depth_; }

  /// Unit-scale average for |o|_inf <= 1, center kernel |o|^{alpha-n} otherwise.
  double value(std::span<const std::int64_t> offset) const;
  double error(std::span<const std::int64_t> offset) const;

 private:
  int index_of(std::span<const std::int64_t> offset) const;

  int n_;
  double alpha_;
  int depth_;
  std::vector<double> near_;   // 3^n entries
  std::vector<double> error_;  // 3^n entries
};

/// Cell masses of one measure restricted to a cube; partial cells keep the
/// covered volume fraction of their mass.
struct RestrictedCells {
  std::vector<std::int64_t> linear;  // linear ids on the parent grid
  std::vector<CellIndex> index;
  std::vector<double> weight;
  double total = 0.0;
};

RestrictedCells restrict_to(const GridMeasure& mu, const Cube& q);

/// The discretized Riesz potential on the shared grid of two measures:
/// K(i, j) = h^{alpha-n} G(i - j) for neighbouring cells, |c_i - c_j|^{alpha-n}
/// otherwise. Every pairing, testing and norm computation uses this one matrix.
class DiscreteRiesz {
 public:
  DiscreteRiesz(int dimension, int level, double cell_side, double alpha, int self_depth = 4);

  int dimension() const { return n_; }
  double alpha() const { return alpha_; }
  const NearFieldTable& near_field() const { return near_; }

  double entry(std::span<const std::int64_t> i, std::span<const std::int64_t> j) const;
  double error(std::span<const std::int64_t> i, std::span<const std::int64_t> j) const;

  /// f_i = sum_j K(target_i, source_j) w_j for every target cell.
  std::vector<double> apply(const std::vector<CellIndex>& targets, const std::vector<CellIndex>& sources,
                            std::span<const double> weights) const;

  /// sum_i sum_j u_i K(i, j) w_j restricted to neighbouring pairs, times the
  /// per-offset error of the near-field table.
  double near_error(const std::vector<CellIndex>& targets, std::span<const double> u,
                    const std::vector<CellIndex>& sources, std::span<const double> w) const;

 private:
  std::int64_t table_offset(std::span<const std::int64_t> i, std::span<const std::int64_t> j, bool& near) const;

  int n_;
  double alpha_;
  std::int64_t cells_per_axis_;
  double scale_;  // h^{alpha - n}
  NearFieldTable near_;
  std::vector<double> far_;  // (2S-1)^n unit-scale values, empty when too large
};

/// Shared, cached kernel for the grid of `mu`.
std::shared_ptr<const DiscreteRiesz> grid_kernel(const GridMeasure& mu, double alpha, int self_depth = 4);

/// Throws unless the two measures live on the same grid.
void require_shared_grid(const GridMeasure& a, const GridMeasure& b);

}  // namespace twoweight
