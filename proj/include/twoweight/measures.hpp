#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twoweight/cube.hpp"

namespace twoweight {

using CellIndex = std::vector<std::int64_t>;

/// One populated cell of a GridMeasure.
struct CellMass {
  CellIndex index;
  double mass = 0.0;
};

/// A positive measure discretized as cell masses on the dyadic grid of level
/// `level` over a bounded support box. Inside each finest cell the mass is
/// treated as uniformly spread, which makes masses of arbitrary cubes
/// well defined (exact for grid-aligned cubes).
///
/// Immutable after construction; every query is a pure read.
class GridMeasure {
 public:
  GridMeasure(int dimension, int level, Cube box, std::span<const CellMass> cells);

  int dimension() const { return dimension_; }
  int level() const { return level_; }
  const Cube& box() const { return box_; }
  std::int64_t cells_per_axis() const { return cells_per_axis_; }
  double cell_side() const { return cell_side_; }
  double cell_volume() const;

  /// Populated (mass > 0) cells as linear ids in increasing order, with masses.
  std::span<const std::int64_t> cell_ids() const { return ids_; }
  std::span<const double> cell_masses() const { return masses_; }
  std::size_t populated_cells() const { return ids_.size(); }

  /// Same table with n-tuple indices, zero cells omitted.
  std::vector<CellMass> cells() const;

  double total_mass() const { return total_; }
  double mass_of_cell(std::int64_t linear_id) const;

  std::int64_t linear_id(std::span<const std::int64_t> index) const;
  CellIndex unravel(std::int64_t linear_id) const;
  Cube cell_cube(std::int64_t linear_id) const;
  std::vector<double> cell_center(std::int64_t linear_id) const;

  /// Mass of the axis-parallel box [lo, hi) under the uniform-within-cell model.
  double box_mass(std::span<const double> lo, std::span<const double> hi) const;

  /// Sum of cell masses over the index box [lo, hi) (exclusive upper bound, clipped).
  double index_box_mass(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const;

 private:
  double prefix_query(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const;

  int dimension_;
  int level_;
  Cube box_;
  std::int64_t cells_per_axis_;
  double cell_side_;
  std::vector<std::int64_t> ids_;
  std::vector<double> masses_;
  std::vector<double> prefix_;  // (S+1)^n summed-volume table
  double total_ = 0.0;
};

/// Mass of a cube (0 if it misses the support box).
double cube_mass(const GridMeasure& mu, const Cube& q);

/// cube_mass(sigma, q) * cube_mass(omega, q); throws on dimension mismatch.
double product_diagonal_mass(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q);

// ---------------------------------------------------------------------------
// Generators

namespace spec {

struct Lebesgue {};

/// One-dimensional Lebesgue measure on the axis {x_2 = 0} of the plane.
struct LineMeasure {};

/// n-fold product of the self-similar Cantor measure on [0,1] that keeps the
/// two outer intervals of relative length `ratio` at every generation.
struct CantorProduct {
  double ratio = 1.0 / 3.0;
};

struct Atom {
  std::vector<double> position;
  double weight = 0.0;
};

struct PointMasses {
  std::vector<Atom> atoms;
};

/// Piecewise-constant density (w.r.t. Lebesgue) on the level-`level` grid of
/// the box, values in row-major linear-id order.
struct DensityTable {
  int level = 0;
  std::vector<double> values;
};

}  // namespace spec

using MeasureSpec =
    std::variant<spec::Lebesgue, spec::LineMeasure, spec::CantorProduct, spec::PointMasses, spec::DensityTable>;

std::string kind_name(const MeasureSpec& s);

GridMeasure generate(const MeasureSpec& s, int n, int level, const Cube& box);

/// Distribution function of the Cantor measure with the given ratio.
double cantor_cdf(double x, double ratio);

/// Hausdorff (= Ahlfors-David) order of one Cantor factor, log 2 / log(1/ratio).
double cantor_dimension(double ratio);

/// Sums 2^n-blocks of cells, giving the same measure on the level-(L-1) grid.
GridMeasure coarsen(const GridMeasure& mu);

/// Multiplies every cell mass by c >= 0.
GridMeasure scaled(const GridMeasure& mu, double c);

// ---------------------------------------------------------------------------
// File formats

std::string to_json(const GridMeasure& mu);
GridMeasure measure_from_json(const std::string& text);
void save_measure(const GridMeasure& mu, const std::string& path);
GridMeasure load_measure(const std::string& path);
std::string to_csv(const GridMeasure& mu);

}  // namespace twoweight
