#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoweight/cube.hpp"
#include "twoweight/measures.hpp"

namespace twoweight {

struct CancellationSample {
  std::vector<double> center;  // x0
  double inner = 0.0;          // epsilon
  double outer = 0.0;          // N
};

struct ConstantReport {
  std::string name;  // BCT, T-forward, T-backward, A-cancel-forward, A-cancel-backward, Norm
  double value = 0.0;
  std::optional<Cube> extremal_cube;
  std::optional<CancellationSample> extremal_sample;
  std::size_t scanned = 0;
  std::size_t skipped = 0;
  std::map<std::string, double> extra;  // named auxiliary numbers (squared values, iterations, ...)
};

/// sup_Q pairing(Q) / sqrt(|Q|_sigma |Q|_omega) over cubes with positive masses.
ConstantReport bct_fractional(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                              std::span<const Cube> cubes);

/// Cube testing constant. The report value is T; extra["squared"] holds
/// T^2 = sup_Q (1/|Q|_sigma) int_Q I(1_Q sigma)^2 d omega. Backward swaps the measures.
ConstantReport cube_testing(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                            std::span<const Cube> cubes, bool backward = false);

/// sup over samples of
///   int_{|x-x0|<N} |int_{eps<|x-y|<N} |x-y|^{alpha-n} d sigma(y)|^2 d omega(x) / |B(x0,N)|_sigma
/// with balls taken on cell centers. Backward swaps the measures.
ConstantReport cancellation_constant(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                     std::span<const CancellationSample> samples, bool backward = false);

/// x0 on the cell centers of the generation-k grid of the box, N = side/2^j and
/// eps = N/2^i for small j, i.
std::vector<CancellationSample> default_cancellation_samples(const Cube& box, int k);

struct NormOptions {
  double tolerance = 1e-8;
  int max_iterations = 2000;
  int self_depth = 4;
};

/// Largest singular value of M = diag(sqrt w) K diag(sqrt s) over all populated
/// cells, by power iteration on M^T M. extra["converged"] is 0 when the
/// iteration budget ran out (the value is then a lower bound).
ConstantReport operator_norm(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                             const NormOptions& options = {});

/// Dense row-major M (rows: omega cells, columns: sigma cells); for small grids.
std::vector<double> operator_matrix(const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                                    std::size_t& rows, std::size_t& cols, int self_depth = 4);

}  // namespace twoweight
