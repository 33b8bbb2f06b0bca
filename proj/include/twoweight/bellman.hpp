#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twoweight {

/// A move y = (r1 x1, r2 x2) relative to the current state x.
struct Move {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// y2 in {+-tau/20, +-tau/40} x2, y1 in {0, +-tau/20} x1.
std::vector<Move> default_moves(double tau);

/// True when x > 0 and x1 x2 < 1.
bool in_omega(double x1, double x2);

/// Discretized Bellman function on Omega = {x > 0, x1 x2 < 1} over a
/// log-spaced square grid. Nodes outside Omega are inactive and hold 0.
class BellmanField {
 public:
  BellmanField(double tau, int size = 256, double lo = 1e-3, double hi = 1e3, std::vector<Move> moves = {});

  double tau() const { return tau_; }
  int size() const { return size_; }
  int sweeps() const { return sweeps_; }
  const std::vector<Move>& moves() const { return moves_; }

  double coordinate(int i) const;
  bool active(int i, int j) const;
  double value(int i, int j) const { return values_[static_cast<std::size_t>(i) * size_ + j]; }
  /// Index into moves() chosen at the last sweep, -1 if none yet or frozen.
  int move_index(int i, int j) const { return argmax_[static_cast<std::size_t>(i) * size_ + j]; }

  /// Bilinear interpolation in log coordinates, reads clamped to the grid.
  double interpolate(double x1, double x2) const;

  /// Admissible for x: |r1|, |r2| <= tau/20 and x +- y in Omega.
  bool admissible(double x1, double x2, const Move& m) const;

  /// max over admissible moves of 2|y2| x1 + (B(x+y) + B(x-y))/2; index -1
  /// when no move is admissible.
  std::pair<double, int> best_move(double x1, double x2) const;

  /// One synchronous sweep.
  void sweep();

  /// max over active nodes of B / sqrt(x1 x2), with the maximizing node.
  double max_ratio(int* best_i = nullptr, int* best_j = nullptr) const;

 private:
  double interpolate_in(const std::vector<double>& values, double x1, double x2) const;

  double tau_;
  int size_;
  double log_lo_;
  double step_;
  std::vector<Move> moves_;
  std::vector<double> values_;
  std::vector<std::int16_t> argmax_;
  int sweeps_ = 0;
};

BellmanField bellman_iterate(BellmanField field, int sweeps);

struct DivergenceRun {
  int sweeps = 0;
  double max_ratio = 0.0;
  bool reached = false;
  int best_i = -1;
  int best_j = -1;
  std::vector<double> history;  // max ratio after each sweep
};

/// Sweeps until max B/sqrt(x1 x2) exceeds `target` or `max_sweeps` is spent.
DivergenceRun iterate_until(BellmanField& field, double target, int max_sweeps);

/// (B(x+y) + B(x-y))/2 + 2|y2| x1 - B(x); throws unless x, x+y, x-y lie in Omega.
double concavity_defect(const BellmanField& field, double x1, double x2, double y1, double y2);

// ---------------------------------------------------------------------------
// Weight pairs

/// One dyadic interval of the pair: its averages E_I U, E_I V and children
/// (left = I-, right = I+). A node without children is constant below.
/// A child subtree is reused with U multiplied and V divided by its scale.
struct PairNode {
  double u = 0.0;
  double v = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t level = 0;
  double left_scale = 1.0;
  double right_scale = 1.0;
};

/// Weight pair on the dyadic tree of [0,1) to depth M, stored as a DAG of
/// scaled subtrees so deep pairs stay small.
struct WeightPair {
  int depth = 0;
  std::int32_t root = 0;
  double root_scale = 1.0;
  std::vector<PairNode> nodes;

  /// Leaf tables of length 2^depth (depth <= 22).
  std::vector<double> leaves_u() const;
  std::vector<double> leaves_v() const;
};

/// Full tree built from explicit leaf tables of equal power-of-two length.
WeightPair pair_from_leaves(const std::vector<double>& u, const std::vector<double>& v);

/// Descends from x using the field's maximizing move at every state; child
/// order is chosen so that Delta_I V >= 0. Frozen states become constant
/// subtrees. The move at x is read at (sqrt(x1 x2), sqrt(x1 x2)), since
/// (x1, x2) -> (l x1, x2 / l) preserves Omega and the gain; states then
/// differ from shared nodes only by such a scale. Throws if the DAG exceeds
/// `max_nodes`.
WeightPair extract_weight_pair(const BellmanField& field, double x1, double x2, int depth,
                               std::size_t max_nodes = 20'000'000);

/// Per-level sums of Delta_I V E_I U |I|; entry j covers generation j.
std::vector<double> functional_by_level(const WeightPair& pair);

struct Certificate {
  double gamma = 0.0;
  double tau = 0.0;
  int depth = 0;
  double functional = 0.0;  // sum (Delta_I V)(E_I U)|I|
  double half_functional = 0.0;  // the same with the factor 1/2 of H^dy
  double root_u = 0.0;
  double root_v = 0.0;
  double gamma_achieved = 0.0;  // functional / sqrt(E U E V) at the root
  bool positive = false;
  bool product_ok = false;   // (E_I U)(E_I V) <= 1 everywhere
  bool ratios_ok = false;    // sibling ratios in (1 - tau, 1 + tau)
  bool averages_ok = false;  // E_I = (E_{I-} + E_{I+})/2 to 1e-12
  bool functional_ok = false;
  double max_product = 0.0;
  double worst_ratio_margin = 0.0;  // min distance of sibling ratios to the band edges
  double min_delta_v = 0.0;
  std::optional<std::pair<int, std::int64_t>> offending;  // (level, first dyadic index) of a product violation
  std::optional<double> haar_check;  // haar_pairing of expanded leaves when depth is small
  std::size_t dag_nodes = 0;
  bool pass() const { return positive && product_ok && ratios_ok && averages_ok && functional_ok; }
};

Certificate verify_certificate(const WeightPair& pair, double tau, double gamma);

struct CertifiedPair {
  WeightPair pair;
  Certificate certificate;
  int probe_depth = 0;  // deepest extraction tried while searching
};

/// Extracts from x at depths 64, 128, ... up to max_depth until the running
/// functional exceeds gamma sqrt(x1 x2), then re-extracts at the first such
/// depth and verifies it. The certificate fails if no depth suffices.
CertifiedPair certify_weight_pair(const BellmanField& field, double x1, double x2, double gamma,
                                  int max_depth = 4096);

struct RescaleCheck {
  double original = 0.0;  // (1/|J|) sum |Delta v| E u |I|
  double rescaled = 0.0;  // (1/|T J|) sum over I in T J of the transplanted pair
  double average_error = 0.0;
  bool pass = false;
};

/// Transplants the pair to T J = [2^k l, 2^k (l+1)) with k <= 0, 0 <= l < 2^{-k}.
RescaleCheck rescale_invariance_check(const std::vector<double>& u, const std::vector<double>& v, int k,
                                      std::int64_t l);

}  // namespace twoweight
