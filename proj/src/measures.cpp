#include "twoweight/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "twoweight/error.hpp"

namespace twoweight {

namespace {

constexpr std::int64_t kMaxPrefixEntries = std::int64_t{1} << 25;

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

struct Segment {
  std::int64_t lo;
  std::int64_t hi;
  double weight;
};

// Index-space pieces of [u, v) (grid units, already clipped to [0, S]) with
// their coverage fractions; at most three pieces.
int segments_of(double u, double v, std::int64_t S, Segment out[3]) {
  if (!(v > u)) return 0;
  int count = 0;
  const auto iu = static_cast<std::int64_t>(std::floor(u));
  const auto iv = static_cast<std::int64_t>(std::floor(v));
  if (iu == iv) {
    out[count++] = {iu, iu + 1, v - u};
    return count;
  }
  std::int64_t mid_start = iu;
  if (u > static_cast<double>(iu)) {
    out[count++] = {iu, iu + 1, static_cast<double>(iu + 1) - u};
    mid_start = iu + 1;
  }
  if (iv > mid_start) out[count++] = {mid_start, iv, 1.0};
  if (v > static_cast<double>(iv) && iv < S) out[count++] = {iv, iv + 1, v - static_cast<double>(iv)};
  return count;
}

}  // namespace

GridMeasure::GridMeasure(int dimension, int level, Cube box, std::span<const CellMass> cells)
    : dimension_(dimension), level_(level), box_(std::move(box)) {
  require(dimension >= 1, "measure dimension must be at least 1");
  require(level >= 0 && level <= 40, "grid level must lie in [0, 40]");
  require(box_.dimension() == dimension, "support box dimension does not match measure dimension");
  cells_per_axis_ = std::int64_t{1} << level;
  cell_side_ = box_.side() / static_cast<double>(cells_per_axis_);
  const std::int64_t prefix_entries = ipow(cells_per_axis_ + 1, dimension);
  require(prefix_entries > 0 && prefix_entries <= kMaxPrefixEntries,
          "grid too large: (2^level + 1)^dimension must not exceed 2^25");

  std::map<std::int64_t, double> merged;
  for (const auto& c : cells) {
    require(static_cast<int>(c.index.size()) == dimension, "cell index has wrong dimension");
    require(std::isfinite(c.mass) && c.mass >= 0.0, "cell masses must be finite and nonnegative");
    for (auto i : c.index) require(i >= 0 && i < cells_per_axis_, "cell index outside [0, 2^level)");
    if (c.mass > 0.0) merged[linear_id(c.index)] += c.mass;
  }
  ids_.reserve(merged.size());
  masses_.reserve(merged.size());
  for (const auto& [id, m] : merged) {
    ids_.push_back(id);
    masses_.push_back(m);
    total_ += m;
  }

  // Summed-volume table with a zero border: prefix[j] = sum of cells with index < j.
  const std::int64_t P = cells_per_axis_ + 1;
  prefix_.assign(static_cast<std::size_t>(prefix_entries), 0.0);
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    std::int64_t id = ids_[k], pid = 0, stride = 1;
    for (int d = 0; d < dimension_; ++d) {
      pid += (id % cells_per_axis_ + 1) * stride;
      id /= cells_per_axis_;
      stride *= P;
    }
    prefix_[static_cast<std::size_t>(pid)] = masses_[k];
  }
  std::int64_t stride = 1;
  for (int d = 0; d < dimension_; ++d) {
    for (std::int64_t j = 0; j < prefix_entries; ++j) {
      if ((j / stride) % P != 0) prefix_[static_cast<std::size_t>(j)] += prefix_[static_cast<std::size_t>(j - stride)];
    }
    stride *= P;
  }
}

double GridMeasure::cell_volume() const { return std::pow(cell_side_, dimension_); }

std::vector<CellMass> GridMeasure::cells() const {
  std::vector<CellMass> out;
  out.reserve(ids_.size());
  for (std::size_t k = 0; k < ids_.size(); ++k) out.push_back({unravel(ids_[k]), masses_[k]});
  return out;
}

double GridMeasure::mass_of_cell(std::int64_t id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return 0.0;
  return masses_[static_cast<std::size_t>(it - ids_.begin())];
}

std::int64_t GridMeasure::linear_id(std::span<const std::int64_t> index) const {
  std::int64_t id = 0, stride = 1;
  for (int d = 0; d < dimension_; ++d) {
    id += index[static_cast<std::size_t>(d)] * stride;
    stride *= cells_per_axis_;
  }
  return id;
}

CellIndex GridMeasure::unravel(std::int64_t id) const {
  CellIndex idx(static_cast<std::size_t>(dimension_));
  for (int d = 0; d < dimension_; ++d) {
    idx[static_cast<std::size_t>(d)] = id % cells_per_axis_;
    id /= cells_per_axis_;
  }
  return idx;
}

Cube GridMeasure::cell_cube(std::int64_t id) const {
  auto idx = unravel(id);
  std::vector<double> corner(box_.corner());
  for (int d = 0; d < dimension_; ++d) corner[d] += static_cast<double>(idx[d]) * cell_side_;
  return Cube(std::move(corner), cell_side_);
}

std::vector<double> GridMeasure::cell_center(std::int64_t id) const {
  auto idx = unravel(id);
  std::vector<double> c(box_.corner());
  for (int d = 0; d < dimension_; ++d) c[d] += (static_cast<double>(idx[d]) + 0.5) * cell_side_;
  return c;
}

double GridMeasure::prefix_query(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const {
  const std::int64_t P = cells_per_axis_ + 1;
  double sum = 0.0;
  const unsigned corners = 1u << dimension_;
  for (unsigned mask = 0; mask < corners; ++mask) {
    std::int64_t pid = 0, stride = 1;
    int lows = 0;
    for (int d = 0; d < dimension_; ++d) {
      const bool take_hi = (mask >> d) & 1u;
      pid += (take_hi ? hi[d] : lo[d]) * stride;
      if (!take_hi) ++lows;
      stride *= P;
    }
    const double v = prefix_[static_cast<std::size_t>(pid)];
    sum += (lows % 2 == 0) ? v : -v;
  }
  return sum;
}

double GridMeasure::index_box_mass(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const {
  std::int64_t l[8], h[8];
  require(dimension_ <= 8, "index_box_mass supports dimension <= 8");
  for (int d = 0; d < dimension_; ++d) {
    l[d] = std::clamp<std::int64_t>(lo[d], 0, cells_per_axis_);
    h[d] = std::clamp<std::int64_t>(hi[d], 0, cells_per_axis_);
    if (h[d] <= l[d]) return 0.0;
  }
  return prefix_query(std::span(l, static_cast<std::size_t>(dimension_)),
                      std::span(h, static_cast<std::size_t>(dimension_)));
}

double GridMeasure::box_mass(std::span<const double> lo, std::span<const double> hi) const {
  require(static_cast<int>(lo.size()) == dimension_ && static_cast<int>(hi.size()) == dimension_,
          "box dimension does not match measure dimension");
  require(dimension_ <= 8, "box_mass supports dimension <= 8");
  if (total_ == 0.0) return 0.0;
  Segment segs[8][3];
  int counts[8];
  const double S = static_cast<double>(cells_per_axis_);
  for (int d = 0; d < dimension_; ++d) {
    const double u = std::clamp((lo[d] - box_.corner()[d]) / cell_side_, 0.0, S);
    const double v = std::clamp((hi[d] - box_.corner()[d]) / cell_side_, 0.0, S);
    counts[d] = segments_of(u, v, cells_per_axis_, segs[d]);
    if (counts[d] == 0) return 0.0;
  }
  double total = 0.0;
  int pick[8] = {0};
  std::int64_t l[8], h[8];
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dimension_; ++d) {
      const Segment& s = segs[d][pick[d]];
      l[d] = s.lo;
      h[d] = s.hi;
      w *= s.weight;
    }
    if (w > 0.0) {
      total += w * prefix_query(std::span(l, static_cast<std::size_t>(dimension_)),
                                std::span(h, static_cast<std::size_t>(dimension_)));
    }
    int d = 0;
    while (d < dimension_ && ++pick[d] == counts[d]) pick[d++] = 0;
    if (d == dimension_) break;
  }
  return std::max(0.0, total);
}

double cube_mass(const GridMeasure& mu, const Cube& q) {
  require(q.dimension() == mu.dimension(), "cube dimension does not match measure dimension");
  std::vector<double> hi(q.corner());
  for (double& x : hi) x += q.side();
  return mu.box_mass(q.corner(), hi);
}

double product_diagonal_mass(const GridMeasure& sigma, const GridMeasure& omega, const Cube& q) {
  require(sigma.dimension() == omega.dimension(), "sigma and omega must share a dimension");
  return cube_mass(sigma, q) * cube_mass(omega, q);
}

// ---------------------------------------------------------------------------

double cantor_cdf(double x, double ratio) {
  double acc = 0.0, scale = 1.0;
  for (int depth = 0; depth < 128; ++depth) {
    if (x <= 0.0) return acc;
    if (x >= 1.0) return acc + scale;
    if (x < ratio) {
      x /= ratio;
    } else if (x > 1.0 - ratio) {
      acc += 0.5 * scale;
      x = (x - (1.0 - ratio)) / ratio;
    } else {
      return acc + 0.5 * scale;
    }
    scale *= 0.5;
    if (scale < 1e-30) break;
  }
  return acc + 0.5 * scale;
}

double cantor_dimension(double ratio) { return std::log(2.0) / std::log(1.0 / ratio); }

namespace {

struct KindName {
  std::string operator()(const spec::Lebesgue&) const { return "lebesgue"; }
  std::string operator()(const spec::LineMeasure&) const { return "line-measure"; }
  std::string operator()(const spec::CantorProduct&) const { return "cantor-product"; }
  std::string operator()(const spec::PointMasses&) const { return "point-masses"; }
  std::string operator()(const spec::DensityTable&) const { return "density-table"; }
};

// Iterates all n-tuples in [0, S)^n in linear-id order.
template <typename Fn>
void for_each_index(int n, std::int64_t S, Fn&& fn) {
  CellIndex idx(static_cast<std::size_t>(n), 0);
  const std::int64_t total = ipow(S, n);
  for (std::int64_t k = 0; k < total; ++k) {
    fn(idx);
    for (int d = 0; d < n; ++d) {
      if (++idx[d] < S) break;
      idx[d] = 0;
    }
  }
}

struct Generator {
  int n;
  int level;
  const Cube& box;

  std::int64_t S() const { return std::int64_t{1} << level; }
  double h() const { return box.side() / static_cast<double>(S()); }

  std::vector<CellMass> operator()(const spec::Lebesgue&) const {
    std::vector<CellMass> cells;
    const double m = std::pow(h(), n);
    for_each_index(n, S(), [&](const CellIndex& i) { cells.push_back({i, m}); });
    return cells;
  }

  std::vector<CellMass> operator()(const spec::LineMeasure&) const {
    require(n == 2, "line-measure requires dimension 2");
    const double u = (0.0 - box.corner()[1]) / h();
    const auto row = static_cast<std::int64_t>(std::floor(u));
    require(row >= 0 && row < S(), "line-measure axis {x2 = 0} does not meet the support box");
    std::vector<CellMass> cells;
    for (std::int64_t i = 0; i < S(); ++i) cells.push_back({{i, row}, h()});
    return cells;
  }

  std::vector<CellMass> operator()(const spec::CantorProduct& c) const {
    require(c.ratio > 0.0 && c.ratio < 0.5, "cantor-product ratio must lie in (0, 1/2)");
    std::vector<std::vector<double>> axis(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
      auto& m = axis[d];
      m.resize(static_cast<std::size_t>(S()));
      double left = cantor_cdf(box.corner()[d], c.ratio);
      for (std::int64_t i = 0; i < S(); ++i) {
        const double right = cantor_cdf(box.corner()[d] + static_cast<double>(i + 1) * h(), c.ratio);
        m[i] = right - left;
        left = right;
      }
    }
    std::vector<CellMass> cells;
    for_each_index(n, S(), [&](const CellIndex& i) {
      double m = 1.0;
      for (int d = 0; d < n && m > 0.0; ++d) m *= axis[d][i[d]];
      if (m > 0.0) cells.push_back({i, m});
    });
    return cells;
  }

  std::vector<CellMass> operator()(const spec::PointMasses& p) const {
    std::vector<CellMass> cells;
    for (const auto& a : p.atoms) {
      require(static_cast<int>(a.position.size()) == n, "atom position has wrong dimension");
      require(std::isfinite(a.weight) && a.weight >= 0.0, "atom weights must be finite and nonnegative");
      require(box.contains(a.position), "atom lies outside the support box");
      CellIndex idx(static_cast<std::size_t>(n));
      for (int d = 0; d < n; ++d) {
        auto i = static_cast<std::int64_t>(std::floor((a.position[d] - box.corner()[d]) / h()));
        idx[d] = std::clamp<std::int64_t>(i, 0, S() - 1);
      }
      cells.push_back({idx, a.weight});
    }
    return cells;
  }

  std::vector<CellMass> operator()(const spec::DensityTable& t) const {
    require(t.level >= 0, "density-table level must be nonnegative");
    const std::int64_t T = std::int64_t{1} << t.level;
    require(static_cast<std::int64_t>(t.values.size()) == ipow(T, n),
            "density-table needs 2^(n*level) values");
    for (double v : t.values) require(std::isfinite(v) && v >= 0.0, "density values must be finite and nonnegative");
    std::vector<CellMass> cells;
    const double vol = std::pow(h(), n);
    if (level >= t.level) {
      const int shift = level - t.level;
      for_each_index(n, S(), [&](const CellIndex& i) {
        std::int64_t id = 0, stride = 1;
        for (int d = 0; d < n; ++d) {
          id += (i[d] >> shift) * stride;
          stride *= T;
        }
        const double v = t.values[static_cast<std::size_t>(id)];
        if (v > 0.0) cells.push_back({i, v * vol});
      });
    } else {
      const int shift = t.level - level;
      const double fine_vol = std::pow(box.side() / static_cast<double>(T), n);
      std::map<CellIndex, double> acc;
      for_each_index(n, T, [&](const CellIndex& i) {
        std::int64_t id = 0, stride = 1;
        for (int d = 0; d < n; ++d) {
          id += i[d] * stride;
          stride *= T;
        }
        const double v = t.values[static_cast<std::size_t>(id)];
        if (v <= 0.0) return;
        CellIndex parent(i);
        for (auto& x : parent) x >>= shift;
        acc[parent] += v * fine_vol;
      });
      for (auto& [i, m] : acc) cells.push_back({i, m});
    }
    return cells;
  }
};

}  // namespace

std::string kind_name(const MeasureSpec& s) { return std::visit(KindName{}, s); }

GridMeasure generate(const MeasureSpec& s, int n, int level, const Cube& box) {
  require(n >= 1, "dimension must be at least 1");
  require(level >= 0, "grid level must be nonnegative");
  require(box.dimension() == n, "support box dimension does not match n");
  auto cells = std::visit(Generator{n, level, box}, s);
  return GridMeasure(n, level, box, cells);
}

GridMeasure coarsen(const GridMeasure& mu) {
  require(mu.level() >= 1, "cannot coarsen a level-0 measure");
  std::map<CellIndex, double> acc;
  const auto ids = mu.cell_ids();
  const auto masses = mu.cell_masses();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    auto idx = mu.unravel(ids[k]);
    for (auto& x : idx) x >>= 1;
    acc[idx] += masses[k];
  }
  std::vector<CellMass> cells;
  for (auto& [i, m] : acc) cells.push_back({i, m});
  return GridMeasure(mu.dimension(), mu.level() - 1, mu.box(), cells);
}

GridMeasure scaled(const GridMeasure& mu, double c) {
  require(std::isfinite(c) && c >= 0.0, "scale factor must be finite and nonnegative");
  auto cells = mu.cells();
  for (auto& cell : cells) cell.mass *= c;
  return GridMeasure(mu.dimension(), mu.level(), mu.box(), cells);
}

// ---------------------------------------------------------------------------

std::string to_json(const GridMeasure& mu) {
  nlohmann::json j;
  j["dimension"] = mu.dimension();
  j["level"] = mu.level();
  j["box"] = {{"corner", mu.box().corner()}, {"side", mu.box().side()}};
  auto cells = nlohmann::json::array();
  for (const auto& c : mu.cells()) {
    auto row = nlohmann::json::array();
    for (auto i : c.index) row.push_back(i);
    row.push_back(c.mass);
    cells.push_back(std::move(row));
  }
  j["cells"] = std::move(cells);
  return j.dump();
}

GridMeasure measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("measure file is not valid JSON: ") + e.what());
  }
  try {
    const int n = j.at("dimension").get<int>();
    const int level = j.at("level").get<int>();
    Cube box(j.at("box").at("corner").get<std::vector<double>>(), j.at("box").at("side").get<double>());
    std::vector<CellMass> cells;
    for (const auto& row : j.at("cells")) {
      require(row.is_array() && static_cast<int>(row.size()) == n + 1, "each cell row needs n indices and a mass");
      CellMass c;
      for (int d = 0; d < n; ++d) c.index.push_back(row[static_cast<std::size_t>(d)].get<std::int64_t>());
      c.mass = row[static_cast<std::size_t>(n)].get<double>();
      cells.push_back(std::move(c));
    }
    return GridMeasure(n, level, std::move(box), cells);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed measure file: ") + e.what());
  }
}

void save_measure(const GridMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot open " + path + " for writing");
  out << to_json(mu) << '\n';
}

GridMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open measure file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

std::string to_csv(const GridMeasure& mu) {
  std::ostringstream out;
  out.precision(17);
  for (int d = 0; d < mu.dimension(); ++d) out << 'i' << d << ',';
  out << "mass\n";
  for (const auto& c : mu.cells()) {
    for (auto i : c.index) out << i << ',';
    out << c.mass << '\n';
  }
  return out.str();
}

}  // namespace twoweight
