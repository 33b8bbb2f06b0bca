// twoweight command-line front end.
//
// Every subcommand writes one JSON report ({schema, version, kind, config,
// result, checks, pass}) to --out, to $TWOWEIGHT_OUT_DIR/<command>.json, or
// to stdout. Exit status: 0 all checks pass, 1 a check failed, 2 bad input.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twoweight/acceptance.hpp"
#include "twoweight/error.hpp"
#include "twoweight/families.hpp"
#include "twoweight/kernel.hpp"
#include "twoweight/parallel.hpp"
#include "twoweight/report.hpp"

namespace fs = std::filesystem;
using namespace twoweight;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
bool is_set(double x) { return !std::isnan(x); }

struct Options {
  std::vector<std::string> measures;
  std::vector<std::string> measure_files;
  int n = 1;
  int level = 0;
  std::string box;
  std::string cube;
  std::string family = "shifted";
  int k_min = 0;
  int k_max = -1;
  double alpha = kUnset;
  double beta = kUnset;
  double theta = kUnset;
  double tau = 0.2;
  double gamma = 5.0;
  int depth = 0;
  int kappa = 2;
  unsigned threads = 0;
  std::uint64_t seed = 20240611;
  std::string out;
  std::string out_dir;
  std::string csv;
  std::string save_measure;

  // command specific
  std::string variant = "classical";
  int cutoff = -1;
  int pairs = 20;
  std::string pair_file;
  int grid = 256;
  double target = 10.0;
  int max_sweeps = 10000;
  double x1 = kUnset, x2 = kUnset;
  std::string pair_out;
  std::string scenario = "line";
  int levels = 10;
  double radius = 1.0;
  int N = 4;
  std::string selection = "all";
  double min_ratio = 0.9;
  int starts = 24;
  int cancel_grid = 2;
  std::vector<int> only;
};

// A check that ends up in the report and decides the exit status.
struct Checks {
  Json list = Json::array();
  bool pass = true;
  void add(const std::string& name, bool ok, Json detail = nullptr) {
    list.push_back({{"name", name}, {"pass", ok}, {"detail", std::move(detail)}});
    pass = pass && ok;
  }
};

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("not a number: '" + item + "'");
    }
    require(used == item.size(), "not a number: '" + item + "'");
    out.push_back(v);
  }
  require(!out.empty(), "empty number list");
  return out;
}

// CORNER:SIDE, the corner either one value per axis or a single value used on every axis.
Cube parse_cube(const std::string& text, int n) {
  const auto colon = text.rfind(':');
  require(colon != std::string::npos, "cube must be CORNER:SIDE, got '" + text + "'");
  auto corner = parse_numbers(text.substr(0, colon));
  const auto side = parse_numbers(text.substr(colon + 1));
  require(side.size() == 1 && side[0] > 0.0, "cube side must be one positive number");
  if (corner.size() == 1) corner.assign(static_cast<std::size_t>(n), corner[0]);
  require(static_cast<int>(corner.size()) == n, "cube corner has " + std::to_string(corner.size()) +
                                                    " coordinates, dimension is " + std::to_string(n));
  return Cube(corner, side[0]);
}

int default_level(int n) { return n == 1 ? 10 : n == 2 ? 7 : 5; }

struct Loaded {
  std::vector<GridMeasure> mu;  // one or two measures on one grid
  Json labels = Json::array();
  const GridMeasure& sigma() const { return mu.front(); }
  const GridMeasure& omega() const { return mu.back(); }
};

GridMeasure from_text(const std::string& text, int n, int level, const Cube& box) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "lebesgue") return generate(spec::Lebesgue{}, n, level, box);
  if (kind == "line") return generate(spec::LineMeasure{}, n, level, box);
  if (kind == "cantor") {
    const double ratio = arg.empty() ? 1.0 / 3.0 : parse_numbers(arg).at(0);
    return generate(spec::CantorProduct{ratio}, n, level, box);
  }
  if (kind == "gap") {
    require(n == 1, "gap measure is one-dimensional");
    require(!arg.empty(), "gap measure needs gap:EPS");
    return gap_measure(parse_numbers(arg).at(0), level);
  }
  throw InvalidInput("unknown measure '" + text + "' (lebesgue, line, cantor[:RATIO], gap:EPS)");
}

Loaded load(const Options& o, int fallback_level) {
  Loaded out;
  for (const auto& path : o.measure_files) {
    out.mu.push_back(load_measure(path));
    out.labels.push_back({{"file", path}});
  }
  int n = o.n, level = o.level > 0 ? o.level : fallback_level;
  std::optional<Cube> box;
  if (!out.mu.empty()) {
    n = out.mu.front().dimension();
    level = out.mu.front().level();
    box = out.mu.front().box();
  } else if (!o.box.empty()) {
    box = parse_cube(o.box, n);
  } else {
    bool has_line = false;
    for (const auto& m : o.measures) has_line = has_line || m.rfind("line", 0) == 0;
    box = has_line ? Cube(std::vector<double>(static_cast<std::size_t>(n), -1.0), 2.0) : unit_cube(n);
  }
  std::vector<std::string> specs = o.measures;
  if (specs.empty() && out.mu.empty()) specs.push_back("lebesgue");
  for (const auto& s : specs) {
    out.mu.push_back(from_text(s, n, level, *box));
    out.labels.push_back({{"spec", s},
                          {"dimension", out.mu.back().dimension()},
                          {"level", out.mu.back().level()},
                          {"box", to_json(out.mu.back().box())}});
  }
  require(out.mu.size() <= 2, "at most two measures (sigma, omega) may be given");
  if (out.mu.size() == 2) require_shared_grid(out.mu[0], out.mu[1]);

  if (!o.save_measure.empty()) {
    if (out.mu.size() == 1) {
      save_measure(out.mu[0], o.save_measure);
    } else {
      const fs::path p(o.save_measure);
      save_measure(out.mu[0], (p.parent_path() / (p.stem().string() + ".sigma" + p.extension().string())).string());
      save_measure(out.mu[1], (p.parent_path() / (p.stem().string() + ".omega" + p.extension().string())).string());
    }
  }
  if (!o.csv.empty()) {
    auto write = [](const std::string& path, const std::string& text) {
      std::ofstream f(path);
      require(static_cast<bool>(f), "cannot write " + path);
      f << text;
    };
    if (out.mu.size() == 1) {
      write(o.csv, to_csv(out.mu[0]));
    } else {
      const fs::path p(o.csv);
      write((p.parent_path() / (p.stem().string() + ".sigma" + p.extension().string())).string(), to_csv(out.mu[0]));
      write((p.parent_path() / (p.stem().string() + ".omega" + p.extension().string())).string(), to_csv(out.mu[1]));
    }
  }
  return out;
}

Cube base_cube(const Options& o, const GridMeasure& mu) {
  return o.cube.empty() ? mu.box() : parse_cube(o.cube, mu.dimension());
}

// Generations up to the grid resolution less `margin`, at most `cap`.
int resolved_kmax(const Options& o, const GridMeasure& mu, const Cube& base, int margin, int cap) {
  if (o.k_max >= 0) return o.k_max;
  const int resolution = static_cast<int>(std::floor(std::log2(base.side() / mu.cell_side()) + 1e-9));
  return std::max(o.k_min, std::min(cap, resolution - margin));
}

CubeFamily make_family(const Options& o, const GridMeasure& mu, int margin, int cap) {
  const Cube base = base_cube(o, mu);
  const int k_max = resolved_kmax(o, mu, base, margin, cap);
  require(o.k_min >= 0 && o.k_min <= k_max, "need 0 <= --kmin <= --kmax");
  if (o.family == "dyadic") return standard_family(base, o.k_min, k_max, false);
  if (o.family == "shifted") return standard_family(base, o.k_min, k_max, true);
  if (o.family == "axis") return axis_centered_family(base, o.k_min, k_max);
  if (o.family == "cantor") return cantor_intervals(1.0 / 3.0, k_max);
  throw InvalidInput("unknown family '" + o.family + "' (dyadic, shifted, axis, cantor)");
}

Json family_json(const CubeFamily& f) { return {{"description", f.description}, {"cubes", f.cubes.size()}}; }

Json base_config(const std::string& command, const Options& o, const Loaded* m) {
  Json c{{"command", command}, {"seed", o.seed}};
  if (m) c["measures"] = m->labels;
  return c;
}

// ---------------------------------------------------------------------------
// Output

int emit(const std::string& kind, const Options& o, Json config, Json result, const Checks& checks) {
  Json report = report_envelope(kind, std::move(config), std::move(result));
  report["checks"] = checks.list;
  report["pass"] = checks.pass;
  const std::string text = dump_report(report);

  std::string path = o.out;
  if (!o.out_dir.empty()) {
    if (path.empty()) path = (fs::path(o.out_dir) / (kind + ".json")).string();
    else if (fs::path(path).is_relative()) path = (fs::path(o.out_dir) / path).string();
  }
  if (path.empty()) {
    std::cout << text;
  } else {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p);
    require(static_cast<bool>(f), "cannot write " + path);
    f << text;
  }
  for (const auto& c : checks.list) {
    if (!c["pass"].get<bool>()) std::cerr << "FAIL: " << c["name"].get<std::string>() << "\n";
  }
  std::cerr << kind << ": " << (checks.pass ? "PASS" : "FAIL") << "\n";
  return checks.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_exponents(const Options& o) {
  const auto m = load(o, o.n == 1 ? 12 : default_level(o.n));
  const auto fam = make_family(o, m.sigma(), 5, m.sigma().dimension() == 1 ? 6 : 4);
  Checks checks;
  Json result{{"family", family_json(fam)}, {"measures", Json::array()}};
  for (std::size_t i = 0; i < m.mu.size(); ++i) {
    const auto d = doubling_exponent(m.mu[i], kDefaultGrowthScales, fam.cubes);
    const auto r = reverse_doubling_exponent(m.mu[i], kDefaultShrinkScales, fam.cubes);
    const std::string who = i == 0 ? "sigma" : "omega";
    checks.add(who + " doubling exponent finite", std::isfinite(d.exponent) && d.cubes_used > 0, d.exponent);
    checks.add(who + " reverse doubling exponent finite", std::isfinite(r.exponent) && r.cubes_used > 0, r.exponent);
    result["measures"].push_back({{"role", who}, {"doubling", to_json(d)}, {"reverse", to_json(r)}});
  }
  const auto diag = diagonal_reverse_doubling_exponent(m.sigma(), m.omega(), kDefaultShrinkScales, fam.cubes);
  checks.add("diagonal reverse doubling exponent finite", std::isfinite(diag.exponent) && diag.cubes_used > 0,
             diag.exponent);
  result["diagonal"] = to_json(diag);
  Json config = base_config("exponents", o, &m);
  config["growth_scales"] = kDefaultGrowthScales;
  config["shrink_scales"] = kDefaultShrinkScales;
  return emit("exponents", o, config, result, checks);
}

int cmd_a2(const Options& o) {
  const auto m = load(o, default_level(o.n));
  const double alpha = is_set(o.alpha) ? o.alpha : 0.5;
  const auto fam = make_family(o, m.sigma(), 1, m.sigma().dimension() == 1 ? 8 : 5);
  std::vector<A2Variant> variants;
  if (o.variant == "classical" || o.variant == "all") variants.push_back(A2Variant::classical);
  if (o.variant == "forward" || o.variant == "all") variants.push_back(A2Variant::one_tailed_forward);
  if (o.variant == "backward" || o.variant == "all") variants.push_back(A2Variant::one_tailed_backward);
  require(!variants.empty(), "unknown --variant '" + o.variant + "' (classical, forward, backward, all)");
  Checks checks;
  Json result{{"family", family_json(fam)}, {"reports", Json::array()}};
  for (auto v : variants) {
    const auto r = v == A2Variant::classical ? a2_classical(m.sigma(), m.omega(), alpha, fam.cubes)
                                             : a2_one_tailed(m.sigma(), m.omega(), alpha, fam.cubes,
                                                             v == A2Variant::one_tailed_backward);
    checks.add(variant_name(v) + " constant finite", std::isfinite(r.constant) && r.cubes_scanned > 0, r.constant);
    result["reports"].push_back(to_json(r));
  }
  Json config = base_config("a2", o, &m);
  config["alpha"] = alpha;
  config["variant"] = o.variant;
  return emit("a2", o, config, result, checks);
}

int cmd_pairing(const Options& o) {
  const auto m = load(o, default_level(o.n));
  const double alpha = is_set(o.alpha) ? o.alpha : 0.5;
  const Cube q = base_cube(o, m.sigma());
  const auto p = fractional_pairing(m.sigma(), m.omega(), q, alpha);
  Checks checks;
  checks.add("pairing finite", std::isfinite(p.value), p.value);
  Json result{{"cube", to_json(q)}, {"pairing", to_json(p)}};
  if (is_set(o.theta)) {
    const int n = m.sigma().dimension();
    const auto shell = shell_upper_bound(m.sigma(), m.omega(), q, alpha, o.theta);
    std::vector<Cube> a2_family;
    for (int k = 0; k <= 3; ++k) {
      for (const auto& c : dyadic_cubes(q, k)) {
        a2_family.push_back(c);
        a2_family.push_back(dilate(c, 9.0));
      }
    }
    const auto a2 = a2_classical(m.sigma(), m.omega(), alpha, a2_family);
    const double constant = pairing_bound_constant(n, alpha, o.theta);
    const double bound = constant * std::sqrt(a2.constant * cube_mass(m.sigma(), q) * cube_mass(m.omega(), q));
    checks.add("shell bound >= pairing", shell.value >= p.value, shell.value);
    checks.add("pairing <= C sqrt(A2) sqrt(|Q|_s |Q|_w)", p.value <= bound, bound);
    result["shell_bound"] = to_json(shell);
    result["a2"] = to_json(a2);
    result["a2_family"] = "dyadic subcubes of Q, generations 0..3, with their 9-fold dilates";
    result["pairing_bound_constant"] = constant;
    result["pairing_bound"] = bound;
  }
  Json config = base_config("pairing", o, &m);
  config["alpha"] = alpha;
  config["theta"] = is_set(o.theta) ? Json(o.theta) : Json(nullptr);
  return emit("pairing", o, config, result, checks);
}

int cmd_maximal(const Options& o) {
  const auto m = load(o, default_level(o.n));
  const double alpha = is_set(o.alpha) ? o.alpha : 0.5;
  const double beta = is_set(o.beta) ? o.beta : 0.5 * alpha;
  const Cube q = base_cube(o, m.sigma());
  const int cutoff =
      o.cutoff >= 0 ? o.cutoff : static_cast<int>(std::floor(std::log2(q.side() / m.sigma().cell_side()) + 1e-9));
  const auto profile = fractional_maximal_energy_profile(m.sigma(), q, beta, cutoff);
  bool monotone = true;
  for (std::size_t k = 1; k < profile.size(); ++k) monotone = monotone && profile[k] >= profile[k - 1] * (1.0 - 1e-12);
  Checks checks;
  checks.add("energy nondecreasing in the cutoff", monotone);
  Json result{{"cube", to_json(q)}, {"profile", profile}, {"energy", profile.back()}};
  if (m.mu.size() == 2 || is_set(o.alpha)) {
    const auto p = fractional_pairing(m.sigma(), m.omega(), q, alpha);
    result["pairing"] = to_json(p);
    result["pairing_over_energy"] = profile.back() > 0.0 ? Json(p.value / profile.back()) : Json(nullptr);
  }
  Json config = base_config("maximal", o, &m);
  config["alpha"] = alpha;
  config["beta"] = beta;
  config["cutoff"] = cutoff;
  config["candidates"] = "dyadic and half-shifted subcubes of Q";
  return emit("maximal", o, config, result, checks);
}

int cmd_hdyadic(const Options& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> val(0.25, 4.0);
  const int depth = o.depth > 0 ? o.depth : 8;
  require(depth <= 22, "--depth must be at most 22 for explicit leaves");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  if (!o.pair_file.empty()) {
    std::ifstream f(o.pair_file);
    require(static_cast<bool>(f), "cannot read " + o.pair_file);
    const Json j = Json::parse(f);
    pairs.emplace_back(j.at("u").get<std::vector<double>>(), j.at("v").get<std::vector<double>>());
  } else {
    for (int t = 0; t < o.pairs; ++t) {
      std::vector<double> u(std::size_t{1} << depth), v(u.size());
      for (double& x : u) x = val(rng);
      for (double& x : v) x = val(rng);
      pairs.emplace_back(std::move(u), std::move(v));
    }
  }
  Checks checks;
  Json rows = Json::array();
  double pairing_err = 0.0, midpoint_err = 0.0, rescale_err = 0.0;
  bool rescale_ok = true;
  for (const auto& [lu, lv] : pairs) {
    const HaarTree u(lu), v(lv);
    const double a = haar_pairing(u, v), b = haar_pairing_direct(u, v);
    pairing_err = std::max(pairing_err, std::abs(a - b) / std::max(1.0, std::abs(b)));
    for (int j = 0; j < u.depth(); ++j) {
      for (std::int64_t i = 0; i < (std::int64_t{1} << j); ++i) {
        for (const HaarTree* h : {&u, &v}) {
          midpoint_err = std::max(
              midpoint_err, std::abs(h->average(j, i) - 0.5 * (h->average(j + 1, 2 * i) + h->average(j + 1, 2 * i + 1))));
        }
      }
    }
    const int k = std::uniform_int_distribution<int>(-6, 0)(rng);
    const auto l = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << -k) - 1)(rng);
    const auto rc = rescale_invariance_check(lu, lv, k, l);
    rescale_ok = rescale_ok && rc.pass;
    rescale_err = std::max(rescale_err, std::max(std::abs(rc.rescaled - rc.original), rc.average_error));
    rows.push_back({{"haar_pairing", a}, {"riemann", b}, {"rescale", {{"k", k}, {"l", l}, {"check", to_json(rc)}}}});
  }
  checks.add("Haar pairing equals leafwise sum to 1e-12", pairing_err <= 1e-12, pairing_err);
  checks.add("midpoint identity to 1e-12", midpoint_err <= 1e-12, midpoint_err);
  checks.add("rescale invariance to 1e-12", rescale_ok, rescale_err);
  Json config = base_config("hdyadic", o, nullptr);
  config["depth"] = o.pair_file.empty() ? Json(depth) : Json(nullptr);
  config["pairs"] = pairs.size();
  config["pair_file"] = o.pair_file.empty() ? Json(nullptr) : Json(o.pair_file);
  config["leaf_range"] = {0.25, 4.0};
  return emit("hdyadic", o, config, {{"pairs", rows}}, checks);
}

int cmd_testing(const Options& o) {
  const auto m = load(o, o.n == 1 ? 8 : 5);
  const double alpha = is_set(o.alpha) ? o.alpha : 0.5;
  const auto fam = make_family(o, m.sigma(), 1, m.sigma().dimension() == 1 ? 6 : 3);
  const auto samples = default_cancellation_samples(m.sigma().box(), o.cancel_grid);
  const auto bct = bct_fractional(m.sigma(), m.omega(), alpha, fam.cubes);
  const auto tf = cube_testing(m.sigma(), m.omega(), alpha, fam.cubes, false);
  const auto tb = cube_testing(m.sigma(), m.omega(), alpha, fam.cubes, true);
  const auto af = cancellation_constant(m.sigma(), m.omega(), alpha, samples, false);
  const auto ab = cancellation_constant(m.sigma(), m.omega(), alpha, samples, true);
  const auto norm = operator_norm(m.sigma(), m.omega(), alpha);
  const double slack = 1.0 + 1e-9;
  Checks checks;
  checks.add("BCT <= T-forward", bct.value <= tf.value * slack, Json{bct.value, tf.value});
  checks.add("BCT <= T-backward", bct.value <= tb.value * slack, Json{bct.value, tb.value});
  const bool converged = norm.extra.count("converged") == 0 || norm.extra.at("converged") != 0.0;
  if (converged) checks.add("BCT <= Norm", bct.value <= norm.value * slack, Json{bct.value, norm.value});
  Json result{{"family", family_json(fam)},
              {"cancellation_samples", samples.size()},
              {"constants", {to_json(bct), to_json(tf), to_json(tb), to_json(af), to_json(ab), to_json(norm)}}};
  if (!converged) result["note"] = "power iteration did not converge, Norm is a lower bound and was not compared";
  Json config = base_config("testing", o, &m);
  config["alpha"] = alpha;
  config["cancellation_grid"] = o.cancel_grid;
  return emit("testing", o, config, result, checks);
}

int cmd_bellman(const Options& o) {
  BellmanField field(o.tau, o.grid);
  const auto run = iterate_until(field, o.target, o.max_sweeps);
  Checks checks;
  checks.add("max B/sqrt(x1 x2) exceeds the target", run.reached, run.max_ratio);
  Json result{{"iteration", to_json(run)}};
  double x1 = o.x1, x2 = o.x2;
  if (!is_set(x1) || !is_set(x2)) {
    x1 = field.coordinate(run.best_i);
    x2 = field.coordinate(run.best_j);
  }
  result["start"] = {x1, x2};
  WeightPair pair;
  Certificate cert;
  if (o.depth > 0) {
    pair = extract_weight_pair(field, x1, x2, o.depth);
    cert = verify_certificate(pair, o.tau, o.gamma);
  } else {
    auto c = certify_weight_pair(field, x1, x2, o.gamma);
    pair = std::move(c.pair);
    cert = c.certificate;
    result["probe_depth"] = c.probe_depth;
  }
  checks.add("all averages positive", cert.positive);
  checks.add("(E_I U)(E_I V) <= 1 at every node", cert.product_ok, cert.max_product);
  checks.add("sibling ratios inside (1 - tau, 1 + tau)", cert.ratios_ok, cert.worst_ratio_margin);
  checks.add("E_I = (E_I- + E_I+)/2 to 1e-12", cert.averages_ok);
  checks.add("functional > gamma sqrt(E U E V)", cert.functional_ok, cert.gamma_achieved);
  result["certificate"] = to_json(cert);
  const Json pair_json = to_json(pair, true);
  if (!o.pair_out.empty()) {
    std::ofstream f(o.pair_out);
    require(static_cast<bool>(f), "cannot write " + o.pair_out);
    f << dump_report(report_envelope("weight_pair", {{"tau", o.tau}, {"gamma", o.gamma}}, pair_json));
    result["weight_pair_file"] = o.pair_out;
  } else {
    result["weight_pair"] = pair_json;
  }
  Json config = base_config("bellman", o, nullptr);
  config["tau"] = o.tau;
  config["gamma"] = o.gamma;
  config["depth"] = o.depth > 0 ? Json(o.depth) : Json("auto");
  config["grid"] = o.grid;
  config["target"] = o.target;
  config["max_sweeps"] = o.max_sweeps;
  config["moves"] = field.moves().size();
  return emit("bellman", o, config, result, checks);
}

int cmd_sharpness(const Options& o) {
  Checks checks;
  Json config = base_config("sharpness", o, nullptr);
  config["scenario"] = o.scenario;
  if (o.scenario == "line") {
    const int level = o.level > 0 ? o.level : 10;
    const auto rep = line_measure_divergence(o.radius, o.levels, level);
    checks.add("sqrt(A2) = 1 within 10%", std::abs(rep.a2 - 1.0) <= 0.1, rep.a2);
    checks.add("energy strictly increasing", rep.monotone);
    checks.add("linear fit R^2 >= 0.98", rep.r_squared >= 0.98, rep.r_squared);
    config["radius"] = o.radius;
    config["levels"] = o.levels;
    config["level"] = level;
    config["alpha"] = 1.0;
    config["beta"] = 0.5;
    return emit("sharpness", o, config, to_json(rep), checks);
  }
  require(o.scenario == "cantor", "unknown --scenario '" + o.scenario + "' (line, cantor)");
  require(o.selection == "all" || o.selection == "single", "--selection must be all or single");
  Options mo = o;
  if (mo.measures.empty() && mo.measure_files.empty()) mo.measures.push_back("cantor");
  mo.n = 1;
  const auto m = load(mo, 22);
  const auto& mu = m.sigma();
  require(mu.dimension() == 1, "the cantor scenario is one-dimensional");
  double ratio = 1.0 / 3.0;
  if (!o.measures.empty() && o.measures[0].rfind("cantor:", 0) == 0) ratio = parse_numbers(o.measures[0].substr(7)).at(0);
  const double theta = cantor_dimension(ratio);
  const double beta = is_set(o.beta) ? o.beta : 0.5 * (1.0 - theta);
  const Cube q = o.cube.empty() ? Cube({0.0}, 0.25) : parse_cube(o.cube, 1);
  const auto rep = accumulate_lower_bound(mu, q, beta, o.levels, o.N,
                                          o.selection == "all" ? Selection::all : Selection::single);
  Json normalized = Json::array();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.energy.size(); ++k) {
    const double r = rep.energy[k] / ((k + 1) * rep.c_n * rep.q_mass);
    normalized.push_back(r);
    worst = std::min(worst, r);
  }
  if (rep.ad_window) checks.add("AD window ratio <= 16", rep.ad_window->pass(), rep.ad_window->ratio());
  checks.add("regions disjoint", rep.disjoint);
  checks.add("cumulative value increasing", rep.monotone);
  checks.add("cumulative >= min_ratio * m c_N |Q|", worst >= o.min_ratio, worst);
  Json result = to_json(rep);
  result["normalized_cumulative"] = normalized;
  result["cube"] = to_json(q);
  config["measures"] = m.labels;
  config["theta"] = theta;
  config["beta"] = beta;
  config["rounds"] = o.levels;
  config["N"] = o.N;
  config["selection"] = o.selection;
  config["min_ratio"] = o.min_ratio;
  return emit("sharpness", o, config, result, checks);
}

int cmd_poly(const Options& o) {
  const auto m = load(o, o.n == 1 ? 12 : 6);
  const auto& mu = m.sigma();
  EnergyOptions eo;
  eo.seed = o.seed;
  eo.starts = o.starts;
  Checks checks;
  Json result;
  double c_kappa = 0.0;
  std::optional<CubeFamily> fam;
  if (o.k_max >= 0) {
    fam = make_family(o, mu, 0, o.k_max);
    const auto scan = energy_constant_sup(mu, fam->cubes, o.kappa, eo);
    c_kappa = scan.worst.value;
    result["family"] = family_json(*fam);
    result["worst"] = to_json(scan.worst);
    result["extremal"] = to_json(scan.extremal);
    result["used"] = scan.used;
    result["skipped"] = scan.skipped;
  } else {
    const Cube q = base_cube(o, mu);
    const auto e = energy_constant(mu, q, o.kappa, eo);
    c_kappa = e.value;
    result["cube"] = to_json(q);
    result["energy_constant"] = to_json(e);
  }
  checks.add("C_kappa finite and >= 1", std::isfinite(c_kappa) && c_kappa >= 1.0 - 1e-9, c_kappa);
  if (o.kappa == 1) checks.add("C_1 = 1 exactly", c_kappa == 1.0, c_kappa);
  if (is_set(o.beta)) {
    require(fam.has_value(), "--beta needs a cube family (--kmax)");
    const auto params = doubling_from_energy(c_kappa, mu.dimension(), o.beta);
    const auto check = doubling_check(mu, params.shrink, fam->cubes);
    checks.add("doubling_check gamma >= derived gamma", check.gamma >= params.gamma, Json{check.gamma, params.gamma});
    result["doubling_parameters"] = to_json(params);
    result["doubling_check"] = to_json(check);
  }
  Json config = base_config("poly", o, &m);
  config["kappa"] = o.kappa;
  config["beta"] = is_set(o.beta) ? Json(o.beta) : Json(nullptr);
  config["starts"] = eo.starts;
  config["max_evaluations"] = eo.max_evaluations;
  return emit("poly", o, config, result, checks);
}

int cmd_verify_all(const Options& o) {
  AcceptanceOptions ao;
  ao.only = o.only;
  ao.seed = o.seed;
  Checks checks;
  Json results = Json::array();
  for (int id : ao.only.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : ao.only) {
    const auto r = run_criterion(id, ao);
    std::cerr << format_line(r) << "\n";
    checks.add("criterion " + std::to_string(r.id) + " " + r.title, r.pass, r.summary);
    results.push_back(to_json(r));
  }
  Json config = base_config("verify-all", o, nullptr);
  config["only"] = o.only;
  return emit("verify-all", o, config, {{"criteria", results}}, checks);
}

// ---------------------------------------------------------------------------

void add_measure_options(CLI::App* s, Options& o) {
  s->add_option("--measure", o.measures, "lebesgue, line, cantor[:RATIO] or gap:EPS; give twice for sigma, omega");
  s->add_option("--measure-file", o.measure_files, "measure JSON file; may be given twice");
  s->add_option("--n", o.n, "dimension of generated measures")->check(CLI::Range(1, 4));
  s->add_option("--level", o.level, "grid level L of generated measures")->check(CLI::Range(1, 40));
  s->add_option("--box", o.box, "support box CORNER:SIDE (corner per axis or one value)");
  s->add_option("--save-measure", o.save_measure, "also write the measure(s) as JSON");
  s->add_option("--csv", o.csv, "also write the measure cell table(s) as CSV");
}

void add_family_options(CLI::App* s, Options& o) {
  s->add_option("--cube", o.cube, "base cube CORNER:SIDE (default: the support box)");
  s->add_option("--family", o.family, "dyadic, shifted, axis or cantor");
  s->add_option("--kmin", o.k_min, "first generation of the cube family");
  s->add_option("--kmax", o.k_max, "last generation of the cube family");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight norm inequality laboratory on dyadic grids"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "worker threads (0 = all cores); results do not depend on it");
  app.add_option("--seed", o.seed, "seed for randomized scans and multistart searches");
  app.add_option("--out", o.out, "report path (default: stdout)");
  app.add_option("--out-dir", o.out_dir, "directory for reports")->envname("TWOWEIGHT_OUT_DIR");

  auto* exponents = app.add_subcommand("exponents", "doubling, reverse and diagonal reverse doubling exponents");
  add_measure_options(exponents, o);
  add_family_options(exponents, o);

  auto* a2 = app.add_subcommand("a2", "classical and one-tailed A2 constants");
  add_measure_options(a2, o);
  add_family_options(a2, o);
  a2->add_option("--alpha", o.alpha, "fractional order, 0 <= alpha < n (default 0.5)");
  a2->add_option("--variant", o.variant, "classical, forward, backward or all");

  auto* pairing = app.add_subcommand("pairing", "fractional pairing on a cube, optionally against the shell bound");
  add_measure_options(pairing, o);
  pairing->add_option("--cube", o.cube, "cube CORNER:SIDE (default: the support box)");
  pairing->add_option("--alpha", o.alpha, "fractional order (default 0.5)");
  pairing->add_option("--theta", o.theta, "diagonal exponent; enables the shell bound and the A2 pairing bound");

  auto* maximal = app.add_subcommand("maximal", "fractional maximal energy profile");
  add_measure_options(maximal, o);
  maximal->add_option("--cube", o.cube, "cube CORNER:SIDE (default: the support box)");
  maximal->add_option("--alpha", o.alpha, "fractional order (default 0.5)");
  maximal->add_option("--beta", o.beta, "maximal order (default alpha/2)");
  maximal->add_option("--cutoff", o.cutoff, "last generation of candidate cubes (default: grid resolution)");

  auto* hdyadic = app.add_subcommand("hdyadic", "dyadic Hilbert transform identities on random or given pairs");
  hdyadic->add_option("--depth", o.depth, "depth of the random pairs (default 8)");
  hdyadic->add_option("--pairs", o.pairs, "number of random pairs");
  hdyadic->add_option("--pair-file", o.pair_file, "JSON {u:[...], v:[...]} with 2^M leaves each");

  auto* testing = app.add_subcommand("testing", "BCT, cube testing, cancellation and norm constants");
  add_measure_options(testing, o);
  add_family_options(testing, o);
  testing->add_option("--alpha", o.alpha, "fractional order (default 0.5)");
  testing->add_option("--cancel-grid", o.cancel_grid, "generation of the cancellation sample centers");

  auto* bellman = app.add_subcommand("bellman", "Bellman iteration and certified weight pair");
  bellman->add_option("--tau", o.tau, "sibling ratio band (1 - tau, 1 + tau)")->check(CLI::Range(0.0, 1.0));
  bellman->add_option("--gamma", o.gamma, "target functional constant");
  bellman->add_option("--depth", o.depth, "fixed pair depth M (default: smallest passing depth)");
  bellman->add_option("--grid", o.grid, "grid points per axis")->check(CLI::Range(8, 4096));
  bellman->add_option("--target", o.target, "stop when max B/sqrt(x1 x2) exceeds this");
  bellman->add_option("--max-sweeps", o.max_sweeps, "sweep budget");
  bellman->add_option("--x1", o.x1, "start state x1 (default: the maximizing node)");
  bellman->add_option("--x2", o.x2, "start state x2 (default: the maximizing node)");
  bellman->add_option("--pair-out", o.pair_out, "write the weight pair to this file instead of the report");

  auto* sharpness = app.add_subcommand("sharpness", "line-measure divergence or Cantor lower-bound accumulation");
  sharpness->add_option("--scenario", o.scenario, "line or cantor");
  sharpness->add_option("--levels", o.levels, "cutoff levels (line) or rounds (cantor)")->check(CLI::Range(1, 40));
  sharpness->add_option("--radius", o.radius, "line scenario box [0, R]^2");
  sharpness->add_option("--level", o.level, "grid level");
  sharpness->add_option("--measure", o.measures, "cantor[:RATIO] for the cantor scenario");
  sharpness->add_option("--measure-file", o.measure_files, "measure JSON for the cantor scenario");
  sharpness->add_option("--cube", o.cube, "cantor scenario cube Q (default 0:0.25)");
  sharpness->add_option("--beta", o.beta, "maximal order (default (1 - theta)/2)");
  sharpness->add_option("--N", o.N, "subdivision step (0 = smallest admissible, default 4)");
  sharpness->add_option("--selection", o.selection, "all or single empty subcubes per parent");
  sharpness->add_option("--min-ratio", o.min_ratio, "required cumulative / (m c_N |Q|)");

  auto* poly = app.add_subcommand("poly", "polynomial energy constants and derived doubling parameters");
  add_measure_options(poly, o);
  add_family_options(poly, o);
  poly->add_option("--kappa", o.kappa, "polynomial degree bound (degree < kappa)")->check(CLI::Range(1, 8));
  poly->add_option("--beta", o.beta, "run the doubling check with this beta (needs --kmax)");
  poly->add_option("--starts", o.starts, "multistart count");

  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_option("--only", o.only, "criterion ids")->delimiter(',')->check(CLI::Range(1, kCriterionCount));

  CLI11_PARSE(app, argc, argv);
  set_thread_count(o.threads);

  try {
    if (*exponents) return cmd_exponents(o);
    if (*a2) return cmd_a2(o);
    if (*pairing) return cmd_pairing(o);
    if (*maximal) return cmd_maximal(o);
    if (*hdyadic) return cmd_hdyadic(o);
    if (*testing) return cmd_testing(o);
    if (*bellman) return cmd_bellman(o);
    if (*sharpness) return cmd_sharpness(o);
    if (*poly) return cmd_poly(o);
    if (*verify) return cmd_verify_all(o);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
