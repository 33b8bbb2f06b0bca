#include "twoweight/report.hpp"

namespace twoweight {

namespace {

Json optional_cube(const std::optional<Cube>& q) { return q ? to_json(*q) : Json(nullptr); }

}  // namespace

Json report_envelope(const std::string& kind, Json config, Json result) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = kReportVersion;
  j["kind"] = kind;
  j["config"] = std::move(config);
  j["result"] = std::move(result);
  return j;
}

namespace {

// log(1) / log(s) and friends come out as -0.0.
void clear_negative_zeros(Json& j) {
  if (j.is_number_float()) {
    if (j.get<double>() == 0.0) j = 0.0;
  } else if (j.is_structured()) {
    for (auto& v : j) clear_negative_zeros(v);
  }
}

}  // namespace

std::string dump_report(const Json& report) {
  Json copy = report;
  clear_negative_zeros(copy);
  return copy.dump(2) + "\n";
}

Json to_json(const Cube& q) { return Json{{"corner", q.corner()}, {"side", q.side()}}; }

Json to_json(const ExponentEstimate& e) {
  Json scan = Json::array();
  for (const auto& s : e.scan) {
    scan.push_back({{"scale", s.scale}, {"worst_ratio", s.worst_ratio}, {"slope", s.slope}, {"extremal", optional_cube(s.extremal)}});
  }
  Json j{{"direction", direction_name(e.direction)},
         {"exponent", e.exponent},
         {"scan", scan},
         {"extremal", optional_cube(e.extremal)},
         {"cubes_used", e.cubes_used},
         {"cubes_skipped", e.cubes_skipped}};
  if (e.direction == ExponentDirection::diagonal_reverse) j["half_exponent"] = e.half_exponent();
  return j;
}

Json to_json(const DoublingCheck& d) {
  return {{"beta", d.beta},         {"gamma", d.gamma},           {"doubling", d.doubling()},
          {"extremal", optional_cube(d.extremal)}, {"cubes_used", d.cubes_used}, {"cubes_skipped", d.cubes_skipped}};
}

Json to_json(const MuckenhouptReport& r) {
  return {{"variant", variant_name(r.variant)},
          {"alpha", r.alpha},
          {"constant", r.constant},
          {"sqrt_constant", std::sqrt(r.constant)},
          {"extremal", optional_cube(r.extremal)},
          {"cubes_scanned", r.cubes_scanned}};
}

Json to_json(const PairingResult& p) {
  return {{"value", p.value}, {"error_bar", p.error_bar}, {"sigma_cells", p.sigma_cells}, {"omega_cells", p.omega_cells}};
}

Json to_json(const ShellBound& s) {
  return {{"value", s.value},
          {"covering_constant", s.covering_constant},
          {"tail", s.tail},
          {"grid_generations", s.grid_generations},
          {"shell_terms", s.shell_terms}};
}

Json to_json(const CancellationSample& s) {
  return {{"center", s.center}, {"inner", s.inner}, {"outer", s.outer}};
}

Json to_json(const ConstantReport& r) {
  Json extra = Json::object();
  for (const auto& [k, v] : r.extra) extra[k] = v;
  return {{"name", r.name},
          {"value", r.value},
          {"extremal_cube", optional_cube(r.extremal_cube)},
          {"extremal_sample", r.extremal_sample ? to_json(*r.extremal_sample) : Json(nullptr)},
          {"scanned", r.scanned},
          {"skipped", r.skipped},
          {"extra", extra}};
}

Json to_json(const DivergenceRun& r) {
  return {{"sweeps", r.sweeps}, {"max_ratio", r.max_ratio}, {"reached", r.reached},
          {"best_node", {r.best_i, r.best_j}}, {"history", r.history}};
}

Json to_json(const Certificate& c) {
  Json j{{"gamma", c.gamma},
         {"tau", c.tau},
         {"depth", c.depth},
         {"functional", c.functional},
         {"half_functional", c.half_functional},
         {"root_u", c.root_u},
         {"root_v", c.root_v},
         {"gamma_achieved", c.gamma_achieved},
         {"positive", c.positive},
         {"product_ok", c.product_ok},
         {"ratios_ok", c.ratios_ok},
         {"averages_ok", c.averages_ok},
         {"functional_ok", c.functional_ok},
         {"max_product", c.max_product},
         {"worst_ratio_margin", c.worst_ratio_margin},
         {"min_delta_v", c.min_delta_v},
         {"dag_nodes", c.dag_nodes},
         {"pass", c.pass()}};
  j["offending"] = c.offending ? Json{{"level", c.offending->first}, {"index", c.offending->second}} : Json(nullptr);
  j["haar_check"] = c.haar_check ? Json(*c.haar_check) : Json(nullptr);
  return j;
}

Json to_json(const WeightPair& p, bool with_leaves) {
  Json nodes = Json::array();
  for (const auto& n : p.nodes) {
    nodes.push_back({{"u", n.u},
                     {"v", n.v},
                     {"level", n.level},
                     {"left", n.left},
                     {"right", n.right},
                     {"left_scale", n.left_scale},
                     {"right_scale", n.right_scale}});
  }
  Json j{{"depth", p.depth}, {"root", p.root}, {"root_scale", p.root_scale}, {"nodes", nodes}};
  if (with_leaves && p.depth <= 20) {
    j["leaves_u"] = p.leaves_u();
    j["leaves_v"] = p.leaves_v();
  }
  return j;
}

Json to_json(const RescaleCheck& r) {
  return {{"original", r.original}, {"rescaled", r.rescaled}, {"average_error", r.average_error}, {"pass", r.pass}};
}

Json to_json(const RatioWindow& w) {
  return {{"min", w.min},
          {"max", w.max},
          {"ratio", w.ratio()},
          {"bound", w.bound},
          {"pass", w.pass()},
          {"min_cube", optional_cube(w.min_cube)},
          {"max_cube", optional_cube(w.max_cube)},
          {"used", w.used},
          {"skipped", w.skipped}};
}

Json to_json(const GammaCount& g) {
  Json empty = Json::array();
  for (const auto& c : g.empty) empty.push_back(to_json(c));
  return {{"count", g.count}, {"total", g.total}, {"empty", empty}};
}

Json to_json(const SharpnessReport& r) {
  return {{"scenario", r.scenario},
          {"a2", r.a2},
          {"energy", r.energy},
          {"increments", r.increments},
          {"slope", r.slope},
          {"intercept", r.intercept},
          {"r_squared", r.r_squared},
          {"N", r.N},
          {"c_n", r.c_n},
          {"q_mass", r.q_mass},
          {"region_cells", r.region_cells},
          {"disjoint", r.disjoint},
          {"monotone", r.monotone},
          {"ad_window", r.ad_window ? to_json(*r.ad_window) : Json(nullptr)},
          {"warnings", r.warnings}};
}

Json to_json(const Polynomial& p) {
  return {{"n", p.n}, {"kappa", p.kappa}, {"monomials", monomials(p.n, p.kappa)}, {"coeffs", p.coeffs}};
}

Json to_json(const EnergyConstant& e) {
  return {{"value", e.value},
          {"mass", e.mass},
          {"energy", e.energy},
          {"minimizer", to_json(e.minimizer)},
          {"lower_bound", e.lower_bound},
          {"starts", e.starts}};
}

Json to_json(const DoublingParameters& d) {
  return {{"shrink", d.shrink}, {"gamma", d.gamma}, {"epsilon", d.epsilon}, {"d", d.d}};
}

}  // namespace twoweight
