#pragma once

#include <string>

#include "json.hpp"
#include "twoweight/bellman.hpp"
#include "twoweight/cube.hpp"
#include "twoweight/exponents.hpp"
#include "twoweight/muckenhoupt.hpp"
#include "twoweight/operators.hpp"
#include "twoweight/poly_doubling.hpp"
#include "twoweight/sharpness.hpp"
#include "twoweight/testing.hpp"

namespace twoweight {

using Json = nlohmann::json;

inline constexpr int kReportVersion = 1;
inline constexpr const char* kReportSchema = "twoweight.report";

/// {schema, version, kind, config, result}. No timestamps, so equal inputs
/// give byte-identical output.
Json report_envelope(const std::string& kind, Json config, Json result);
std::string dump_report(const Json& report);

Json to_json(const Cube& q);
Json to_json(const ExponentEstimate& e);
Json to_json(const DoublingCheck& d);
Json to_json(const MuckenhouptReport& r);
Json to_json(const PairingResult& p);
Json to_json(const ShellBound& s);
Json to_json(const ConstantReport& r);
Json to_json(const CancellationSample& s);
Json to_json(const DivergenceRun& r);
Json to_json(const Certificate& c);
Json to_json(const WeightPair& p, bool with_leaves);
Json to_json(const RescaleCheck& r);
Json to_json(const RatioWindow& w);
Json to_json(const GammaCount& g);
Json to_json(const SharpnessReport& r);
Json to_json(const Polynomial& p);
Json to_json(const EnergyConstant& e);
Json to_json(const DoublingParameters& d);

}  // namespace twoweight
