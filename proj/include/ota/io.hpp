#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include <json.hpp>

#include "ota/assigner.hpp"
#include "ota/bench.hpp"
#include "ota/oracle.hpp"
#include "ota/scene_sim.hpp"

namespace ota {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Compact JSON with every floating-point number printed at 17 significant
// digits, so that files round-trip bit-exactly and byte-identically.
void write_json(std::ostream& os, const json& value);
std::string dump_json(const json& value);

// Throws Error(kIo) if the file cannot be opened and Error(kParse) with the
// byte offset on malformed input.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& value);

// Anchors are omitted unless explicit_anchors; readers regenerate them from
// the image size and strides.
json scene_to_json(const Scene& scene, bool explicit_anchors = false);
Scene scene_from_json(const json& j);

json cost_to_json(const CostMatrix& cost, const SupplyDemand& sd);
std::pair<CostMatrix, SupplyDemand> cost_from_json(const json& j);

json plan_to_json(const TransportPlan& plan, double objective_value);
json exact_to_json(const ExactSolution& sol);
json config_to_json(const OtaConfig& cfg);
json assignment_to_json(const AssignmentResult& res, const OtaConfig& cfg);
json report_to_json(const BenchReport& report, const json& config);

}  // namespace ota
