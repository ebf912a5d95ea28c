#pragma once

#include "stabkit/flow.hpp"
#include "stabkit/metrics.hpp"
#include "stabkit/polytope.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace stabkit {

/// Bumped whenever a payload field changes meaning.
inline constexpr const char* schema_version = "1";

WeightSystem weight_system_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WeightSystem& ws);
nlohmann::json to_json(const Verdict& v);

struct Hypersurface {
    int degree = 0;
    int nvars = 0;
    std::vector<LatticePoint> monomials;
};

Hypersurface hypersurface_from_json(const nlohmann::json& j);

/// {"tol", "max_iters", "initial_step", ...}; absent keys keep the defaults.
FlowConfig flow_config_from_json(const nlohmann::json& j, FlowConfig base = {});
/// Summary plus the final state; the trace is left to the CSV writer.
nlohmann::json to_json(const FlowResult& r);
std::string trace_csv(const FlowResult& r);

nlohmann::json to_json(const BergmanProfile& b);
std::string bergman_csv(const BergmanProfile& b);

} // namespace stabkit
