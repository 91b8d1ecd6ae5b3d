#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "adinvest/core_model.hpp"
#include "adinvest/oracle.hpp"

namespace adinvest {

/// Parse a system document. Sites carry either closed-form parameters
/// {kappa, gamma, q} or an explicit per-(p, m) table [{p, m, F, G}]; either
/// way the values are resolved into per-action caches here.
SystemSpec parse_system(const nlohmann::json& doc);
SystemSpec load_system(const std::filesystem::path& path);

/// Normalized form: every site emitted with an explicit table. Reloading the
/// dump yields an identical SystemSpec.
nlohmann::json normalized_json(const SystemSpec& spec);

EstimationSetup parse_estimation(const nlohmann::json& doc);
EstimationSetup load_estimation(const std::filesystem::path& path);

nlohmann::json policy_json(const StationaryPolicy& policy, const SystemSpec& spec);

}  // namespace adinvest
