// SPDX-License-Identifier: Apache-2.0
//
// JSON (de)serialization of scenarios and reports. Parsing is strict: unknown
// keys and wrong types are rejected with the source name, and for syntax
// errors the line and column.

#pragma once

#include <string>

#include <json.hpp>

#include "rsma/allocation_optimizer.hpp"
#include "rsma/channel_model.hpp"
#include "rsma/monte_carlo.hpp"

namespace rsma {

/// Parses a JSON document into a SystemConfig. Missing keys keep their
/// defaults; per-user arrays default to K copies of the scalar default, and
/// missing distances are drawn from rng_seed. The result is validated.
SystemConfig parse_system_config(const std::string& text, const std::string& source = "<config>");
SystemConfig system_config_from_json(const nlohmann::json& j, const std::string& source = "<config>");
SystemConfig load_system_config(const std::string& path);

nlohmann::json to_json(const SystemConfig& config);
nlohmann::json to_json(const RateEstimate& estimate);
nlohmann::json to_json(const PowerAllocation& allocation);
nlohmann::json to_json(const OptimizationReport& report);

std::string to_string(CommonPrecoderMode mode);
CommonPrecoderMode parse_precoder_mode(const std::string& name);

/// Parses JSON text, reporting syntax errors as "source:line:column: message".
nlohmann::json parse_json_document(const std::string& text, const std::string& source);
std::string read_text_file(const std::string& path);

}  // namespace rsma
