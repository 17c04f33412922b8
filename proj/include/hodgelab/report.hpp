#pragma once

#include <string>

#include <json.hpp>

#include "hodgelab/verify.hpp"

namespace hodgelab {

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const RunConfig& config);

// Parses a JSON RunConfig; absent keys keep their defaults, unknown keys and
// type mismatches raise ErrorKind::Config.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Fixed-width table rendered from the JSON form of a report.
std::string render_table(const nlohmann::json& report);

// Two-space indented JSON; `timestamp` dropped when `with_timestamp` is false.
std::string dump_report(const nlohmann::json& report, bool with_timestamp = true);

}  // namespace hodgelab
