#pragma once

// JSONL trial logs: one TrialEvent object per line in tick order, then a
// single {"summary": {...}} line carrying the metrics and the full config
// echo. docs/formats.md lists every field.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "pavsig/harness.hpp"

namespace pavsig {

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
// Missing keys keep their defaults. Throws std::invalid_argument on bad
// enum names.
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::ordered_json event_to_json(const TrialEvent& ev);
TrialEvent event_from_json(const nlohmann::json& j);

nlohmann::ordered_json summary_to_json(const TrialSummary& s);
TrialSummary summary_from_json(const nlohmann::json& j);

// {"events": [...], "summary": {...}}
nlohmann::ordered_json log_to_json(const TrialLog& log);

std::string to_jsonl(const TrialLog& log);
// Throws std::runtime_error on malformed input or a missing summary line.
TrialLog parse_jsonl(std::string_view text);

void write_log(const std::filesystem::path& path, const TrialLog& log);
TrialLog read_log(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

// trial_000.jsonl, trial_001.jsonl, ...
std::string log_file_name(int trial);

}  // namespace pavsig
