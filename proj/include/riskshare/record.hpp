#pragma once

#include <string>

#include <json.hpp>

namespace riskshare {

inline constexpr const char* kToolVersion = "0.1.0";

/// One persisted experiment. The serialized record is a pure function of
/// scenario text + seed, so identical runs produce byte-identical files;
/// wall time is reported on the console and kept out of the record.
struct ExperimentRecord {
    std::string tool_version = kToolVersion;
    std::string scenario_name;
    std::string scenario_digest;  // digest of the effective (canonical) scenario
    std::string input_digest;     // digest of the scenario text as given
    unsigned long seed = 0;
    std::string game;  // "risk" | "profit"
    nlohmann::ordered_json payload;
    double wall_time_s = 0.0;  // not serialized
};

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_digest(const std::string& bytes);

nlohmann::ordered_json record_to_json(const ExperimentRecord& rec);
ExperimentRecord record_from_json(const nlohmann::ordered_json& j);

void write_record(const std::string& path, const ExperimentRecord& rec);
ExperimentRecord read_record(const std::string& path);

/// Serialized form used on disk (2-space indent, trailing newline).
std::string record_text(const ExperimentRecord& rec);

}  // namespace riskshare
