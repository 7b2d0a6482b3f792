#include "riskshare/record.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskshare {

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::ordered_json record_to_json(const ExperimentRecord& rec) {
    nlohmann::ordered_json j;
    j["tool_version"] = rec.tool_version;
    j["scenario_name"] = rec.scenario_name;
    j["scenario_digest"] = rec.scenario_digest;
    j["input_digest"] = rec.input_digest;
    j["seed"] = rec.seed;
    j["game"] = rec.game;
    j["payload"] = rec.payload;
    return j;
}

ExperimentRecord record_from_json(const nlohmann::ordered_json& j) {
    ExperimentRecord rec;
    rec.tool_version = j.at("tool_version").get<std::string>();
    rec.scenario_name = j.at("scenario_name").get<std::string>();
    rec.scenario_digest = j.at("scenario_digest").get<std::string>();
    rec.input_digest = j.value("input_digest", std::string());
    rec.seed = j.at("seed").get<unsigned long>();
    rec.game = j.at("game").get<std::string>();
    rec.payload = j.at("payload");
    return rec;
}

std::string record_text(const ExperimentRecord& rec) {
    return record_to_json(rec).dump(2) + "\n";
}

void write_record(const std::string& path, const ExperimentRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write record: " + path);
    out << record_text(rec);
}

ExperimentRecord read_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read record: " + path);
    nlohmann::ordered_json j;
    in >> j;
    return record_from_json(j);
}

}  // namespace riskshare
