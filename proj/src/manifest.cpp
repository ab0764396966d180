#include "latedit/manifest.hpp"

#include <chrono>
#include <fstream>

#include "latedit/calibration.hpp"

namespace latedit {

RunManifest::RunManifest(const std::string& command, const RunConfig& config) {
    data_["tool_version"] = kToolVersion;
    data_["command"] = command;
    data_["created_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    data_["config"] = to_json(config);
    data_["seeds"] = {{"base", config.edit.seed},
                      {"mask", config.edit.mask_seeds()},
                      {"guidance", config.edit.guidance_seed()}};
    data_["conditions"] = nlohmann::json::object();
    data_["artifacts"] = nlohmann::json::object();
    data_["notes"] = nlohmann::json::object();
    data_["calibration"] = {
        {"mixture_round_trip_l1_bound", calibration::kMixtureRoundTripL1}};
}

void RunManifest::set_condition(const std::string& key, const nlohmann::json& value) {
    data_["conditions"][key] = value;
}

void RunManifest::add_artifact(const std::string& name,
                               const std::filesystem::path& path) {
    data_["artifacts"][name] = path.string();
}

void RunManifest::set_metrics(const nlohmann::json& metrics) {
    data_["metrics"] = metrics;
}

void RunManifest::set_note(const std::string& key, const nlohmann::json& value) {
    data_["notes"][key] = value;
}

void RunManifest::set_duration_ms(double ms) { data_["duration_ms"] = ms; }

RunConfig RunManifest::config() const { return config_from_json(data_.at("config")); }

std::string RunManifest::command() const {
    return data_.at("command").get<std::string>();
}

nlohmann::json RunManifest::conditions() const { return data_.at("conditions"); }

void RunManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest: " + path.string());
    }
    out << data_.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + path.string());
    }
    RunManifest m;
    in >> m.data_;
    return m;
}

}  // namespace latedit
