#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "latedit/config.hpp"

namespace latedit {

inline constexpr const char* kToolVersion = "0.1.0";

// Run manifest: the config snapshot, seeds, conditions and artifact paths
// needed to reproduce a run byte for byte, plus metrics and timing.
class RunManifest {
  public:
    RunManifest() = default;
    RunManifest(const std::string& command, const RunConfig& config);

    void set_condition(const std::string& key, const nlohmann::json& value);
    void add_artifact(const std::string& name, const std::filesystem::path& path);
    void set_metrics(const nlohmann::json& metrics);
    void set_note(const std::string& key, const nlohmann::json& value);
    void set_duration_ms(double ms);

    const nlohmann::json& json() const { return data_; }
    RunConfig config() const;
    std::string command() const;
    nlohmann::json conditions() const;

    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);

  private:
    nlohmann::json data_;
};

}  // namespace latedit
