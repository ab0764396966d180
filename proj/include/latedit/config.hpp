#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "latedit/params.hpp"
#include "latedit/scene.hpp"
#include "latedit/schedule.hpp"

namespace latedit {

struct ScheduleSection {
    int steps = 25;
    ScheduleKind kind = ScheduleKind::Cosine;
};

struct OutputSection {
    std::string dir = "runs";
};

// One JSON document drives every tool run: schedule, scene, edit and mask
// parameters plus output placement. Defaults reproduce the reference
// operating point.
struct RunConfig {
    ScheduleSection schedule;
    SceneConfig scene;
    EditParams edit;      // edit.t_E is derived from encode_ratio on load
    double encode_ratio = 1.0;
    OutputSection output;

    // Applies encode_ratio and validates everything.
    void finalize();

    NoiseSchedule build_noise_schedule() const {
        return build_schedule(schedule.steps, schedule.kind);
    }
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace latedit
