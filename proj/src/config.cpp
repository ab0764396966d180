#include "latedit/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace latedit {

namespace {

GuidanceEncode guidance_encode_from_string(const std::string& s) {
    if (s == "edit") return GuidanceEncode::EditCondition;
    if (s == "original") return GuidanceEncode::OriginalCondition;
    if (s == "unconditional") return GuidanceEncode::Unconditional;
    throw std::invalid_argument("unknown guidance_encode: " + s);
}

std::string to_string(GuidanceEncode g) {
    switch (g) {
        case GuidanceEncode::EditCondition: return "edit";
        case GuidanceEncode::OriginalCondition: return "original";
        case GuidanceEncode::Unconditional: return "unconditional";
    }
    return "edit";
}

UpdateRule update_rule_from_string(const std::string& s) {
    if (s == "adam") return UpdateRule::Adam;
    if (s == "gradient") return UpdateRule::PlainGradient;
    throw std::invalid_argument("unknown update_rule: " + s);
}

std::string to_string(UpdateRule r) {
    return r == UpdateRule::Adam ? "adam" : "gradient";
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::finalize() {
    if (!(encode_ratio > 0.0 && encode_ratio <= 1.0)) {
        throw std::invalid_argument("config: encode_ratio must be in (0, 1]");
    }
    edit.t_E = std::max(1, static_cast<int>(std::lround(encode_ratio * schedule.steps)));
    edit.t_u = std::min(edit.t_u, edit.t_E);
    scene.validate();
    edit.validate(schedule.steps);
}

nlohmann::json to_json(const RunConfig& config) {
    nlohmann::json j;
    j["schedule"] = {{"steps", config.schedule.steps},
                     {"kind", to_string(config.schedule.kind)}};
    nlohmann::json palette = nlohmann::json::array();
    for (const auto& p : config.scene.palette) palette.push_back({p[0], p[1], p[2]});
    j["scene"] = {{"height", config.scene.height},
                  {"width", config.scene.width},
                  {"channels", config.scene.channels},
                  {"classes", config.scene.classes},
                  {"anchor_rows", config.scene.anchor_rows},
                  {"anchor_cols", config.scene.anchor_cols},
                  {"sigma", config.scene.sigma},
                  {"palette", palette}};
    j["edit"] = {{"lambda", config.edit.lambda},
                 {"gamma", config.edit.gamma},
                 {"t_u", config.edit.t_u},
                 {"k", config.edit.k},
                 {"encode_ratio", config.encode_ratio},
                 {"seed", config.edit.seed},
                 {"guidance_encode", to_string(config.edit.guidance_encode)},
                 {"update_rule", to_string(config.edit.update_rule)}};
    j["mask"] = {{"tau", config.edit.tau},
                 {"n_seeds", config.edit.n_seeds},
                 {"sigma_blur", config.edit.sigma_blur},
                 {"seeds", config.edit.seeds}};
    j["output"] = {{"dir", config.output.dir}};
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig config;
    if (j.contains("schedule")) {
        const auto& js = j.at("schedule");
        maybe(js, "steps", config.schedule.steps);
        if (js.contains("kind")) {
            config.schedule.kind =
                schedule_kind_from_string(js.at("kind").get<std::string>());
        }
    }
    if (j.contains("scene")) {
        const auto& js = j.at("scene");
        maybe(js, "height", config.scene.height);
        maybe(js, "width", config.scene.width);
        maybe(js, "channels", config.scene.channels);
        maybe(js, "classes", config.scene.classes);
        maybe(js, "anchor_rows", config.scene.anchor_rows);
        maybe(js, "anchor_cols", config.scene.anchor_cols);
        maybe(js, "sigma", config.scene.sigma);
        if (js.contains("palette")) {
            config.scene.palette.clear();
            for (const auto& row : js.at("palette")) {
                if (row.size() != 3) {
                    throw std::invalid_argument("config: palette rows need 3 entries");
                }
                config.scene.palette.push_back(
                    {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
            }
        }
    }
    if (j.contains("edit")) {
        const auto& je = j.at("edit");
        maybe(je, "lambda", config.edit.lambda);
        maybe(je, "gamma", config.edit.gamma);
        maybe(je, "t_u", config.edit.t_u);
        maybe(je, "k", config.edit.k);
        maybe(je, "encode_ratio", config.encode_ratio);
        maybe(je, "seed", config.edit.seed);
        if (je.contains("guidance_encode")) {
            config.edit.guidance_encode = guidance_encode_from_string(
                je.at("guidance_encode").get<std::string>());
        }
        if (je.contains("update_rule")) {
            config.edit.update_rule =
                update_rule_from_string(je.at("update_rule").get<std::string>());
        }
    }
    if (j.contains("mask")) {
        const auto& jm = j.at("mask");
        maybe(jm, "tau", config.edit.tau);
        maybe(jm, "n_seeds", config.edit.n_seeds);
        maybe(jm, "sigma_blur", config.edit.sigma_blur);
        maybe(jm, "seeds", config.edit.seeds);
    }
    if (j.contains("output")) {
        maybe(j.at("output"), "dir", config.output.dir);
    }
    config.finalize();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path.string());
    }
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write config: " + path.string());
    }
    out << to_json(config).dump(2) << "\n";
}

}  // namespace latedit
