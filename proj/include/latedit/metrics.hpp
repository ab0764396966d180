#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latedit/mask.hpp"
#include "latedit/scene.hpp"

namespace latedit {

struct EditResult;

// Labels of the scene before and after the requested edit.
struct GroundTruth {
    int class_original = 0;
    GridPos pos_original;
    int class_edit = 0;
    GridPos pos_edit;
};

struct MetricsRecord {
    double l1_full = 0.0;
    double l1_background = 0.0;
    bool edit_success = false;
    bool original_retained = false;
    double mask_iou = 0.0;
};

// Mean absolute per-pixel distance, restricted to `region` (H*W, nonzero =
// included) when given. Throws on an empty region.
double l1(const LatentImage& a, const LatentImage& b,
          const std::vector<std::uint8_t>* region = nullptr);

// Union of the glyph footprints of the original and edited scenes.
std::vector<std::uint8_t> footprint_union(const SceneConfig& config,
                                          const GroundTruth& truth);

double mask_iou(const std::vector<std::uint8_t>& mask,
                const std::vector<std::uint8_t>& truth);

MetricsRecord evaluate(const EditResult& result, const GroundTruth& truth,
                       const SceneMixture& mix);

}  // namespace latedit
