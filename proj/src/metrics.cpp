#include "latedit/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "latedit/ito.hpp"

namespace latedit {

double l1(const LatentImage& a, const LatentImage& b,
          const std::vector<std::uint8_t>* region) {
    require_same_shape(a, b, "l1");
    if (region && region->size() != static_cast<std::size_t>(a.height) * a.width) {
        throw std::invalid_argument("l1: region size mismatch");
    }
    double total = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < a.height; ++r) {
        for (int c = 0; c < a.width; ++c) {
            if (region && !(*region)[static_cast<std::size_t>(r) * a.width + c]) {
                continue;
            }
            for (int ch = 0; ch < a.channels; ++ch) {
                total += std::abs(a.at(r, c, ch) - b.at(r, c, ch));
                ++count;
            }
        }
    }
    if (count == 0) {
        throw std::invalid_argument("l1: empty region");
    }
    return total / static_cast<double>(count);
}

std::vector<std::uint8_t> footprint_union(const SceneConfig& config,
                                          const GroundTruth& truth) {
    std::vector<std::uint8_t> a =
        glyph_footprint(config, truth.class_original, truth.pos_original);
    const std::vector<std::uint8_t> b =
        glyph_footprint(config, truth.class_edit, truth.pos_edit);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
    return a;
}

double mask_iou(const std::vector<std::uint8_t>& mask,
                const std::vector<std::uint8_t>& truth) {
    if (mask.size() != truth.size()) {
        throw std::invalid_argument("mask_iou: size mismatch");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const bool m = mask[i] != 0;
        const bool t = truth[i] != 0;
        inter += (m && t) ? 1 : 0;
        uni += (m || t) ? 1 : 0;
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MetricsRecord evaluate(const EditResult& result, const GroundTruth& truth,
                       const SceneMixture& mix) {
    const LatentImage& x0 = result.input_traj.latent(0);

    MetricsRecord rec;
    rec.l1_full = l1(x0, result.edited);

    std::vector<std::uint8_t> fg = footprint_union(mix.config, truth);
    std::vector<std::uint8_t> bg(fg.size());
    for (std::size_t i = 0; i < fg.size(); ++i) bg[i] = fg[i] ? 0 : 1;
    rec.l1_background = l1(x0, result.edited, &bg);

    const auto [cls, pos] = classify(result.edited, mix);
    rec.edit_success = (cls == truth.class_edit && pos == truth.pos_edit);
    rec.original_retained = (cls == truth.class_original && pos == truth.pos_original);
    rec.mask_iou = mask_iou(result.mask.binary, fg);
    return rec;
}

}  // namespace latedit
