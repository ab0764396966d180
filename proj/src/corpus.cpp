#include "latedit/corpus.hpp"

#include <stdexcept>

#include "latedit/rng.hpp"

namespace latedit {

std::vector<GroundTruth> make_edit_corpus(const SceneConfig& config,
                                          std::size_t count, std::uint64_t seed,
                                          bool position_only) {
    config.validate();
    std::vector<GridPos> anchors;
    for (int r : config.anchor_rows) {
        for (int c : config.anchor_cols) anchors.push_back({r, c});
    }

    std::vector<GroundTruth> all;
    for (int cls_o = 0; cls_o < config.classes; ++cls_o) {
        for (const GridPos& pos_o : anchors) {
            for (int cls_e = 0; cls_e < config.classes; ++cls_e) {
                if (position_only && cls_e != cls_o) continue;
                for (const GridPos& pos_e : anchors) {
                    if (cls_o == cls_e && pos_o == pos_e) continue;
                    all.push_back({cls_o, pos_o, cls_e, pos_e});
                }
            }
        }
    }
    if (all.empty()) {
        throw std::invalid_argument("make_edit_corpus: no non-identity edit pairs");
    }

    // Fisher-Yates with explicit draws; std::shuffle is implementation-defined.
    std::uint64_t state = mix_seed(seed ^ 0x636f7270ULL);
    for (std::size_t i = all.size() - 1; i > 0; --i) {
        state = mix_seed(state);
        std::swap(all[i], all[state % (i + 1)]);
    }
    if (count < all.size()) all.resize(count);
    return all;
}

}  // namespace latedit
