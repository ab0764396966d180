#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "latedit/latent.hpp"
#include "latedit/schedule.hpp"

namespace latedit {

struct GridPos {
    int row = 0;
    int col = 0;
    bool operator==(const GridPos& o) const { return row == o.row && col == o.col; }
    bool operator!=(const GridPos& o) const { return !(*this == o); }
};

// Discrete edit instruction: an object identity (the "text" analogue), an
// anchor position (the "layout" analogue), both, or neither (unconditional).
struct Condition {
    std::optional<int> class_id;
    std::optional<GridPos> layout;

    static Condition none() { return {}; }
    static Condition of_class(int cls) { return {cls, std::nullopt}; }
    static Condition at(GridPos pos) { return {std::nullopt, pos}; }
    static Condition of(int cls, GridPos pos) { return {cls, pos}; }

    bool is_null() const { return !class_id && !layout; }
    bool operator==(const Condition& o) const {
        return class_id == o.class_id && layout == o.layout;
    }
};

struct SceneConfig {
    int height = 16;
    int width = 16;
    int channels = 3;
    int classes = 4;
    std::vector<int> anchor_rows = {4, 7, 10};
    std::vector<int> anchor_cols = {4, 7, 10};
    double sigma = 0.05;
    // Per-class glyph base intensities; cycled when classes exceed entries.
    std::vector<std::array<double, 3>> palette = {
        {{0.95, 0.80, 0.70}},
        {{0.70, 0.95, 0.80}},
        {{0.80, 0.70, 0.95}},
        {{0.92, 0.92, 0.65}},
    };

    void validate() const;
};

struct Component {
    int class_id = 0;
    GridPos anchor;
    double prior = 0.0;
    LatentImage mean;
};

// Condition-indexed Gaussian mixture over scenes. Immutable once built; the
// posterior-mean denoiser below is the exact noise predictor for it.
struct SceneMixture {
    SceneConfig config;
    double sigma = 0.0;
    std::vector<Component> components;

    bool component_matches(std::size_t j, const Condition& cond) const;
    // Index of the component carrying (class_id, anchor); throws if absent.
    std::size_t component_index(int class_id, GridPos anchor) const;
};

// Deterministic mean image: class glyph stamped at the anchor over a fixed
// structured background (gradient plus texels). Glyph cells falling outside
// the canvas are clipped; the anchor itself must be in bounds.
LatentImage render_scene(const SceneConfig& config, int class_id, GridPos anchor);

// H*W footprint of the glyph cells of (class_id, anchor), 1 = glyph.
std::vector<std::uint8_t> glyph_footprint(const SceneConfig& config, int class_id,
                                          GridPos anchor);

// One component per (class, anchor) pair, uniform priors.
SceneMixture build_mixture(const SceneConfig& config);

// Exact Bayes-optimal noise predictor for the mixture under `cond`:
// responsibilities over condition-consistent components (log domain), the
// per-component posterior mean of x0, and eps = (x_t - sqrt(a)*x0hat)/sqrt(1-a).
// Requires t >= 1; throws when the condition excludes every component.
LatentImage predict_eps(const LatentImage& x_t, int t, const Condition& cond,
                        const SceneMixture& mix, const NoiseSchedule& sched);

// Nearest-mean decision at t = 0, ties broken by lowest component index.
std::pair<int, GridPos> classify(const LatentImage& x0, const SceneMixture& mix);

}  // namespace latedit
