#include "latedit/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace latedit {

namespace {

constexpr int kGlyphExtent = 5;  // glyph cells live in a 5x5 box around the anchor
constexpr int kGlyphHalf = kGlyphExtent / 2;

// Shape footprints inside the 5x5 box, one per palette slot. Distinct via
// clipped corners; deliberately chunky, since thin features dilate
// disproportionately under the mask smoothing and identity is carried by
// the per-class intensities anyway.
bool shape_cell(int shape, int dr, int dc) {
    const int lo = 0;
    const int hi = kGlyphExtent - 1;
    switch (shape & 3) {
        case 0: return true;                                  // 25 cells
        case 1: return !(dr == lo && dc == lo);               // 24, no NW corner
        case 2: return !(dr == hi && dc == hi);               // 24, no SE corner
        default: return !((dr == lo && dc == hi) || (dr == hi && dc == lo));  // 23
    }
}

double background_value(const SceneConfig& cfg, int r, int c, int ch) {
    const double fr = cfg.height > 1 ? static_cast<double>(r) / (cfg.height - 1) : 0.0;
    const double fc = cfg.width > 1 ? static_cast<double>(c) / (cfg.width - 1) : 0.0;
    double v = 0.20 + 0.05 * ch;
    if (ch % 3 == 0) v += 0.20 * fr;
    if (ch % 3 == 1) v += 0.20 * fc;
    if (ch % 3 == 2) v += 0.10 * (fr + fc) / 2.0;
    if ((3 * r + 5 * c) % 7 == 0) v += 0.06;  // fixed texels
    return v;
}

void check_anchor(const SceneConfig& cfg, GridPos anchor) {
    if (anchor.row < 0 || anchor.row >= cfg.height || anchor.col < 0 ||
        anchor.col >= cfg.width) {
        throw std::invalid_argument("layout anchor (" + std::to_string(anchor.row) +
                                    ", " + std::to_string(anchor.col) +
                                    ") outside canvas bounds");
    }
}

}  // namespace

void SceneConfig::validate() const {
    if (height <= 0 || width <= 0 || channels <= 0) {
        throw std::invalid_argument("SceneConfig: canvas dimensions must be positive");
    }
    if (classes <= 0) {
        throw std::invalid_argument("SceneConfig: class count must be positive");
    }
    if (anchor_rows.empty() || anchor_cols.empty()) {
        throw std::invalid_argument("SceneConfig: position grid must be nonempty");
    }
    if (sigma < 0.0) {
        throw std::invalid_argument("SceneConfig: sigma must be nonnegative");
    }
    if (palette.empty()) {
        throw std::invalid_argument("SceneConfig: palette must be nonempty");
    }
    for (int r : anchor_rows) {
        if (r < 0 || r >= height) {
            throw std::invalid_argument("SceneConfig: anchor row outside canvas");
        }
    }
    for (int c : anchor_cols) {
        if (c < 0 || c >= width) {
            throw std::invalid_argument("SceneConfig: anchor col outside canvas");
        }
    }
}

LatentImage render_scene(const SceneConfig& cfg, int class_id, GridPos anchor) {
    cfg.validate();
    if (class_id < 0 || class_id >= cfg.classes) {
        throw std::invalid_argument("render_scene: class id out of range");
    }
    check_anchor(cfg, anchor);

    LatentImage img(cfg.height, cfg.width, cfg.channels);
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            for (int ch = 0; ch < cfg.channels; ++ch) {
                img.at(r, c, ch) = background_value(cfg, r, c, ch);
            }
        }
    }

    const auto& base = cfg.palette[class_id % cfg.palette.size()];
    // Keep means distinct when classes cycle the palette.
    const double cycle_tint = 0.015 * (class_id / static_cast<int>(cfg.palette.size()));
    for (int dr = 0; dr < kGlyphExtent; ++dr) {
        for (int dc = 0; dc < kGlyphExtent; ++dc) {
            if (!shape_cell(class_id, dr, dc)) continue;
            const int r = anchor.row - kGlyphHalf + dr;
            const int c = anchor.col - kGlyphHalf + dc;
            if (r < 0 || r >= cfg.height || c < 0 || c >= cfg.width) continue;
            const double ramp = 0.004 * (dr * kGlyphExtent + dc) - 0.048;
            for (int ch = 0; ch < cfg.channels; ++ch) {
                img.at(r, c, ch) = base[ch % 3] + ramp + cycle_tint;
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> glyph_footprint(const SceneConfig& cfg, int class_id,
                                          GridPos anchor) {
    cfg.validate();
    check_anchor(cfg, anchor);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cfg.height) * cfg.width, 0);
    for (int dr = 0; dr < kGlyphExtent; ++dr) {
        for (int dc = 0; dc < kGlyphExtent; ++dc) {
            if (!shape_cell(class_id, dr, dc)) continue;
            const int r = anchor.row - kGlyphHalf + dr;
            const int c = anchor.col - kGlyphHalf + dc;
            if (r < 0 || r >= cfg.height || c < 0 || c >= cfg.width) continue;
            mask[static_cast<std::size_t>(r) * cfg.width + c] = 1;
        }
    }
    return mask;
}

SceneMixture build_mixture(const SceneConfig& cfg) {
    cfg.validate();
    SceneMixture mix;
    mix.config = cfg;
    mix.sigma = cfg.sigma;
    const std::size_t count = static_cast<std::size_t>(cfg.classes) *
                              cfg.anchor_rows.size() * cfg.anchor_cols.size();
    mix.components.reserve(count);
    const double prior = 1.0 / static_cast<double>(count);
    for (int cls = 0; cls < cfg.classes; ++cls) {
        for (int ar : cfg.anchor_rows) {
            for (int ac : cfg.anchor_cols) {
                Component comp;
                comp.class_id = cls;
                comp.anchor = {ar, ac};
                comp.prior = prior;
                comp.mean = render_scene(cfg, cls, comp.anchor);
                mix.components.push_back(std::move(comp));
            }
        }
    }
    return mix;
}

bool SceneMixture::component_matches(std::size_t j, const Condition& cond) const {
    const Component& comp = components[j];
    if (cond.class_id && *cond.class_id != comp.class_id) return false;
    if (cond.layout && *cond.layout != comp.anchor) return false;
    return true;
}

std::size_t SceneMixture::component_index(int class_id, GridPos anchor) const {
    for (std::size_t j = 0; j < components.size(); ++j) {
        if (components[j].class_id == class_id && components[j].anchor == anchor) {
            return j;
        }
    }
    throw std::invalid_argument("no mixture component with the requested labels");
}

LatentImage predict_eps(const LatentImage& x_t, int t, const Condition& cond,
                        const SceneMixture& mix, const NoiseSchedule& sched) {
    if (t < 1 || t > sched.steps) {
        throw std::invalid_argument("predict_eps: timestep must be in [1, T]");
    }
    if (mix.components.empty()) {
        throw std::invalid_argument("predict_eps: empty mixture");
    }
    require_same_shape(x_t, mix.components.front().mean, "predict_eps");
    if (cond.layout) check_anchor(mix.config, *cond.layout);

    const double a = sched.alpha(t);
    const double sqrt_a = std::sqrt(a);
    const double var = a * mix.sigma * mix.sigma + (1.0 - a);
    const std::size_t n = x_t.size();

    // Log-domain responsibilities with max subtraction. The Gaussian
    // normaliser is shared across components and drops out.
    std::vector<std::size_t> active;
    std::vector<double> logw;
    for (std::size_t j = 0; j < mix.components.size(); ++j) {
        if (!mix.component_matches(j, cond)) continue;
        const Component& comp = mix.components[j];
        double dist2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x_t.data[i] - sqrt_a * comp.mean.data[i];
            dist2 += d * d;
        }
        active.push_back(j);
        logw.push_back(std::log(comp.prior) - dist2 / (2.0 * var));
    }
    if (active.empty()) {
        throw std::invalid_argument("predict_eps: condition excludes every component");
    }

    const double peak = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - peak);
        total += w;
    }

    const double shrink = sqrt_a * mix.sigma * mix.sigma / var;
    LatentImage x0_hat(x_t.height, x_t.width, x_t.channels);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const double r = logw[k] / total;
        const Component& comp = mix.components[active[k]];
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = comp.mean.data[i];
            x0_hat.data[i] += r * (mu + shrink * (x_t.data[i] - sqrt_a * mu));
        }
    }

    const double sqrt_b = std::sqrt(1.0 - a);
    LatentImage eps(x_t.height, x_t.width, x_t.channels);
    for (std::size_t i = 0; i < n; ++i) {
        eps.data[i] = (x_t.data[i] - sqrt_a * x0_hat.data[i]) / sqrt_b;
    }
    return eps;
}

std::pair<int, GridPos> classify(const LatentImage& x0, const SceneMixture& mix) {
    if (mix.components.empty()) {
        throw std::invalid_argument("classify: empty mixture");
    }
    require_same_shape(x0, mix.components.front().mean, "classify");
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < mix.components.size(); ++j) {
        double dist2 = 0.0;
        const auto& mean = mix.components[j].mean.data;
        for (std::size_t i = 0; i < x0.data.size(); ++i) {
            const double d = x0.data[i] - mean[i];
            dist2 += d * d;
        }
        if (dist2 < best_dist) {
            best_dist = dist2;
            best = j;
        }
    }
    return {mix.components[best].class_id, mix.components[best].anchor};
}

}  // namespace latedit
