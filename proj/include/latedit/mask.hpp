#pragma once

#include <cstdint>
#include <vector>

#include "latedit/params.hpp"
#include "latedit/sampler.hpp"

namespace latedit {

// Per-pixel edit-region map. `soft` is normalised so its maximum is 1
// whenever any difference was observed (all-zero otherwise); `binary` is
// soft >= tau. `peak` keeps the pre-normalisation maximum so averaged maps
// remain comparable across runs.
struct EditMask {
    int height = 0;
    int width = 0;
    std::vector<double> soft;
    std::vector<std::uint8_t> binary;
    double tau = 0.1;
    double peak = 0.0;
    std::vector<std::uint64_t> seeds;

    static EditMask zeros(int height, int width, double tau = 0.1);
    static EditMask ones(int height, int width, double tau = 0.1);

    // Preservation mask: soft and binary both flip to 1 - binary.
    EditMask complement() const;
    // Same soft map thresholded at a different tau.
    EditMask with_tau(double new_tau) const;

    std::size_t pixels() const { return soft.size(); }
};

// Separable Gaussian convolution with reflective borders; sigma 0 is the
// identity. `map` is H*W row-major.
std::vector<double> gaussian_smooth(const std::vector<double>& map, int height,
                                    int width, double sigma);

// Estimates the edit region from noise-prediction differences: per seed,
// stochastically encode x0 to t_E, decode to t = 1 under each condition
// separately, and average the absolute noise-estimate differences at t = 1
// over seeds and channels. The average
// is smoothed, max-normalised and thresholded at params.tau. Seeds are
// reduced in sorted order so the result is independent of list order.
EditMask estimate_mask(const LatentImage& x0, const Condition& cond_original,
                       const Condition& cond_edit, const EditParams& params,
                       const SceneMixture& mix, const NoiseSchedule& sched);

}  // namespace latedit
