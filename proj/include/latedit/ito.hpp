#pragma once

#include <optional>

#include "latedit/mask.hpp"
#include "latedit/metrics.hpp"
#include "latedit/params.hpp"
#include "latedit/sampler.hpp"

namespace latedit {

struct LossGrad {
    double loss = 0.0;
    LatentImage grad;
};

// Masked squared distance pulling y toward x where the preservation mask is
// on: loss = sum (m*(y - x))^2, grad = 2 m^2 (y - x). `m` is the
// preservation mask (complement of the edit region), soft values in [0, 1].
LossGrad preservation_loss_grad(const LatentImage& y, const LatentImage& x,
                                const EditMask& m);

// One minus cosine similarity over the flattened latents. Throws when either
// input has zero norm.
LossGrad guidance_loss_grad(const LatentImage& y, const LatentImage& g);

// Elementwise Adam with bias correction; fresh state per decode timestep.
struct AdamState {
    LatentImage m;
    LatentImage v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState(int height, int width, int channels)
        : m(height, width, channels), v(height, width, channels) {}

    void apply(LatentImage& y, const LatentImage& grad, double lr);
};

// k optimiser steps on y with gradient of
// (1 - lambda) * L_guidance(y, g) + lambda * L_preservation(y, x, m).
// `g` must be present whenever lambda < 1. State persists across the k steps.
LatentImage ito_update(const LatentImage& y, const LatentImage& x,
                       const LatentImage* g, const EditMask& preserve,
                       const EditParams& params, AdamState& opt);

struct EditResult {
    LatentImage edited;
    std::optional<LatentImage> guidance;
    EditMask mask;
    Trajectory input_traj;                  // DDIM inversion of the input
    std::optional<Trajectory> guidance_traj;
    Trajectory decode_traj;
    bool guidance_skipped = false;
    std::optional<MetricsRecord> metrics;
};

// Guidance image: stochastic encoding of x0 (seeded noise) decoded under the
// edit condition, with preservation-only updates (lambda forced to 1) against
// the matching stochastic encodings of x0 for the first t_u timesteps.
// `preserve` is the preservation mask.
LatentImage generate_guidance(const LatentImage& x0, const Condition& cond_edit,
                              const EditMask& preserve, const EditParams& params,
                              const SceneMixture& mix, const NoiseSchedule& sched,
                              std::uint64_t seed);

// Full pipeline: mask estimation, guidance generation (skipped at lambda = 1),
// DDIM inversion, and optimised conditional decoding. `mask_override`
// replaces the estimated edit mask (user-painted masks enter here).
EditResult run_edit(const LatentImage& x0, const Condition& cond_original,
                    const Condition& cond_edit, const EditParams& params,
                    const SceneMixture& mix, const NoiseSchedule& sched,
                    const EditMask* mask_override = nullptr);

// Hard mask blending baseline: after each decode step,
// y = m_edit*y + (1 - m_edit)*x using the stored inversion trajectory.
EditResult diffedit_baseline(const LatentImage& x0, const Condition& cond_original,
                             const Condition& cond_edit, const EditParams& params,
                             const SceneMixture& mix, const NoiseSchedule& sched,
                             const EditMask* mask_override = nullptr);

// Re-injects input-image information into a guidance image: inverts g0 and
// decodes it with guidance-only updates toward the inversion of x0.
// Both trajectories run unconditionally.
LatentImage refine_guidance(const LatentImage& g0, const LatentImage& x0,
                            const EditParams& refine_params,
                            const SceneMixture& mix, const NoiseSchedule& sched);

}  // namespace latedit
