#pragma once

#include <functional>
#include <vector>

#include "latedit/scene.hpp"

namespace latedit {

enum class TrajectoryDirection { Encode, Decode };

// Full latent path between t = 0 and t = t_hi, one latent per timestep,
// plus the noise estimate the predictor produced at each visited latent.
// For an encode, eps_at(t) fed the step t -> t+1 (predictor index max(t,1));
// for a decode, eps_at(t) fed the step t -> t-1.
struct Trajectory {
    TrajectoryDirection direction = TrajectoryDirection::Encode;
    Condition condition;
    int t_hi = 0;
    std::vector<LatentImage> latents;  // index = timestep, 0..t_hi
    std::vector<LatentImage> eps;      // may be empty at one boundary

    const LatentImage& latent(int t) const;
    const LatentImage& eps_at(int t) const;
};

// Applied to the latent at timestep t before the noise estimate at t is
// computed; the injection point for optimisation updates and blending.
using StepHook = std::function<void(LatentImage&, int)>;

// DDIM inversion x0 -> x_tE under `cond`, storing every intermediate.
Trajectory encode_ddim(const LatentImage& x0, int t_E, const Condition& cond,
                       const SceneMixture& mix, const NoiseSchedule& sched);

// Conditional DDIM decoding x_tE -> x0. The hook (identity when empty) runs
// at each timestep t = t_E..1 before the predictor is evaluated at t.
Trajectory decode_ddim(const LatentImage& x_tE, int t_E, const Condition& cond,
                       const SceneMixture& mix, const NoiseSchedule& sched,
                       const StepHook& hook = {});

}  // namespace latedit
