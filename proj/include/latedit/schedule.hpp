#pragma once

#include <string>
#include <vector>

#include "latedit/latent.hpp"

namespace latedit {

// Cumulative signal levels over a discrete diffusion time grid.
// alpha_bar is indexed 0..steps with alpha_bar[0] == 1 (t = 0 is the clean
// image) and must stay strictly decreasing and positive so the 1/alpha
// terms of the sampler updates remain finite.
struct NoiseSchedule {
    int steps = 0;
    std::vector<double> alpha_bar;

    double alpha(int t) const { return alpha_bar[static_cast<std::size_t>(t)]; }

    // Throws std::invalid_argument when any invariant is violated.
    void validate() const;
};

enum class ScheduleKind { Cosine };

ScheduleKind schedule_kind_from_string(const std::string& name);
std::string to_string(ScheduleKind kind);

// Squared-cosine profile cos^2(((t/T)+0.008)/1.008 * pi/2), floored at 1e-5,
// with alpha_bar[0] pinned to exactly 1.
NoiseSchedule build_schedule(int steps, ScheduleKind kind = ScheduleKind::Cosine);

// Deterministic denoising update, one step t -> t-1. Requires 1 <= t <= T.
LatentImage ddim_step(const LatentImage& x_t, const LatentImage& eps, int t,
                      const NoiseSchedule& sched);

// Algebraic inverse of ddim_step under a frozen eps, one step t -> t+1.
// Requires 0 <= t <= T-1.
LatentImage ddim_invert_step(const LatentImage& x_t, const LatentImage& eps,
                             int t, const NoiseSchedule& sched);

// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * noise.
LatentImage stochastic_encode(const LatentImage& x0, int t,
                              const LatentImage& noise,
                              const NoiseSchedule& sched);

}  // namespace latedit
