#include "latedit/sampler.hpp"

#include <stdexcept>
#include <string>

namespace latedit {

namespace {

void check_level(int t_E, int steps, const char* what) {
    if (t_E < 1 || t_E > steps) {
        throw std::invalid_argument(std::string(what) + ": encoding level " +
                                    std::to_string(t_E) + " outside [1, " +
                                    std::to_string(steps) + "]");
    }
}

}  // namespace

const LatentImage& Trajectory::latent(int t) const {
    if (t < 0 || t > t_hi) {
        throw std::out_of_range("Trajectory::latent: timestep out of range");
    }
    return latents[static_cast<std::size_t>(t)];
}

const LatentImage& Trajectory::eps_at(int t) const {
    if (t < 0 || t > t_hi || eps[static_cast<std::size_t>(t)].data.empty()) {
        throw std::out_of_range("Trajectory::eps_at: no noise estimate stored at t");
    }
    return eps[static_cast<std::size_t>(t)];
}

Trajectory encode_ddim(const LatentImage& x0, int t_E, const Condition& cond,
                       const SceneMixture& mix, const NoiseSchedule& sched) {
    check_level(t_E, sched.steps, "encode_ddim");
    Trajectory traj;
    traj.direction = TrajectoryDirection::Encode;
    traj.condition = cond;
    traj.t_hi = t_E;
    traj.latents.resize(static_cast<std::size_t>(t_E) + 1);
    traj.eps.resize(static_cast<std::size_t>(t_E) + 1);

    traj.latents[0] = x0;
    for (int t = 0; t < t_E; ++t) {
        const LatentImage& cur = traj.latents[static_cast<std::size_t>(t)];
        LatentImage e = predict_eps(cur, std::max(t, 1), cond, mix, sched);
        traj.latents[static_cast<std::size_t>(t) + 1] =
            ddim_invert_step(cur, e, t, sched);
        traj.eps[static_cast<std::size_t>(t)] = std::move(e);
    }
    return traj;
}

Trajectory decode_ddim(const LatentImage& x_tE, int t_E, const Condition& cond,
                       const SceneMixture& mix, const NoiseSchedule& sched,
                       const StepHook& hook) {
    check_level(t_E, sched.steps, "decode_ddim");
    Trajectory traj;
    traj.direction = TrajectoryDirection::Decode;
    traj.condition = cond;
    traj.t_hi = t_E;
    traj.latents.resize(static_cast<std::size_t>(t_E) + 1);
    traj.eps.resize(static_cast<std::size_t>(t_E) + 1);

    LatentImage cur = x_tE;
    for (int t = t_E; t >= 1; --t) {
        if (hook) hook(cur, t);
        traj.latents[static_cast<std::size_t>(t)] = cur;
        LatentImage e = predict_eps(cur, t, cond, mix, sched);
        cur = ddim_step(cur, e, t, sched);
        traj.eps[static_cast<std::size_t>(t)] = std::move(e);
    }
    traj.latents[0] = std::move(cur);
    return traj;
}

}  // namespace latedit
