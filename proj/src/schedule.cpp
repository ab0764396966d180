#include "latedit/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace latedit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAlphaFloor = 1e-5;

void check_t_range(int t, int lo, int hi, const char* what) {
    if (t < lo || t > hi) {
        throw std::invalid_argument(std::string(what) + ": timestep " +
                                    std::to_string(t) + " outside [" +
                                    std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    }
}

}  // namespace

void NoiseSchedule::validate() const {
    if (steps < 2) {
        throw std::invalid_argument("NoiseSchedule: steps must be >= 2");
    }
    if (alpha_bar.size() != static_cast<std::size_t>(steps) + 1) {
        throw std::invalid_argument("NoiseSchedule: alpha_bar must have steps+1 entries");
    }
    if (alpha_bar[0] != 1.0) {
        throw std::invalid_argument("NoiseSchedule: alpha_bar[0] must be exactly 1");
    }
    for (int t = 0; t < steps; ++t) {
        if (!(alpha_bar[t + 1] < alpha_bar[t])) {
            throw std::invalid_argument("NoiseSchedule: alpha_bar must be strictly decreasing");
        }
    }
    if (!(alpha_bar[steps] > 0.0)) {
        throw std::invalid_argument("NoiseSchedule: alpha_bar[T] must stay positive");
    }
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "cosine") return ScheduleKind::Cosine;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Cosine: return "cosine";
    }
    throw std::invalid_argument("unknown schedule kind");
}

NoiseSchedule build_schedule(int steps, ScheduleKind kind) {
    if (steps < 2) {
        throw std::invalid_argument("build_schedule: steps must be >= 2");
    }
    if (kind != ScheduleKind::Cosine) {
        throw std::invalid_argument("build_schedule: unknown schedule kind");
    }
    NoiseSchedule sched;
    sched.steps = steps;
    sched.alpha_bar.resize(static_cast<std::size_t>(steps) + 1);
    sched.alpha_bar[0] = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const double u = (static_cast<double>(t) / steps + 0.008) / 1.008;
        const double c = std::cos(u * kPi / 2.0);
        sched.alpha_bar[t] = std::max(c * c, kAlphaFloor);
    }
    sched.validate();
    return sched;
}

LatentImage ddim_step(const LatentImage& x_t, const LatentImage& eps, int t,
                      const NoiseSchedule& sched) {
    check_t_range(t, 1, sched.steps, "ddim_step");
    require_same_shape(x_t, eps, "ddim_step");
    const double a_cur = sched.alpha(t);
    const double a_prev = sched.alpha(t - 1);
    const double scale = std::sqrt(a_prev / a_cur);
    const double drift = std::sqrt(a_prev) * (std::sqrt(1.0 / a_prev - 1.0) -
                                              std::sqrt(1.0 / a_cur - 1.0));
    LatentImage out = x_t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = scale * x_t.data[i] + drift * eps.data[i];
    }
    return out;
}

LatentImage ddim_invert_step(const LatentImage& x_t, const LatentImage& eps,
                             int t, const NoiseSchedule& sched) {
    check_t_range(t, 0, sched.steps - 1, "ddim_invert_step");
    require_same_shape(x_t, eps, "ddim_invert_step");
    const double a_cur = sched.alpha(t);
    const double a_next = sched.alpha(t + 1);
    const double scale = std::sqrt(a_next / a_cur);
    const double drift = std::sqrt(a_next) * (std::sqrt(1.0 / a_next - 1.0) -
                                              std::sqrt(1.0 / a_cur - 1.0));
    LatentImage out = x_t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = scale * x_t.data[i] + drift * eps.data[i];
    }
    return out;
}

LatentImage stochastic_encode(const LatentImage& x0, int t,
                              const LatentImage& noise,
                              const NoiseSchedule& sched) {
    check_t_range(t, 0, sched.steps, "stochastic_encode");
    require_same_shape(x0, noise, "stochastic_encode");
    const double a = sched.alpha(t);
    const double sa = std::sqrt(a);
    const double sb = std::sqrt(1.0 - a);
    LatentImage out = x0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = sa * x0.data[i] + sb * noise.data[i];
    }
    return out;
}

}  // namespace latedit
