#include "latedit/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latedit/rng.hpp"

namespace latedit {

namespace {

int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius) + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : kernel) w /= total;
    return kernel;
}

}  // namespace

EditMask EditMask::zeros(int height, int width, double tau) {
    EditMask m;
    m.height = height;
    m.width = width;
    m.tau = tau;
    m.soft.assign(static_cast<std::size_t>(height) * width, 0.0);
    m.binary.assign(m.soft.size(), 0);
    return m;
}

EditMask EditMask::ones(int height, int width, double tau) {
    EditMask m = zeros(height, width, tau);
    std::fill(m.soft.begin(), m.soft.end(), 1.0);
    std::fill(m.binary.begin(), m.binary.end(), 1);
    m.peak = 1.0;
    return m;
}

EditMask EditMask::complement() const {
    EditMask out = *this;
    for (std::size_t i = 0; i < binary.size(); ++i) {
        out.binary[i] = binary[i] ? 0 : 1;
        out.soft[i] = out.binary[i] ? 1.0 : 0.0;
    }
    return out;
}

EditMask EditMask::with_tau(double new_tau) const {
    if (!(new_tau > 0.0 && new_tau < 1.0)) {
        throw std::invalid_argument("EditMask::with_tau: tau must be in (0, 1)");
    }
    EditMask out = *this;
    out.tau = new_tau;
    for (std::size_t i = 0; i < soft.size(); ++i) {
        out.binary[i] = soft[i] >= new_tau ? 1 : 0;
    }
    return out;
}

std::vector<double> gaussian_smooth(const std::vector<double>& map, int height,
                                    int width, double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("gaussian_smooth: sigma must be nonnegative");
    }
    if (map.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("gaussian_smooth: map size mismatch");
    }
    if (sigma == 0.0) return map;

    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);

    std::vector<double> rows(map.size(), 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       map[static_cast<std::size_t>(r) * width +
                           reflect_index(c + i, width)];
            }
            rows[static_cast<std::size_t>(r) * width + c] = acc;
        }
    }
    std::vector<double> out(map.size(), 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       rows[static_cast<std::size_t>(reflect_index(r + i, height)) *
                                width +
                            c];
            }
            out[static_cast<std::size_t>(r) * width + c] = acc;
        }
    }
    return out;
}

EditMask estimate_mask(const LatentImage& x0, const Condition& cond_original,
                       const Condition& cond_edit, const EditParams& params,
                       const SceneMixture& mix, const NoiseSchedule& sched) {
    params.validate(sched.steps);
    const int h = x0.height;
    const int w = x0.width;

    std::vector<std::uint64_t> seeds = params.mask_seeds();
    std::vector<std::uint64_t> reduction_order = seeds;
    std::sort(reduction_order.begin(), reduction_order.end());

    std::vector<double> accum(static_cast<std::size_t>(h) * w, 0.0);
    for (std::uint64_t s : reduction_order) {
        const LatentImage noise = gaussian_image(s, h, w, x0.channels);
        const LatentImage x_enc = stochastic_encode(x0, params.t_E, noise, sched);
        const Trajectory traj_edit =
            decode_ddim(x_enc, params.t_E, cond_edit, mix, sched);
        const Trajectory traj_orig =
            decode_ddim(x_enc, params.t_E, cond_original, mix, sched);
        const LatentImage& eps_edit = traj_edit.eps_at(1);
        const LatentImage& eps_orig = traj_orig.eps_at(1);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double diff = 0.0;
                for (int ch = 0; ch < x0.channels; ++ch) {
                    diff += std::abs(eps_edit.at(r, c, ch) - eps_orig.at(r, c, ch));
                }
                accum[static_cast<std::size_t>(r) * w + c] +=
                    diff / x0.channels;
            }
        }
    }
    for (double& v : accum) v /= static_cast<double>(reduction_order.size());

    std::vector<double> smooth = gaussian_smooth(accum, h, w, params.sigma_blur);

    EditMask mask = EditMask::zeros(h, w, params.tau);
    mask.seeds = seeds;
    mask.peak = *std::max_element(smooth.begin(), smooth.end());
    if (mask.peak > 0.0) {
        for (std::size_t i = 0; i < smooth.size(); ++i) {
            mask.soft[i] = smooth[i] / mask.peak;
            mask.binary[i] = mask.soft[i] >= params.tau ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace latedit
