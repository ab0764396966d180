#pragma once

#include <cmath>
#include <cstdint>

#include "latedit/latent.hpp"
#include "latedit/rng.hpp"

namespace latedit::testutil {

inline LatentImage random_latent(std::uint64_t seed, int h, int w, int c,
                                 double scale = 1.0, double offset = 0.0) {
    LatentImage img = gaussian_image(seed, h, w, c);
    for (double& v : img.data) v = offset + scale * v;
    return img;
}

inline double max_abs_diff(const LatentImage& a, const LatentImage& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    }
    return worst;
}

inline double rel_l2_diff(const LatentImage& a, const LatentImage& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        num += d * d;
        den += b.data[i] * b.data[i];
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

inline double mean_abs_diff(const LatentImage& a, const LatentImage& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        total += std::abs(a.data[i] - b.data[i]);
    }
    return total / static_cast<double>(a.data.size());
}

}  // namespace latedit::testutil
