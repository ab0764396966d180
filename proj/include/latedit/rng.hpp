#pragma once

#include <cstdint>
#include <random>

#include "latedit/latent.hpp"

namespace latedit {

// splitmix64; used to derive independent seed streams from one base seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Standard-normal sampler over mt19937_64 with an explicit Box-Muller
// transform. std::normal_distribution is implementation-defined, so
// manifests would not reproduce across standard libraries; this does.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 =
            (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    LatentImage sample(int height, int width, int channels) {
        LatentImage out(height, width, channels);
        for (double& v : out.data) v = next();
        return out;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline LatentImage gaussian_image(std::uint64_t seed, int height, int width,
                                  int channels) {
    GaussianSampler sampler(seed);
    return sampler.sample(height, width, channels);
}

}  // namespace latedit
