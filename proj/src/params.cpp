#include "latedit/params.hpp"

#include <stdexcept>

#include "latedit/rng.hpp"

namespace latedit {

void EditParams::validate(int schedule_steps) const {
    if (lambda < 0.0 || lambda > 1.0) {
        throw std::invalid_argument("EditParams: lambda must be in [0, 1]");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("EditParams: gamma must be positive");
    }
    if (t_u < 0 || t_u > t_E) {
        throw std::invalid_argument("EditParams: t_u must be in [0, t_E]");
    }
    if (t_E < 1 || t_E > schedule_steps) {
        throw std::invalid_argument("EditParams: t_E must be in [1, T]");
    }
    if (k < 1) {
        throw std::invalid_argument("EditParams: k must be >= 1");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument("EditParams: tau must be in (0, 1)");
    }
    if (n_seeds < 1) {
        throw std::invalid_argument("EditParams: n_seeds must be >= 1");
    }
    if (sigma_blur < 0.0) {
        throw std::invalid_argument("EditParams: sigma_blur must be nonnegative");
    }
}

std::vector<std::uint64_t> EditParams::mask_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(n_seeds));
    std::uint64_t state = mix_seed(seed ^ 0x6d61736bULL);  // mask stream
    for (int i = 0; i < n_seeds; ++i) {
        state = mix_seed(state);
        out.push_back(state);
    }
    return out;
}

std::uint64_t EditParams::guidance_seed() const {
    return mix_seed(seed ^ 0x67756964ULL);  // guidance stream
}

EditParams EditParams::heavy_preset() {
    EditParams p;
    p.t_u = 20;
    p.k = 20;
    p.tau = 0.2;
    return p;
}

EditParams EditParams::refine_preset() const {
    EditParams p = *this;
    p.lambda = 0.0;
    p.t_u = 6;
    p.k = 1;
    return p;
}

}  // namespace latedit
