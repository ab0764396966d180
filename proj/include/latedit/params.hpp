#pragma once

#include <cstdint>
#include <vector>

namespace latedit {

// Condition used when the guidance image is DDIM-inverted to build the
// guidance reference trajectory.
enum class GuidanceEncode { EditCondition, OriginalCondition, Unconditional };

// Latent update rule. Adam is the reference choice; PlainGradient applies
// the combined-loss gradient scaled by gamma directly, which trades edit
// strength for a background error that shrinks monotonically in lambda.
enum class UpdateRule { Adam, PlainGradient };

// Knobs of the optimisation-based edit pipeline. Defaults follow the
// reference operating point: 25 sampling steps at full encoding, lambda 0.6,
// Adam learning rate 0.1, updates on the first 15 decode timesteps with one
// gradient step each, mask threshold 0.1 averaged over 10 seeds.
struct EditParams {
    double lambda = 0.6;  // preservation weight in [0, 1]
    double gamma = 0.1;   // optimiser learning rate
    int t_u = 15;         // optimised decode timesteps (0 = none)
    int k = 1;            // gradient steps per timestep
    int t_E = 25;         // encoding level
    double tau = 0.1;     // mask threshold
    int n_seeds = 10;     // mask averaging count
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // explicit mask seeds; derived when empty
    double sigma_blur = 1.0;           // mask smoothing width, pixels
    GuidanceEncode guidance_encode = GuidanceEncode::EditCondition;
    UpdateRule update_rule = UpdateRule::Adam;

    void validate(int schedule_steps) const;

    // Mask-estimation seed list: `seeds` verbatim when provided, otherwise
    // n_seeds values derived from `seed`.
    std::vector<std::uint64_t> mask_seeds() const;
    // Independent stream for the guidance image's stochastic encoding.
    std::uint64_t guidance_seed() const;

    // Heavier profile for busier scenes: more update steps, tighter mask.
    static EditParams heavy_preset();
    // Guidance refinement profile: guidance loss only on the first 6 steps.
    EditParams refine_preset() const;
};

}  // namespace latedit
