#include "latedit/ito.hpp"

#include <cmath>
#include <stdexcept>

#include "latedit/rng.hpp"

namespace latedit {

namespace {

void check_mask_shape(const LatentImage& y, const EditMask& m, const char* what) {
    if (m.height != y.height || m.width != y.width) {
        throw std::invalid_argument(std::string(what) + ": mask shape mismatch");
    }
}

}  // namespace

LossGrad preservation_loss_grad(const LatentImage& y, const LatentImage& x,
                                const EditMask& m) {
    require_same_shape(y, x, "preservation_loss_grad");
    check_mask_shape(y, m, "preservation_loss_grad");

    LossGrad out;
    out.grad = LatentImage(y.height, y.width, y.channels);
    for (int r = 0; r < y.height; ++r) {
        for (int c = 0; c < y.width; ++c) {
            const double w = m.soft[static_cast<std::size_t>(r) * m.width + c];
            const double w2 = w * w;
            for (int ch = 0; ch < y.channels; ++ch) {
                const double d = y.at(r, c, ch) - x.at(r, c, ch);
                out.loss += w2 * d * d;
                out.grad.at(r, c, ch) = 2.0 * w2 * d;
            }
        }
    }
    return out;
}

LossGrad guidance_loss_grad(const LatentImage& y, const LatentImage& g) {
    require_same_shape(y, g, "guidance_loss_grad");
    const double ny = norm(y);
    const double ng = norm(g);
    if (ny == 0.0 || ng == 0.0) {
        throw std::invalid_argument("guidance_loss_grad: zero-norm latent");
    }
    const double yg = dot(y, g);
    const double cosine = yg / (ny * ng);

    LossGrad out;
    out.loss = 1.0 - cosine;
    out.grad = LatentImage(y.height, y.width, y.channels);
    const double g_scale = 1.0 / (ny * ng);
    const double y_scale = yg / (ny * ny * ny * ng);
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        out.grad.data[i] = -(g.data[i] * g_scale - y.data[i] * y_scale);
    }
    return out;
}

void AdamState::apply(LatentImage& y, const LatentImage& grad, double lr) {
    require_same_shape(y, grad, "AdamState::apply");
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        const double g = grad.data[i];
        m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g;
        v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g * g;
        const double m_hat = m.data[i] / bc1;
        const double v_hat = v.data[i] / bc2;
        y.data[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
    }
}

LatentImage ito_update(const LatentImage& y, const LatentImage& x,
                       const LatentImage* g, const EditMask& preserve,
                       const EditParams& params, AdamState& opt) {
    if (params.lambda < 1.0 && g == nullptr) {
        throw std::invalid_argument("ito_update: guidance latent required when lambda < 1");
    }
    LatentImage cur = y;
    for (int i = 0; i < params.k; ++i) {
        LatentImage grad(cur.height, cur.width, cur.channels);
        if (params.lambda > 0.0) {
            LossGrad rec = preservation_loss_grad(cur, x, preserve);
            for (std::size_t j = 0; j < grad.data.size(); ++j) {
                grad.data[j] += params.lambda * rec.grad.data[j];
            }
        }
        if (params.lambda < 1.0) {
            LossGrad gd = guidance_loss_grad(cur, *g);
            for (std::size_t j = 0; j < grad.data.size(); ++j) {
                grad.data[j] += (1.0 - params.lambda) * gd.grad.data[j];
            }
        }
        if (params.update_rule == UpdateRule::PlainGradient) {
            for (std::size_t j = 0; j < grad.data.size(); ++j) {
                cur.data[j] -= params.gamma * grad.data[j];
            }
        } else {
            opt.apply(cur, grad, params.gamma);
        }
    }
    return cur;
}

LatentImage generate_guidance(const LatentImage& x0, const Condition& cond_edit,
                              const EditMask& preserve, const EditParams& params,
                              const SceneMixture& mix, const NoiseSchedule& sched,
                              std::uint64_t seed) {
    params.validate(sched.steps);
    check_mask_shape(x0, preserve, "generate_guidance");

    const LatentImage noise = gaussian_image(seed, x0.height, x0.width, x0.channels);
    const LatentImage start = stochastic_encode(x0, params.t_E, noise, sched);

    EditParams preservation_only = params;
    preservation_only.lambda = 1.0;

    const int first_plain_t = params.t_E - params.t_u;
    StepHook hook = [&](LatentImage& y, int t) {
        if (t <= first_plain_t) return;
        // No inversion trajectory exists here; the reference at level t is
        // the stochastic encoding of x0 reusing the same noise draw.
        const LatentImage x_ref = stochastic_encode(x0, t, noise, sched);
        AdamState opt(y.height, y.width, y.channels);
        y = ito_update(y, x_ref, nullptr, preserve, preservation_only, opt);
    };

    Trajectory traj = decode_ddim(start, params.t_E, cond_edit, mix, sched, hook);
    return traj.latent(0);
}

EditResult run_edit(const LatentImage& x0, const Condition& cond_original,
                    const Condition& cond_edit, const EditParams& params,
                    const SceneMixture& mix, const NoiseSchedule& sched,
                    const EditMask* mask_override) {
    params.validate(sched.steps);

    EditResult result;
    result.mask = mask_override
                      ? *mask_override
                      : estimate_mask(x0, cond_original, cond_edit, params, mix, sched);
    const EditMask preserve = result.mask.complement();

    if (params.lambda < 1.0) {
        result.guidance = generate_guidance(x0, cond_edit, preserve, params, mix,
                                            sched, params.guidance_seed());
        Condition guide_cond = cond_edit;
        if (params.guidance_encode == GuidanceEncode::OriginalCondition) {
            guide_cond = cond_original;
        } else if (params.guidance_encode == GuidanceEncode::Unconditional) {
            guide_cond = Condition::none();
        }
        result.guidance_traj =
            encode_ddim(*result.guidance, params.t_E, guide_cond, mix, sched);
    } else {
        result.guidance_skipped = true;
    }

    result.input_traj = encode_ddim(x0, params.t_E, cond_original, mix, sched);

    const int first_plain_t = params.t_E - params.t_u;
    StepHook hook = [&](LatentImage& y, int t) {
        if (t <= first_plain_t) return;
        const LatentImage& x_ref = result.input_traj.latent(t);
        const LatentImage* g_ref =
            result.guidance_traj ? &result.guidance_traj->latent(t) : nullptr;
        AdamState opt(y.height, y.width, y.channels);
        y = ito_update(y, x_ref, g_ref, preserve, params, opt);
    };

    result.decode_traj = decode_ddim(result.input_traj.latent(params.t_E),
                                     params.t_E, cond_edit, mix, sched, hook);
    result.edited = result.decode_traj.latent(0);
    return result;
}

EditResult diffedit_baseline(const LatentImage& x0, const Condition& cond_original,
                             const Condition& cond_edit, const EditParams& params,
                             const SceneMixture& mix, const NoiseSchedule& sched,
                             const EditMask* mask_override) {
    params.validate(sched.steps);

    EditResult result;
    result.guidance_skipped = true;
    result.mask = mask_override
                      ? *mask_override
                      : estimate_mask(x0, cond_original, cond_edit, params, mix, sched);
    result.input_traj = encode_ddim(x0, params.t_E, cond_original, mix, sched);

    const EditMask& edit = result.mask;
    auto blend = [&](LatentImage& y, int t) {
        const LatentImage& x_ref = result.input_traj.latent(t);
        for (int r = 0; r < y.height; ++r) {
            for (int c = 0; c < y.width; ++c) {
                if (edit.binary[static_cast<std::size_t>(r) * edit.width + c]) continue;
                for (int ch = 0; ch < y.channels; ++ch) {
                    y.at(r, c, ch) = x_ref.at(r, c, ch);
                }
            }
        }
    };

    result.decode_traj = decode_ddim(result.input_traj.latent(params.t_E),
                                     params.t_E, cond_edit, mix, sched, blend);
    result.edited = result.decode_traj.latent(0);
    blend(result.edited, 0);
    return result;
}

LatentImage refine_guidance(const LatentImage& g0, const LatentImage& x0,
                            const EditParams& refine_params,
                            const SceneMixture& mix, const NoiseSchedule& sched) {
    refine_params.validate(sched.steps);
    if (refine_params.lambda != 0.0) {
        throw std::invalid_argument("refine_guidance: expects lambda = 0");
    }
    require_same_shape(g0, x0, "refine_guidance");

    const Condition uncond = Condition::none();
    const Trajectory ref_traj = encode_ddim(x0, refine_params.t_E, uncond, mix, sched);
    const Trajectory g_traj = encode_ddim(g0, refine_params.t_E, uncond, mix, sched);

    const EditMask unused = EditMask::zeros(g0.height, g0.width);
    const int first_plain_t = refine_params.t_E - refine_params.t_u;
    StepHook hook = [&](LatentImage& y, int t) {
        if (t <= first_plain_t) return;
        AdamState opt(y.height, y.width, y.channels);
        y = ito_update(y, ref_traj.latent(t), &ref_traj.latent(t), unused,
                       refine_params, opt);
    };

    Trajectory out = decode_ddim(g_traj.latent(refine_params.t_E), refine_params.t_E,
                                 uncond, mix, sched, hook);
    return out.latent(0);
}

}  // namespace latedit
