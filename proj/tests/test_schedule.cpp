#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "latedit/schedule.hpp"
#include "test_util.hpp"

using namespace latedit;
using namespace latedit::testutil;

namespace {

NoiseSchedule two_level(double a1, double a2) {
    NoiseSchedule s;
    s.steps = 2;
    s.alpha_bar = {1.0, a1, a2};
    return s;
}

LatentImage scalar(double v) {
    LatentImage img(1, 1, 1);
    img.data[0] = v;
    return img;
}

}  // namespace

TEST_CASE("cosine schedule satisfies its invariants at T=25") {
    const NoiseSchedule s = build_schedule(25);
    CHECK(s.alpha_bar[0] == 1.0);
    for (int t = 0; t < 25; ++t) {
        CHECK(s.alpha_bar[t + 1] < s.alpha_bar[t]);
    }
    CHECK(s.alpha_bar[25] > 0.0);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("cosine schedule matches the closed form at t=12") {
    const NoiseSchedule s = build_schedule(25);
    // Independent high-precision evaluation of the profile.
    const long double u = (12.0L / 25.0L + 0.008L) / 1.008L;
    const long double pi = 3.14159265358979323846264338L;
    const long double c = std::cos(u * pi / 2.0L);
    const long double expected = c * c;
    CHECK(std::abs(s.alpha_bar[12] - static_cast<double>(expected)) < 1e-15);
}

TEST_CASE("build_schedule rejects bad arguments") {
    CHECK_THROWS_AS(build_schedule(1), std::invalid_argument);
    CHECK_THROWS_AS(schedule_kind_from_string("quadratic"), std::invalid_argument);
}

TEST_CASE("ddim_step with zero eps and equal levels is the identity") {
    const NoiseSchedule s = two_level(0.5, 0.5);
    const LatentImage x = random_latent(11, 3, 3, 2);
    const LatentImage eps(3, 3, 2, 0.0);
    const LatentImage out = ddim_step(x, eps, 2, s);
    CHECK(max_abs_diff(out, x) == 0.0);
}

TEST_CASE("ddim_step scalar case matches the hand-evaluated update") {
    // levels: alpha_bar[1] = 0.8, alpha_bar[2] = 0.5; step from t=2.
    const NoiseSchedule s = two_level(0.8, 0.5);
    const LatentImage out = ddim_step(scalar(1.0), scalar(0.2), 2, s);
    // sqrt(1.6)*1.0 + sqrt(0.8)*(sqrt(0.25) - sqrt(1.0))*0.2
    CHECK(out.data[0] == doctest::Approx(1.1754683449673602).epsilon(1e-12));
}

TEST_CASE("ddim_step reproduces the stochastic-form transport") {
    // x_t built as sqrt(a_t) x0 + sqrt(1-a_t) e steps to the same form at t-1.
    const NoiseSchedule s = build_schedule(25);
    const LatentImage x0 = random_latent(21, 4, 4, 3, 0.5, 0.4);
    const LatentImage e = random_latent(22, 4, 4, 3);
    for (int t = 1; t <= 25; ++t) {
        const LatentImage x_t = stochastic_encode(x0, t, e, s);
        const LatentImage got = ddim_step(x_t, e, t, s);
        const LatentImage want = stochastic_encode(x0, t - 1, e, s);
        CHECK(max_abs_diff(got, want) < 1e-12);
    }
}

TEST_CASE("ddim_invert_step with zero eps and equal levels is the identity") {
    const NoiseSchedule s = two_level(0.5, 0.5);
    const LatentImage x = random_latent(12, 3, 3, 2);
    const LatentImage eps(3, 3, 2, 0.0);
    const LatentImage out = ddim_invert_step(x, eps, 1, s);
    CHECK(max_abs_diff(out, x) == 0.0);
}

TEST_CASE("ddim_invert_step reverses the scalar example") {
    const NoiseSchedule s = two_level(0.8, 0.5);
    const LatentImage out = ddim_invert_step(scalar(1.1754683449673602), scalar(0.2), 1, s);
    CHECK(out.data[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invert then step under frozen eps is the identity at every t") {
    const NoiseSchedule s = build_schedule(25);
    const LatentImage x = random_latent(31, 4, 4, 3, 0.7);
    const LatentImage eps = random_latent(32, 4, 4, 3);
    for (int t = 0; t < 25; ++t) {
        const LatentImage up = ddim_invert_step(x, eps, t, s);
        const LatentImage back = ddim_step(up, eps, t + 1, s);
        CHECK(rel_l2_diff(back, x) < 1e-12);
    }
}

TEST_CASE("ddim coefficients expand when stepping toward clean") {
    const NoiseSchedule s = build_schedule(25);
    for (int t = 1; t <= 25; ++t) {
        CHECK(std::sqrt(s.alpha(t - 1) / s.alpha(t)) > 1.0);
    }
}

TEST_CASE("ddim outputs stay finite on random inputs") {
    const NoiseSchedule s = build_schedule(25);
    for (int i = 0; i < 20; ++i) {
        const LatentImage x = random_latent(100 + i, 4, 4, 3, 3.0);
        const LatentImage eps = random_latent(200 + i, 4, 4, 3, 3.0);
        const int t = 1 + i % 25;
        CHECK(ddim_step(x, eps, t, s).all_finite());
        CHECK(ddim_invert_step(x, eps, t - 1, s).all_finite());
    }
}

TEST_CASE("stochastic_encode endpoints") {
    const NoiseSchedule s = build_schedule(25);
    const LatentImage x0 = random_latent(41, 4, 4, 3, 0.5, 0.4);
    const LatentImage n = random_latent(42, 4, 4, 3);
    const LatentImage zero(4, 4, 3, 0.0);

    CHECK(max_abs_diff(stochastic_encode(x0, 0, n, s), x0) == 0.0);

    const LatentImage no_noise = stochastic_encode(x0, 10, zero, s);
    const double sa = std::sqrt(s.alpha(10));
    for (std::size_t i = 0; i < x0.data.size(); ++i) {
        CHECK(no_noise.data[i] == doctest::Approx(sa * x0.data[i]).epsilon(1e-15));
    }

    const LatentImage pure_noise = stochastic_encode(zero, 10, n, s);
    const double sb = std::sqrt(1.0 - s.alpha(10));
    for (std::size_t i = 0; i < n.data.size(); ++i) {
        CHECK(pure_noise.data[i] == doctest::Approx(sb * n.data[i]).epsilon(1e-15));
    }
}

TEST_CASE("ddim_step validates ranges and shapes") {
    const NoiseSchedule s = build_schedule(25);
    const LatentImage x = random_latent(51, 2, 2, 1);
    const LatentImage eps_bad = random_latent(52, 2, 2, 3);
    CHECK_THROWS_AS(ddim_step(x, x, 0, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step(x, x, 26, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step(x, eps_bad, 1, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_invert_step(x, x, 25, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_invert_step(x, x, -1, s), std::invalid_argument);
}
