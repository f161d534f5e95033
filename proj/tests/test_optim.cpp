#include <doctest.h>

#include "driftcast/error.hpp"
#include "driftcast/optim.hpp"

#include <cmath>

using namespace driftcast;

TEST_CASE("adam matches a scalar reference over ten steps") {
    const AdamHyper hyper{.lr = 0.01, .beta1 = 0.9, .beta2 = 0.999, .epsilon = 1e-8};
    const double grads[10] = {0.5, -0.2, 0.1, 0.3, -0.7, 0.05, 0.0, 1.2, -0.4, 0.25};

    std::vector<double> p{1.0};
    AdamState state(1);
    double ref_p = 1.0, m = 0.0, v = 0.0;
    for (int t = 1; t <= 10; ++t) {
        const double g = grads[t - 1];
        adam_step(p, std::vector<double>{g}, state, hyper);

        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        ref_p -= 0.01 * mh / (std::sqrt(vh) + 1e-8);

        CHECK(std::fabs(p[0] - ref_p) < 1e-12);
    }
    CHECK(state.step == 10);
}

TEST_CASE("adam first step moves by about lr regardless of gradient scale") {
    for (double g : {1e-6, 1.0, 1e6}) {
        std::vector<double> p{0.0};
        AdamState s(1);
        adam_step(p, std::vector<double>{g}, s, AdamHyper{});
        CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-3));
    }
}

TEST_CASE("step schedule decays by 0.9 every 1000 steps") {
    const SgdHyper hyper{};
    CHECK(scheduled_lr(hyper, 0) == 0.1);
    CHECK(scheduled_lr(hyper, 999) == 0.1);
    CHECK(scheduled_lr(hyper, 1000) == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(scheduled_lr(hyper, 2500) == doctest::Approx(0.081).epsilon(1e-15));
    CHECK(scheduled_lr(hyper, 10000) == doctest::Approx(0.1 * std::pow(0.9, 10)).epsilon(1e-15));
}

TEST_CASE("momentum sgd against a hand-rolled recurrence") {
    const SgdHyper hyper{.lr0 = 0.5, .momentum = 0.9, .decay = 0.5, .decay_steps = 2};
    std::vector<double> p{2.0, -1.0};
    SgdState s(2);
    double ref[2] = {2.0, -1.0};
    double vel[2] = {0.0, 0.0};
    const double g[4][2] = {{1.0, 0.5}, {0.2, -0.1}, {-0.3, 0.0}, {0.4, 0.4}};
    for (int k = 0; k < 4; ++k) {
        sgd_momentum_step(p, std::vector<double>{g[k][0], g[k][1]}, s, hyper);
        const double lr = 0.5 * std::pow(0.5, k / 2);
        for (int i = 0; i < 2; ++i) {
            vel[i] = 0.9 * vel[i] + g[k][i];
            ref[i] -= lr * vel[i];
            CHECK(std::fabs(p[i] - ref[i]) < 1e-15);
        }
    }
    CHECK(s.step == 4);
}

TEST_CASE("shape mismatches are internal errors") {
    std::vector<double> p{1.0, 2.0};
    AdamState a(1);
    CHECK_THROWS_AS(adam_step(p, std::vector<double>{0.1, 0.2}, a, AdamHyper{}), InternalError);
    SgdState s(2);
    CHECK_THROWS_AS(sgd_momentum_step(p, std::vector<double>{0.1}, s, SgdHyper{}), InternalError);
}
