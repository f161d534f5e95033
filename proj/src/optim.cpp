#include "driftcast/optim.hpp"

#include "driftcast/error.hpp"

#include <cmath>

namespace driftcast {

namespace {

void check_shapes(std::size_t params, std::size_t grads, std::size_t state, const char* who) {
    if (params != grads || params != state) {
        throw InternalError(std::string(who) + ": parameter/gradient/state sizes differ (" +
                            std::to_string(params) + "/" + std::to_string(grads) + "/" +
                            std::to_string(state) + ")");
    }
}

} // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamHyper& hyper) {
    check_shapes(params.size(), grads.size(), state.m.size(), "adam_step");
    check_shapes(params.size(), grads.size(), state.v.size(), "adam_step");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(hyper.beta1, t);
    const double bias2 = 1.0 - std::pow(hyper.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        params[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

double scheduled_lr(const SgdHyper& hyper, std::uint64_t step) {
    const std::uint64_t stage = hyper.decay_steps == 0 ? 0 : step / hyper.decay_steps;
    return hyper.lr0 * std::pow(hyper.decay, static_cast<double>(stage));
}

void sgd_momentum_step(std::span<double> params, std::span<const double> grads, SgdState& state,
                       const SgdHyper& hyper) {
    check_shapes(params.size(), grads.size(), state.velocity.size(), "sgd_momentum_step");

    const double lr = scheduled_lr(hyper, state.step);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.velocity[i] = hyper.momentum * state.velocity[i] + grads[i];
        params[i] -= lr * state.velocity[i];
    }
    state.step += 1;
}

} // namespace driftcast
