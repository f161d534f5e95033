#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace driftcast {

struct AdamHyper {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}
};

/// Bias-corrected Adam update in place. Throws InternalError on shape mismatch.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamHyper& hyper);

/// SGD with heavy-ball momentum and a staircase exponential schedule:
/// lr(step) = lr0 * decay^floor(step / decay_steps).
struct SgdHyper {
    double lr0 = 0.1;
    double momentum = 0.9;
    double decay = 0.9;
    std::uint64_t decay_steps = 1000;
};

struct SgdState {
    std::vector<double> velocity;
    std::uint64_t step = 0;

    SgdState() = default;
    explicit SgdState(std::size_t size) : velocity(size, 0.0) {}
};

[[nodiscard]] double scheduled_lr(const SgdHyper& hyper, std::uint64_t step);

/// v <- momentum*v + g; p <- p - lr(step)*v; step += 1.
void sgd_momentum_step(std::span<double> params, std::span<const double> grads, SgdState& state,
                       const SgdHyper& hyper);

} // namespace driftcast
