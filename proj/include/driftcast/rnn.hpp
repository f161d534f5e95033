#pragma once

#include "driftcast/forecaster.hpp"
#include "driftcast/optim.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace driftcast {

/**
 * Elman recurrent forecaster.
 *
 * The window is fed as a length-N sequence of scalars through a tanh cell
 * (h_t = tanh(Wx x_t + Wh h_{t-1} + b), h_0 = 0). The last hidden state goes
 * through inverted dropout (training only), a dense layer to H outputs and a
 * sigmoid, so every output lies in (0, 1). Trained with momentum SGD under a
 * staircase exponential schedule; the lr handed to update() is the schedule's
 * base rate.
 *
 * Parameter layout: Wx [hidden], Wh [hidden x hidden] row-major, b [hidden],
 * Wo [H x hidden] row-major, bo [H].
 */
class RnnForecaster final : public OnlineForecaster {
public:
    RnnForecaster(std::size_t n, std::size_t h, std::size_t hidden = 50, double dropout = 0.2,
                  SgdHyper sgd = {}, std::uint64_t seed = 42);

    std::string_view name() const override { return "rnn"; }
    std::size_t input_length() const override { return n_; }
    std::size_t horizon() const override { return h_; }
    bool trainable() const override { return true; }

    ForecastVector forecast(const Window& window) const override;
    double update(const Window& window, const ForecastVector& targets, double lr) override;

    ModelState state() const override;
    void load_state(const ModelState& state) override;

    std::span<const double> parameters() const override { return params_; }
    std::span<double> mutable_parameters() { return params_; }

    [[nodiscard]] std::size_t hidden() const noexcept { return hidden_; }
    [[nodiscard]] double dropout() const noexcept { return dropout_; }
    [[nodiscard]] const SgdState& optimizer_state() const noexcept { return sgd_state_; }

    struct Pass {
        std::vector<double> outputs;
        double loss = 0.0;
        std::vector<double> grad;
    };

    /// Full BPTT over the unrolled window. `dropout_scale` holds one
    /// multiplier per hidden unit (0 or 1/keep); empty means inference mode.
    Pass forward_backward(std::span<const double> inputs, std::span<const double> targets,
                          std::span<const double> dropout_scale = {}) const;

    /// Draws a training-mode dropout mask from the model's generator.
    std::vector<double> sample_dropout_mask();

private:
    std::vector<double> run_forward(std::span<const double> inputs, std::span<const double> dropout_scale,
                                    std::vector<double>* states) const;

    std::size_t n_;
    std::size_t h_;
    std::size_t hidden_;
    double dropout_;
    SgdHyper sgd_;
    std::vector<double> params_;
    SgdState sgd_state_;
    std::mt19937_64 rng_;
};

} // namespace driftcast
