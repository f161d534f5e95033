#pragma once

#include "driftcast/forecaster.hpp"
#include "driftcast/optim.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace driftcast {

/**
 * One-hidden-layer perceptron N -> hidden (ReLU) -> H (linear), trained with
 * Adam on mean-squared error.
 *
 * Parameter layout: W1 [hidden x N] row-major, b1 [hidden], W2 [H x hidden]
 * row-major, b2 [H]. The output stays linear so SoH values at or above 1.0
 * remain reachable.
 */
class MlpForecaster final : public OnlineForecaster {
public:
    MlpForecaster(std::size_t n, std::size_t h, std::size_t hidden = 64, AdamHyper adam = {},
                  std::uint64_t seed = 42);

    std::string_view name() const override { return "mlp"; }
    std::size_t input_length() const override { return n_; }
    std::size_t horizon() const override { return h_; }
    bool trainable() const override { return true; }

    ForecastVector forecast(const Window& window) const override;
    double update(const Window& window, const ForecastVector& targets, double lr) override;

    ModelState state() const override;
    void load_state(const ModelState& state) override;

    std::span<const double> parameters() const override { return params_; }
    /// Direct parameter access for gradient checks and tests.
    std::span<double> mutable_parameters() { return params_; }

    [[nodiscard]] std::size_t hidden() const noexcept { return hidden_; }
    [[nodiscard]] const AdamState& optimizer_state() const noexcept { return adam_state_; }

    /// Loss and dLoss/dparams at the current weights; does not modify the model.
    double loss_and_gradient(std::span<const double> inputs, std::span<const double> targets,
                             std::vector<double>& grad) const;

private:
    void forward(std::span<const double> inputs, std::vector<double>& hidden_act,
                 std::vector<double>& out) const;

    std::size_t n_;
    std::size_t h_;
    std::size_t hidden_;
    AdamHyper adam_;
    std::vector<double> params_;
    AdamState adam_state_;
};

} // namespace driftcast
