#pragma once

#include "driftcast/optim.hpp"
#include "driftcast/pseudo_target.hpp"
#include "driftcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftcast {

/// Flat checkpoint of a forecaster: enough to resume forecasting and
/// optimisation exactly where it stopped.
struct ModelState {
    std::string model;                       ///< "mlp", "rnn", "persistence", "linear"
    std::vector<std::size_t> layer_sizes;    ///< e.g. {N, hidden, H}
    std::vector<double> parameters;
    std::string optimizer = "none";          ///< "adam", "sgd" or "none"
    std::vector<std::vector<double>> moments;///< adam: {m, v}; sgd: {velocity}
    std::uint64_t step = 0;

    friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// JSON text form of a checkpoint (see README "Model checkpoints").
[[nodiscard]] std::string serialize_model_state(const ModelState& state);
/// Throws DataError on malformed input.
[[nodiscard]] ModelState parse_model_state(std::string_view text);
void save_model_state(const ModelState& state, const std::filesystem::path& path);
[[nodiscard]] ModelState load_model_state(const std::filesystem::path& path);

/**
 * Multi-output forecaster driven by the streaming engine.
 *
 * forecast() is a pure function of the current weights. update() takes one
 * optimiser step on the mean-squared error between forecast(window) and the
 * targets and returns the loss measured before the step. lr == 0 leaves the
 * model (weights and optimiser state) untouched.
 */
class OnlineForecaster {
public:
    virtual ~OnlineForecaster() = default;

    [[nodiscard]] virtual std::string_view name() const = 0;
    [[nodiscard]] virtual std::size_t input_length() const = 0;
    [[nodiscard]] virtual std::size_t horizon() const = 0;
    [[nodiscard]] virtual bool trainable() const { return false; }

    [[nodiscard]] virtual ForecastVector forecast(const Window& window) const = 0;
    virtual double update(const Window& window, const ForecastVector& targets, double lr) = 0;

    [[nodiscard]] virtual ModelState state() const = 0;
    virtual void load_state(const ModelState& state) = 0;

    /// Trainable parameters in checkpoint order; empty for baselines.
    [[nodiscard]] virtual std::span<const double> parameters() const { return {}; }

protected:
    /// ConfigError on length mismatch.
    void check_window(const Window& window) const;
    /// InvalidArgument on length mismatch, non-finite values or negative lr.
    void check_targets(const ForecastVector& targets, double lr) const;
};

/// Mean of squared differences; InvalidArgument on size mismatch or empty input.
[[nodiscard]] double mse(std::span<const double> pred, std::span<const double> target);

/// Last observed value repeated H times.
class PersistenceForecaster final : public OnlineForecaster {
public:
    PersistenceForecaster(std::size_t n, std::size_t h);

    std::string_view name() const override { return "persistence"; }
    std::size_t input_length() const override { return n_; }
    std::size_t horizon() const override { return h_; }
    ForecastVector forecast(const Window& window) const override;
    double update(const Window& window, const ForecastVector& targets, double lr) override;
    ModelState state() const override;
    void load_state(const ModelState& state) override;

private:
    std::size_t n_;
    std::size_t h_;
};

/// Clamped-slope line through the window, extrapolated H steps.
class WindowedLinearForecaster final : public OnlineForecaster {
public:
    WindowedLinearForecaster(std::size_t n, std::size_t h, PseudoMode mode = PseudoMode::Literal);

    std::string_view name() const override { return "linear"; }
    std::size_t input_length() const override { return n_; }
    std::size_t horizon() const override { return h_; }
    ForecastVector forecast(const Window& window) const override;
    double update(const Window& window, const ForecastVector& targets, double lr) override;
    ModelState state() const override;
    void load_state(const ModelState& state) override;

private:
    std::size_t n_;
    std::size_t h_;
    PseudoMode mode_;
};

/// Everything needed to construct any forecaster.
struct ModelConfig {
    std::string kind = "mlp";
    std::size_t n = kDefaultInputLength;
    std::size_t h = kDefaultHorizon;
    std::size_t mlp_hidden = 64;
    std::size_t rnn_hidden = 50;
    double rnn_dropout = 0.2;
    AdamHyper adam{};
    SgdHyper sgd{};
    PseudoMode linear_mode = PseudoMode::Literal;
    std::uint64_t seed = 42;
};

/// Known model ids, in display order.
[[nodiscard]] std::span<const std::string_view> model_kinds();
/// Throws ConfigError for unknown kinds or invalid sizes.
[[nodiscard]] std::unique_ptr<OnlineForecaster> make_forecaster(const ModelConfig& config);

} // namespace driftcast
