#pragma once

#include "driftcast/forecaster.hpp"
#include "driftcast/pseudo_target.hpp"
#include "driftcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace driftcast {

// ---------------------------------------------------------------------------
// Causality guard
// ---------------------------------------------------------------------------

/**
 * Read access to the revealed prefix of a sample stream.
 *
 * There is deliberately no accessor for the stream length or for samples at
 * or beyond revealed_count(): the only way forward is advance(), which
 * discloses exactly one new sample.
 */
class RevealedStream {
public:
    virtual ~RevealedStream() = default;

    [[nodiscard]] virtual std::size_t revealed_count() const = 0;
    /// Throws InvalidArgument for index >= revealed_count().
    [[nodiscard]] virtual double at(std::size_t index) const = 0;
    /// Discloses the next sample; std::nullopt once the stream is exhausted.
    virtual std::optional<double> advance() = 0;

    /// `n` revealed values ending at `t_end`; built through at().
    [[nodiscard]] Window window_ending(std::size_t t_end, std::size_t n) const;
    /// `n` most recent revealed values.
    [[nodiscard]] Window latest_window(std::size_t n) const;
};

/// The production cursor over an in-memory series.
class StreamCursor final : public RevealedStream {
public:
    explicit StreamCursor(const SoHSeries& series);
    explicit StreamCursor(std::vector<double> values);

    std::size_t revealed_count() const override { return revealed_; }
    double at(std::size_t index) const override;
    std::optional<double> advance() override;

private:
    std::vector<double> values_;
    std::size_t revealed_ = 0;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Strategy {
    /// Approach 2: actual + pseudo targets, fixed rate eta0.
    Pseudo,
    /// Approach 2 with the error-ratio learning-rate gate.
    PseudoGamma,
    /// Approach 1: wait until all H actuals of a past forecast are known.
    Delayed,
    /// Forecast only; weights stay at their warm-up values.
    Frozen,
};

[[nodiscard]] std::string_view to_string(Strategy strategy);
[[nodiscard]] Strategy parse_strategy(std::string_view name);

struct RunConfig {
    std::size_t n = kDefaultInputLength;
    std::size_t h = kDefaultHorizon;
    double warmup_fraction = 0.25;
    std::size_t warmup_epochs = 8;
    /// Unset means the model's default (mlp 1e-3, rnn 0.1).
    std::optional<double> warmup_lr;
    /// Unset means the model's default (mlp 1e-5, rnn 0.1).
    std::optional<double> eta0;
    Strategy strategy = Strategy::PseudoGamma;
    PseudoMode pseudo_mode = PseudoMode::Literal;
    ModelConfig model{};
    std::uint64_t seed = 42;
    std::size_t inner_update_epochs = 1;
    std::string pretrain_series;
    bool record_timing = true;

    [[nodiscard]] double resolved_warmup_lr() const;
    [[nodiscard]] double resolved_eta0() const;
    /// Model configuration with n, h and seed taken from this run config.
    [[nodiscard]] ModelConfig resolved_model() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Sets one field from its textual form; keys are the field names above
    /// plus the model hyperparameters (mlp_hidden, rnn_hidden, rnn_dropout,
    /// adam_beta1, adam_beta2, adam_epsilon, sgd_momentum, sgd_decay,
    /// sgd_decay_steps). Throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Every key with its current textual value, in a fixed order.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> to_key_values() const;
    /// Textual value of one key; ConfigError for unknown keys.
    [[nodiscard]] std::string get(std::string_view key) const;

    /// Parses `key = value` lines; '#' starts a comment.
    static RunConfig parse(std::string_view text);
    /// Throws ConfigError (naming the path) when the file cannot be read.
    static RunConfig load(const std::filesystem::path& path);
    [[nodiscard]] std::string format() const;
};

/// Warm-up length used by run_stream for a series of `length` samples.
[[nodiscard]] std::size_t warmup_length(const RunConfig& config, std::size_t length);

// ---------------------------------------------------------------------------
// Learning-rate gate and update targets
// ---------------------------------------------------------------------------

inline constexpr double kGammaEpsilon = 1e-12;

/// err_inc / (err_pseudo + 1e-12).
[[nodiscard]] double confidence_ratio(double err_inc, double err_pseudo);
/// eta0 when the ratio is >= 1, otherwise 0.1 * eta0 * ratio.
[[nodiscard]] double gamma_lr(double err_inc, double err_pseudo, double eta0);

/// The pseudo vector with its first slot replaced by the newly revealed
/// actual. Origin is preserved (the forecast origin the targets belong to).
[[nodiscard]] ForecastVector build_update_targets(double x_new, const PseudoTargets& pseudo);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct StepRecord {
    std::size_t increment = 0;   ///< 1-based count after warm-up
    std::size_t index = 0;       ///< series index of the revealed actual
    double actual = 0.0;
    ForecastVector forecast;     ///< issued this step, origin == index
    PseudoTargets pseudo;        ///< pseudo targets behind this step's update targets
    double loss = 0.0;
    double err_inc = 0.0;
    double err_pseudo = 0.0;
    double gamma = 1.0;
    double eta = 0.0;
    std::size_t update_calls = 0;
    double wall_time_seconds = 0.0;
};

struct WarmupReport {
    std::size_t pairs_per_epoch = 0;
    std::size_t epochs = 0;
    double final_epoch_loss = 0.0;
};

struct RunResult {
    RunConfig config;
    std::string series_label;
    std::size_t series_length = 0;
    std::size_t warmup_length = 0;
    std::optional<WarmupReport> warmup;
    std::optional<WarmupReport> pretrain;
    std::string pretrain_label;
    std::vector<StepRecord> records;
    ModelState final_state;

    [[nodiscard]] std::size_t total_updates() const;
};

// ---------------------------------------------------------------------------
// Training and streaming
// ---------------------------------------------------------------------------

/// Offline pass over every (window, next-h actuals) pair inside `prefix`,
/// warmup_epochs times at the warm-up rate, order shuffled per epoch.
/// Throws InsufficientData when prefix.size() < n + h.
WarmupReport warmup_train(OnlineForecaster& model, std::span<const double> prefix, const RunConfig& config,
                          std::mt19937_64& rng);

/// warmup_train on a different series (same chemistry, geometry and nominal
/// capacity as the target).
WarmupReport pretrain_on_other(OnlineForecaster& model, const SoHSeries& other, const RunConfig& config,
                               std::mt19937_64& rng);

/**
 * Prequential loop: reveal one sample, update, forecast.
 *
 * start() must be called once with at least n samples revealed; it stores the
 * boundary window. Each step returns std::nullopt at end of stream.
 */
class StreamEngine {
public:
    StreamEngine(RunConfig config, OnlineForecaster& model);

    void start(const RevealedStream& stream);
    std::optional<StepRecord> step(RevealedStream& stream);

    /// Approach 2 (also drives Frozen).
    std::optional<StepRecord> step_pseudo(RevealedStream& stream);
    /// Approach 1.
    std::optional<StepRecord> step_delayed(RevealedStream& stream);

private:
    struct Pending {
        Window window;
        PseudoTargets pseudo;
        std::optional<ForecastVector> forecast;
    };

    double train(const Window& window, const ForecastVector& targets, double eta, std::size_t& calls);

    RunConfig config_;
    OnlineForecaster& model_;
    double eta0_;
    std::optional<Pending> pending_;
    std::size_t boundary_origin_ = 0;
    std::size_t increments_ = 0;
};

/// Warm-up (after optional pretraining) then stream until exhaustion. The
/// stream must be unrevealed; `warmup` samples are revealed for training.
RunResult run_stream(const RunConfig& config, RevealedStream& stream, OnlineForecaster& model,
                     std::size_t warmup, const SoHSeries* pretrain = nullptr);

/// Convenience overload: builds the model and cursor from the config.
RunResult run_stream(const RunConfig& config, const SoHSeries& series, const SoHSeries* pretrain = nullptr);

} // namespace driftcast
