#include "driftcast/protocol.hpp"

#include "driftcast/error.hpp"
#include "driftcast/log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace driftcast {

// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

Window RevealedStream::window_ending(std::size_t t_end, std::size_t n) const {
    const std::size_t revealed = revealed_count();
    if (t_end >= revealed) {
        throw InvalidArgument("window end " + std::to_string(t_end) + " has not been revealed");
    }
    if (n < 2) {
        throw InvalidArgument("window length must be >= 2");
    }
    if (t_end + 1 < n) {
        throw InsufficientData("window of " + std::to_string(n) + " ending at " + std::to_string(t_end) +
                               " needs more history");
    }
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = at(t_end + 1 - n + k);
    }
    return Window(std::move(values), t_end);
}

Window RevealedStream::latest_window(std::size_t n) const {
    const std::size_t revealed = revealed_count();
    if (revealed < n) {
        throw InsufficientData("only " + std::to_string(revealed) + " samples revealed, window needs " +
                               std::to_string(n));
    }
    return window_ending(revealed - 1, n);
}

StreamCursor::StreamCursor(const SoHSeries& series) : values_(series.values().begin(), series.values().end()) {}

StreamCursor::StreamCursor(std::vector<double> values) : values_(std::move(values)) {}

double StreamCursor::at(std::size_t index) const {
    if (index >= revealed_) {
        throw InvalidArgument("sample " + std::to_string(index) + " has not been revealed (revealed_count = " +
                              std::to_string(revealed_) + ")");
    }
    return values_[index];
}

std::optional<double> StreamCursor::advance() {
    if (revealed_ >= values_.size()) {
        return std::nullopt;
    }
    return values_[revealed_++];
}

// ---------------------------------------------------------------------------
// Learning-rate gate and targets
// ---------------------------------------------------------------------------

double confidence_ratio(double err_inc, double err_pseudo) { return err_inc / (err_pseudo + kGammaEpsilon); }

double gamma_lr(double err_inc, double err_pseudo, double eta0) {
    const double gamma = confidence_ratio(err_inc, err_pseudo);
    return gamma >= 1.0 ? eta0 : 0.1 * eta0 * gamma;
}

ForecastVector build_update_targets(double x_new, const PseudoTargets& pseudo) {
    if (pseudo.values.empty()) {
        throw InvalidArgument("pseudo targets are empty");
    }
    std::vector<double> targets = pseudo.values;
    targets[0] = x_new;
    return ForecastVector(std::move(targets), pseudo.origin);
}

std::size_t RunResult::total_updates() const {
    return std::accumulate(records.begin(), records.end(), std::size_t{0},
                           [](std::size_t acc, const StepRecord& r) { return acc + r.update_calls; });
}

std::size_t warmup_length(const RunConfig& config, std::size_t length) {
    return static_cast<std::size_t>(std::floor(config.warmup_fraction * static_cast<double>(length) + 1e-9));
}

// ---------------------------------------------------------------------------
// Warm-up
// ---------------------------------------------------------------------------

WarmupReport warmup_train(OnlineForecaster& model, std::span<const double> prefix, const RunConfig& config,
                          std::mt19937_64& rng) {
    const std::size_t n = config.n;
    const std::size_t h = config.h;
    if (prefix.size() < n + h) {
        throw InsufficientData("warm-up needs at least n + h = " + std::to_string(n + h) + " samples, got " +
                               std::to_string(prefix.size()));
    }
    const std::size_t pairs = prefix.size() - n - h + 1;
    std::vector<std::size_t> order(pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const double lr = config.resolved_warmup_lr();
    WarmupReport report;
    report.pairs_per_epoch = pairs;
    for (std::size_t epoch = 0; epoch < config.warmup_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t start : order) {
            Window window(std::vector<double>(prefix.begin() + static_cast<std::ptrdiff_t>(start),
                                              prefix.begin() + static_cast<std::ptrdiff_t>(start + n)),
                          start + n - 1);
            ForecastVector targets(std::vector<double>(prefix.begin() + static_cast<std::ptrdiff_t>(start + n),
                                                       prefix.begin() + static_cast<std::ptrdiff_t>(start + n + h)),
                                   start + n - 1);
            total += model.update(window, targets, lr);
        }
        report.final_epoch_loss = total / static_cast<double>(pairs);
        ++report.epochs;
        logger()->debug("warm-up epoch {}: mean loss {}", epoch + 1, report.final_epoch_loss);
    }
    return report;
}

WarmupReport pretrain_on_other(OnlineForecaster& model, const SoHSeries& other, const RunConfig& config,
                               std::mt19937_64& rng) {
    logger()->info("pretraining on '{}' ({} samples)", other.label(), other.size());
    return warmup_train(model, other.values(), config, rng);
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

StreamEngine::StreamEngine(RunConfig config, OnlineForecaster& model)
    : config_(std::move(config)), model_(model), eta0_(config_.resolved_eta0()) {
    config_.validate();
    if (model_.input_length() != config_.n || model_.horizon() != config_.h) {
        throw ConfigError("model shape (" + std::to_string(model_.input_length()) + ", " +
                          std::to_string(model_.horizon()) + ") does not match run config (" +
                          std::to_string(config_.n) + ", " + std::to_string(config_.h) + ")");
    }
    if (config_.inner_update_epochs > 1) {
        logger()->warn("inner_update_epochs = {}: each revealed sample is trained on repeatedly, which risks "
                       "overfitting",
                       config_.inner_update_epochs);
    }
}

void StreamEngine::start(const RevealedStream& stream) {
    Window window = stream.latest_window(config_.n);
    PseudoTargets pseudo = generate_pseudo_targets(window, config_.h, config_.pseudo_mode);
    boundary_origin_ = window.origin();
    pending_ = Pending{std::move(window), std::move(pseudo), std::nullopt};
    increments_ = 0;
}

std::optional<StepRecord> StreamEngine::step(RevealedStream& stream) {
    return config_.strategy == Strategy::Delayed ? step_delayed(stream) : step_pseudo(stream);
}

double StreamEngine::train(const Window& window, const ForecastVector& targets, double eta, std::size_t& calls) {
    double first_loss = 0.0;
    for (std::size_t k = 0; k < config_.inner_update_epochs; ++k) {
        const double loss = model_.update(window, targets, eta);
        if (k == 0) first_loss = loss;
        ++calls;
    }
    return first_loss;
}

std::optional<StepRecord> StreamEngine::step_pseudo(RevealedStream& stream) {
    if (!pending_) {
        throw InternalError("StreamEngine::start must be called before stepping");
    }
    const std::optional<double> revealed = stream.advance();
    if (!revealed) {
        return std::nullopt;
    }
    const double x_new = *revealed;
    const std::size_t index = stream.revealed_count() - 1;
    ++increments_;

    const Pending& prev = *pending_;
    const double err_pseudo = std::abs(prev.pseudo[0] - x_new);
    double err_inc = 0.0;
    double gamma = 1.0;
    if (prev.forecast) {
        err_inc = std::abs((*prev.forecast)[0] - x_new);
        gamma = confidence_ratio(err_inc, err_pseudo);
    }
    const double eta =
        (config_.strategy == Strategy::PseudoGamma && prev.forecast) ? gamma_lr(err_inc, err_pseudo, eta0_) : eta0_;

    const ForecastVector targets = build_update_targets(x_new, prev.pseudo);

    const auto t0 = Clock::now();
    std::size_t calls = 0;
    double loss = 0.0;
    if (config_.strategy == Strategy::Frozen) {
        loss = mse(model_.forecast(prev.window).values(), targets.values());
    } else {
        loss = train(prev.window, targets, eta, calls);
    }
    Window window = stream.latest_window(config_.n);
    PseudoTargets pseudo = generate_pseudo_targets(window, config_.h, config_.pseudo_mode);
    ForecastVector forecast = model_.forecast(window);
    const double elapsed = config_.record_timing ? seconds_since(t0) : 0.0;

    StepRecord record{
        .increment = increments_,
        .index = index,
        .actual = x_new,
        .forecast = forecast,
        .pseudo = prev.pseudo,
        .loss = loss,
        .err_inc = err_inc,
        .err_pseudo = err_pseudo,
        .gamma = gamma,
        .eta = eta,
        .update_calls = calls,
        .wall_time_seconds = elapsed,
    };
    pending_ = Pending{std::move(window), std::move(pseudo), std::move(forecast)};
    return record;
}

std::optional<StepRecord> StreamEngine::step_delayed(RevealedStream& stream) {
    if (!pending_) {
        throw InternalError("StreamEngine::start must be called before stepping");
    }
    const std::optional<double> revealed = stream.advance();
    if (!revealed) {
        return std::nullopt;
    }
    const double x_new = *revealed;
    const std::size_t index = stream.revealed_count() - 1;
    ++increments_;

    const Pending& prev = *pending_;
    const double err_pseudo = std::abs(prev.pseudo[0] - x_new);
    double err_inc = 0.0;
    double gamma = 1.0;
    if (prev.forecast) {
        err_inc = std::abs((*prev.forecast)[0] - x_new);
        gamma = confidence_ratio(err_inc, err_pseudo);
    }

    const auto t0 = Clock::now();
    std::size_t calls = 0;
    double loss = 0.0;
    const std::size_t h = config_.h;
    if (index >= boundary_origin_ + h) {
        // The forecast issued at origin index - h now has all h actuals.
        const std::size_t origin = index - h;
        const Window past = stream.window_ending(origin, config_.n);
        std::vector<double> actuals(h);
        for (std::size_t j = 0; j < h; ++j) actuals[j] = stream.at(origin + 1 + j);
        loss = train(past, ForecastVector(std::move(actuals), origin), eta0_, calls);
    } else {
        loss = mse(model_.forecast(prev.window).values(), build_update_targets(x_new, prev.pseudo).values());
    }
    Window window = stream.latest_window(config_.n);
    PseudoTargets pseudo = generate_pseudo_targets(window, config_.h, config_.pseudo_mode);
    ForecastVector forecast = model_.forecast(window);
    const double elapsed = config_.record_timing ? seconds_since(t0) : 0.0;

    StepRecord record{
        .increment = increments_,
        .index = index,
        .actual = x_new,
        .forecast = forecast,
        .pseudo = prev.pseudo,
        .loss = loss,
        .err_inc = err_inc,
        .err_pseudo = err_pseudo,
        .gamma = gamma,
        .eta = eta0_,
        .update_calls = calls,
        .wall_time_seconds = elapsed,
    };
    pending_ = Pending{std::move(window), std::move(pseudo), std::move(forecast)};
    return record;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string what = context + ": " + e.what();
    switch (e.kind()) {
    case ErrorKind::InvalidArgument: throw InvalidArgument(what);
    case ErrorKind::InsufficientData: throw InsufficientData(what);
    case ErrorKind::Config: throw ConfigError(what);
    case ErrorKind::Data: throw DataError(what);
    case ErrorKind::Io: throw IoError(what);
    case ErrorKind::Internal: throw InternalError(what);
    }
    throw InternalError(what);
}

} // namespace

RunResult run_stream(const RunConfig& config, RevealedStream& stream, OnlineForecaster& model, std::size_t warmup,
                     const SoHSeries* pretrain) {
    config.validate();
    if (stream.revealed_count() != 0) {
        throw InvalidArgument("run_stream expects an unrevealed stream");
    }
    if (warmup < config.n) {
        throw InsufficientData("warm-up of " + std::to_string(warmup) + " samples is shorter than n = " +
                               std::to_string(config.n));
    }

    RunResult result;
    result.config = config;
    result.warmup_length = warmup;
    std::mt19937_64 rng(config.seed);

    if (pretrain) {
        result.pretrain = pretrain_on_other(model, *pretrain, config, rng);
        result.pretrain_label = pretrain->label();
    }

    std::vector<double> prefix;
    prefix.reserve(warmup);
    for (std::size_t i = 0; i < warmup; ++i) {
        const auto v = stream.advance();
        if (!v) {
            throw InsufficientData("stream ended during warm-up after " + std::to_string(i) + " samples");
        }
        prefix.push_back(*v);
    }
    if (prefix.size() >= config.n + config.h) {
        result.warmup = warmup_train(model, prefix, config, rng);
    } else if (pretrain) {
        logger()->warn("warm-up prefix of {} samples is shorter than n + h = {}; using pretrained weights only",
                       prefix.size(), config.n + config.h);
    } else {
        throw InsufficientData("warm-up needs at least n + h = " + std::to_string(config.n + config.h) +
                               " samples, got " + std::to_string(prefix.size()));
    }

    StreamEngine engine(config, model);
    engine.start(stream);
    while (true) {
        std::optional<StepRecord> record;
        try {
            record = engine.step(stream);
        } catch (const Error& e) {
            rethrow_with_context(e, "increment " + std::to_string(result.records.size() + 1));
        }
        if (!record) break;
        result.records.push_back(std::move(*record));
    }
    if (result.records.empty()) {
        throw InsufficientData("series leaves no samples after warm-up");
    }
    result.series_length = warmup + result.records.size();
    result.final_state = model.state();
    return result;
}

RunResult run_stream(const RunConfig& config, const SoHSeries& series, const SoHSeries* pretrain) {
    config.validate();
    auto model = make_forecaster(config.resolved_model());
    StreamCursor cursor(series);
    const std::size_t warmup = warmup_length(config, series.size());
    if (warmup >= series.size()) {
        throw InsufficientData("series of " + std::to_string(series.size()) +
                               " samples leaves nothing to stream after warm-up");
    }
    RunResult result = run_stream(config, cursor, *model, warmup, pretrain);
    result.series_label = series.label();
    return result;
}

} // namespace driftcast
