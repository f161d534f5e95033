#include "driftcast/forecaster.hpp"

#include "driftcast/error.hpp"
#include "driftcast/mlp.hpp"
#include "driftcast/rnn.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace driftcast {

using nlohmann::json;

void OnlineForecaster::check_window(const Window& window) const {
    if (window.size() != input_length()) {
        throw ConfigError(std::string(name()) + " expects windows of length " + std::to_string(input_length()) +
                          ", got " + std::to_string(window.size()));
    }
}

void OnlineForecaster::check_targets(const ForecastVector& targets, double lr) const {
    if (targets.size() != horizon()) {
        throw InvalidArgument(std::string(name()) + " expects " + std::to_string(horizon()) + " targets, got " +
                              std::to_string(targets.size()));
    }
    for (double v : targets.values()) {
        if (!std::isfinite(v)) throw InvalidArgument("update targets must be finite");
    }
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
        throw InvalidArgument("learning rate must be finite and >= 0");
    }
}

double mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size() || pred.empty()) {
        throw InvalidArgument("mse: sequences must have equal non-zero length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

namespace {

void check_baseline_state(const ModelState& state, std::string_view expected, std::size_t n, std::size_t h) {
    if (state.model != expected) {
        throw DataError("checkpoint is for model '" + state.model + "', not '" + std::string(expected) + "'");
    }
    if (state.layer_sizes != std::vector<std::size_t>{n, h}) {
        throw DataError("checkpoint layer sizes do not match " + std::string(expected) + " configuration");
    }
}

} // namespace

PersistenceForecaster::PersistenceForecaster(std::size_t n, std::size_t h) : n_(n), h_(h) {
    if (n < 2 || h < 1) throw ConfigError("persistence: need n >= 2 and h >= 1");
}

ForecastVector PersistenceForecaster::forecast(const Window& window) const {
    check_window(window);
    return ForecastVector(std::vector<double>(h_, window.back()), window.origin());
}

double PersistenceForecaster::update(const Window& window, const ForecastVector& targets, double lr) {
    check_targets(targets, lr);
    return mse(forecast(window).values(), targets.values());
}

ModelState PersistenceForecaster::state() const {
    ModelState s;
    s.model = "persistence";
    s.layer_sizes = {n_, h_};
    return s;
}

void PersistenceForecaster::load_state(const ModelState& state) {
    check_baseline_state(state, "persistence", n_, h_);
}

WindowedLinearForecaster::WindowedLinearForecaster(std::size_t n, std::size_t h, PseudoMode mode)
    : n_(n), h_(h), mode_(mode) {
    if (n < 2 || h < 1) throw ConfigError("linear: need n >= 2 and h >= 1");
}

ForecastVector WindowedLinearForecaster::forecast(const Window& window) const {
    check_window(window);
    auto pseudo = generate_pseudo_targets(window, h_, mode_);
    return ForecastVector(std::move(pseudo.values), window.origin());
}

double WindowedLinearForecaster::update(const Window& window, const ForecastVector& targets, double lr) {
    check_targets(targets, lr);
    return mse(forecast(window).values(), targets.values());
}

ModelState WindowedLinearForecaster::state() const {
    ModelState s;
    s.model = "linear";
    s.layer_sizes = {n_, h_};
    return s;
}

void WindowedLinearForecaster::load_state(const ModelState& state) {
    check_baseline_state(state, "linear", n_, h_);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

std::string serialize_model_state(const ModelState& state) {
    json j;
    j["format"] = "driftcast-model/1";
    j["model"] = state.model;
    j["layer_sizes"] = state.layer_sizes;
    j["parameters"] = state.parameters;
    j["optimizer"] = {{"kind", state.optimizer}, {"moments", state.moments}, {"step", state.step}};
    return j.dump();
}

ModelState parse_model_state(std::string_view text) {
    try {
        const json j = json::parse(text);
        ModelState s;
        s.model = j.at("model").get<std::string>();
        s.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        s.parameters = j.at("parameters").get<std::vector<double>>();
        const auto& opt = j.at("optimizer");
        s.optimizer = opt.at("kind").get<std::string>();
        s.moments = opt.at("moments").get<std::vector<std::vector<double>>>();
        s.step = opt.at("step").get<std::uint64_t>();
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model checkpoint: ") + e.what());
    }
}

void save_model_state(const ModelState& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << serialize_model_state(state) << '\n';
}

ModelState load_model_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_state(buf.str());
}

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

std::span<const std::string_view> model_kinds() {
    static constexpr std::array<std::string_view, 4> kinds{"mlp", "rnn", "persistence", "linear"};
    return kinds;
}

std::unique_ptr<OnlineForecaster> make_forecaster(const ModelConfig& config) {
    if (config.n < 2) throw ConfigError("n must be >= 2");
    if (config.h < 1) throw ConfigError("h must be >= 1");
    if (config.kind == "mlp") {
        return std::make_unique<MlpForecaster>(config.n, config.h, config.mlp_hidden, config.adam, config.seed);
    }
    if (config.kind == "rnn") {
        return std::make_unique<RnnForecaster>(config.n, config.h, config.rnn_hidden, config.rnn_dropout,
                                               config.sgd, config.seed);
    }
    if (config.kind == "persistence") {
        return std::make_unique<PersistenceForecaster>(config.n, config.h);
    }
    if (config.kind == "linear") {
        return std::make_unique<WindowedLinearForecaster>(config.n, config.h, config.linear_mode);
    }
    throw ConfigError("unknown model '" + config.kind + "' (expected mlp|rnn|persistence|linear)");
}

} // namespace driftcast
