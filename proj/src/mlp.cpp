#include "driftcast/mlp.hpp"

#include "driftcast/error.hpp"

#include <cmath>
#include <random>

namespace driftcast {

MlpForecaster::MlpForecaster(std::size_t n, std::size_t h, std::size_t hidden, AdamHyper adam,
                             std::uint64_t seed)
    : n_(n), h_(h), hidden_(hidden), adam_(adam) {
    if (n < 2 || h < 1 || hidden < 1) {
        throw ConfigError("mlp: need n >= 2, h >= 1, hidden >= 1");
    }
    const std::size_t count = hidden * n + hidden + h * hidden + h;
    params_.resize(count);
    adam_state_ = AdamState(count);

    std::mt19937_64 rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(n));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> layer1(-bound1, bound1);
    std::uniform_real_distribution<double> layer2(-bound2, bound2);
    const std::size_t split = hidden * n + hidden;
    for (std::size_t i = 0; i < count; ++i) {
        params_[i] = i < split ? layer1(rng) : layer2(rng);
    }
}

void MlpForecaster::forward(std::span<const double> inputs, std::vector<double>& hidden_act,
                            std::vector<double>& out) const {
    const double* w1 = params_.data();
    const double* b1 = w1 + hidden_ * n_;
    const double* w2 = b1 + hidden_;
    const double* b2 = w2 + h_ * hidden_;

    hidden_act.assign(hidden_, 0.0);
    for (std::size_t k = 0; k < hidden_; ++k) {
        double z = b1[k];
        const double* row = w1 + k * n_;
        for (std::size_t i = 0; i < n_; ++i) z += row[i] * inputs[i];
        hidden_act[k] = z > 0.0 ? z : 0.0;
    }
    out.assign(h_, 0.0);
    for (std::size_t j = 0; j < h_; ++j) {
        double y = b2[j];
        const double* row = w2 + j * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) y += row[k] * hidden_act[k];
        out[j] = y;
    }
}

ForecastVector MlpForecaster::forecast(const Window& window) const {
    check_window(window);
    std::vector<double> hidden_act;
    std::vector<double> out;
    forward(window.values(), hidden_act, out);
    return ForecastVector(std::move(out), window.origin());
}

double MlpForecaster::loss_and_gradient(std::span<const double> inputs, std::span<const double> targets,
                                        std::vector<double>& grad) const {
    if (inputs.size() != n_ || targets.size() != h_) {
        throw InternalError("mlp: input/target size mismatch");
    }
    std::vector<double> hidden_act;
    std::vector<double> out;
    forward(inputs, hidden_act, out);

    grad.assign(params_.size(), 0.0);
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + hidden_ * n_;
    double* g_w2 = g_b1 + hidden_;
    double* g_b2 = g_w2 + h_ * hidden_;
    const double* w2 = params_.data() + hidden_ * n_ + hidden_;

    const double scale = 2.0 / static_cast<double>(h_);
    double loss = 0.0;
    std::vector<double> d_hidden(hidden_, 0.0);
    for (std::size_t j = 0; j < h_; ++j) {
        const double diff = out[j] - targets[j];
        loss += diff * diff;
        const double d_out = scale * diff;
        g_b2[j] = d_out;
        const double* row = w2 + j * hidden_;
        double* g_row = g_w2 + j * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) {
            g_row[k] = d_out * hidden_act[k];
            d_hidden[k] += d_out * row[k];
        }
    }
    for (std::size_t k = 0; k < hidden_; ++k) {
        if (hidden_act[k] <= 0.0) continue;
        g_b1[k] = d_hidden[k];
        double* g_row = g_w1 + k * n_;
        for (std::size_t i = 0; i < n_; ++i) g_row[i] = d_hidden[k] * inputs[i];
    }
    return loss / static_cast<double>(h_);
}

double MlpForecaster::update(const Window& window, const ForecastVector& targets, double lr) {
    check_window(window);
    check_targets(targets, lr);
    std::vector<double> grad;
    const double loss = loss_and_gradient(window.values(), targets.values(), grad);
    if (lr > 0.0) {
        AdamHyper hyper = adam_;
        hyper.lr = lr;
        adam_step(params_, grad, adam_state_, hyper);
    }
    return loss;
}

ModelState MlpForecaster::state() const {
    ModelState s;
    s.model = "mlp";
    s.layer_sizes = {n_, hidden_, h_};
    s.parameters = params_;
    s.optimizer = "adam";
    s.moments = {adam_state_.m, adam_state_.v};
    s.step = adam_state_.step;
    return s;
}

void MlpForecaster::load_state(const ModelState& state) {
    if (state.model != "mlp") {
        throw DataError("checkpoint is for model '" + state.model + "', not 'mlp'");
    }
    if (state.layer_sizes != std::vector<std::size_t>{n_, hidden_, h_}) {
        throw DataError("mlp checkpoint layer sizes do not match this model");
    }
    if (state.parameters.size() != params_.size() || state.optimizer != "adam" || state.moments.size() != 2 ||
        state.moments[0].size() != params_.size() || state.moments[1].size() != params_.size()) {
        throw DataError("mlp checkpoint parameter or optimizer arrays have the wrong shape");
    }
    params_ = state.parameters;
    adam_state_.m = state.moments[0];
    adam_state_.v = state.moments[1];
    adam_state_.step = state.step;
}

} // namespace driftcast
