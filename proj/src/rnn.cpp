#include "driftcast/rnn.hpp"

#include "driftcast/error.hpp"

#include <cmath>

namespace driftcast {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

RnnForecaster::RnnForecaster(std::size_t n, std::size_t h, std::size_t hidden, double dropout, SgdHyper sgd,
                             std::uint64_t seed)
    : n_(n), h_(h), hidden_(hidden), dropout_(dropout), sgd_(sgd), rng_(seed) {
    if (n < 2 || h < 1 || hidden < 1) {
        throw ConfigError("rnn: need n >= 2, h >= 1, hidden >= 1");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ConfigError("rnn: dropout must lie in [0, 1)");
    }
    const std::size_t cell = hidden + hidden * hidden + hidden;
    const std::size_t count = cell + h * hidden + h;
    params_.resize(count);
    sgd_state_ = SgdState(count);

    // Cell units see 1 input + hidden recurrent inputs; readout units see hidden.
    const double cell_bound = 1.0 / std::sqrt(static_cast<double>(hidden + 1));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> cell_dist(-cell_bound, cell_bound);
    std::uniform_real_distribution<double> out_dist(-out_bound, out_bound);
    for (std::size_t i = 0; i < count; ++i) {
        params_[i] = i < cell ? cell_dist(rng_) : out_dist(rng_);
    }
}

std::vector<double> RnnForecaster::run_forward(std::span<const double> inputs,
                                               std::span<const double> dropout_scale,
                                               std::vector<double>* states) const {
    const double* wx = params_.data();
    const double* wh = wx + hidden_;
    const double* b = wh + hidden_ * hidden_;
    const double* wo = b + hidden_;
    const double* bo = wo + h_ * hidden_;

    // states holds h_0 .. h_N, each of size hidden_.
    std::vector<double> local;
    std::vector<double>& hs = states ? *states : local;
    hs.assign((n_ + 1) * hidden_, 0.0);
    for (std::size_t t = 0; t < n_; ++t) {
        const double* prev = hs.data() + t * hidden_;
        double* cur = hs.data() + (t + 1) * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) {
            double a = wx[k] * inputs[t] + b[k];
            const double* row = wh + k * hidden_;
            for (std::size_t m = 0; m < hidden_; ++m) a += row[m] * prev[m];
            cur[k] = std::tanh(a);
        }
    }

    const double* last = hs.data() + n_ * hidden_;
    std::vector<double> out(h_);
    for (std::size_t j = 0; j < h_; ++j) {
        double o = bo[j];
        const double* row = wo + j * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) {
            const double d = dropout_scale.empty() ? last[k] : last[k] * dropout_scale[k];
            o += row[k] * d;
        }
        out[j] = sigmoid(o);
    }
    return out;
}

ForecastVector RnnForecaster::forecast(const Window& window) const {
    check_window(window);
    return ForecastVector(run_forward(window.values(), {}, nullptr), window.origin());
}

RnnForecaster::Pass RnnForecaster::forward_backward(std::span<const double> inputs,
                                                    std::span<const double> targets,
                                                    std::span<const double> dropout_scale) const {
    if (inputs.size() != n_ || targets.size() != h_) {
        throw InternalError("rnn: input/target size mismatch");
    }
    if (!dropout_scale.empty() && dropout_scale.size() != hidden_) {
        throw InternalError("rnn: dropout mask size mismatch");
    }
    std::vector<double> hs;
    Pass pass;
    pass.outputs = run_forward(inputs, dropout_scale, &hs);

    const double* wh = params_.data() + hidden_;
    const double* wo = wh + hidden_ * hidden_ + hidden_;

    pass.grad.assign(params_.size(), 0.0);
    double* g_wx = pass.grad.data();
    double* g_wh = g_wx + hidden_;
    double* g_b = g_wh + hidden_ * hidden_;
    double* g_wo = g_b + hidden_;
    double* g_bo = g_wo + h_ * hidden_;

    const double* last = hs.data() + n_ * hidden_;
    const double scale = 2.0 / static_cast<double>(h_);
    std::vector<double> dh(hidden_, 0.0);
    double loss = 0.0;
    for (std::size_t j = 0; j < h_; ++j) {
        const double y = pass.outputs[j];
        const double diff = y - targets[j];
        loss += diff * diff;
        const double d_o = scale * diff * y * (1.0 - y);
        g_bo[j] = d_o;
        const double* row = wo + j * hidden_;
        double* g_row = g_wo + j * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) {
            const double mask = dropout_scale.empty() ? 1.0 : dropout_scale[k];
            g_row[k] = d_o * last[k] * mask;
            dh[k] += d_o * row[k] * mask;
        }
    }
    pass.loss = loss / static_cast<double>(h_);

    std::vector<double> da(hidden_);
    for (std::size_t t = n_; t-- > 0;) {
        const double* cur = hs.data() + (t + 1) * hidden_;
        const double* prev = hs.data() + t * hidden_;
        for (std::size_t k = 0; k < hidden_; ++k) {
            da[k] = dh[k] * (1.0 - cur[k] * cur[k]);
            g_wx[k] += da[k] * inputs[t];
            g_b[k] += da[k];
            double* g_row = g_wh + k * hidden_;
            for (std::size_t m = 0; m < hidden_; ++m) g_row[m] += da[k] * prev[m];
        }
        for (std::size_t m = 0; m < hidden_; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k < hidden_; ++k) acc += wh[k * hidden_ + m] * da[k];
            dh[m] = acc;
        }
    }
    return pass;
}

std::vector<double> RnnForecaster::sample_dropout_mask() {
    std::vector<double> mask(hidden_, 1.0);
    if (dropout_ <= 0.0) return mask;
    const double keep = 1.0 - dropout_;
    std::bernoulli_distribution keep_unit(keep);
    for (double& m : mask) m = keep_unit(rng_) ? 1.0 / keep : 0.0;
    return mask;
}

double RnnForecaster::update(const Window& window, const ForecastVector& targets, double lr) {
    check_window(window);
    check_targets(targets, lr);
    if (lr == 0.0) {
        return mse(forecast(window).values(), targets.values());
    }
    const auto mask = sample_dropout_mask();
    const Pass pass = forward_backward(window.values(), targets.values(), mask);
    SgdHyper hyper = sgd_;
    hyper.lr0 = lr;
    sgd_momentum_step(params_, pass.grad, sgd_state_, hyper);
    return pass.loss;
}

ModelState RnnForecaster::state() const {
    ModelState s;
    s.model = "rnn";
    s.layer_sizes = {n_, hidden_, h_};
    s.parameters = params_;
    s.optimizer = "sgd";
    s.moments = {sgd_state_.velocity};
    s.step = sgd_state_.step;
    return s;
}

void RnnForecaster::load_state(const ModelState& state) {
    if (state.model != "rnn") {
        throw DataError("checkpoint is for model '" + state.model + "', not 'rnn'");
    }
    if (state.layer_sizes != std::vector<std::size_t>{n_, hidden_, h_}) {
        throw DataError("rnn checkpoint layer sizes do not match this model");
    }
    if (state.parameters.size() != params_.size() || state.optimizer != "sgd" || state.moments.size() != 1 ||
        state.moments[0].size() != params_.size()) {
        throw DataError("rnn checkpoint parameter or optimizer arrays have the wrong shape");
    }
    params_ = state.parameters;
    sgd_state_.velocity = state.moments[0];
    sgd_state_.step = state.step;
}

} // namespace driftcast
