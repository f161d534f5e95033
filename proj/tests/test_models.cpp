#include <doctest.h>

#include "driftcast/error.hpp"
#include "driftcast/forecaster.hpp"
#include "driftcast/mlp.hpp"
#include "driftcast/rnn.hpp"
#include "gradcheck.hpp"

#include <filesystem>
#include <random>

using namespace driftcast;

namespace {

std::vector<double> decaying(std::size_t n, double start = 0.95, double step = 0.004) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = start - step * static_cast<double>(i);
    return v;
}

} // namespace

TEST_CASE("mlp gradient matches central differences") {
    MlpForecaster mlp(6, 4, 16, {}, 3);
    const auto x = decaying(6);
    const std::vector<double> y{0.92, 0.91, 0.905, 0.9};
    std::vector<double> grad;
    mlp.loss_and_gradient(x, y, grad);
    auto params = mlp.mutable_parameters();
    const auto loss = [&] {
        std::vector<double> scratch;
        return mlp.loss_and_gradient(x, y, scratch);
    };
    std::mt19937_64 rng(5);
    const std::size_t w1 = 16 * 6, b1 = w1 + 16, w2 = b1 + 4 * 16, end = w2 + 4;
    for (auto [lo, hi] : {std::pair{std::size_t{0}, w1}, {w1, b1}, {b1, w2}, {w2, end}}) {
        const auto r = gradcheck::check_block(params, grad, lo, hi, 20, loss, rng);
        CHECK(r.max_rel_error < 1e-4);
    }
}

TEST_CASE("rnn gradient matches central differences with a fixed dropout mask") {
    RnnForecaster rnn(5, 3, 8, 0.2, {}, 9);
    const auto mask = rnn.sample_dropout_mask();
    const auto x = decaying(5);
    const std::vector<double> y{0.9, 0.89, 0.88};
    const auto grad = rnn.forward_backward(x, y, mask).grad;
    auto params = rnn.mutable_parameters();
    const auto loss = [&] { return rnn.forward_backward(x, y, mask).loss; };
    std::mt19937_64 rng(6);
    const std::size_t wx = 8, wh = wx + 64, b = wh + 8, wo = b + 3 * 8, end = wo + 3;
    for (auto [lo, hi] : {std::pair{std::size_t{0}, wx}, {wx, wh}, {wh, b}, {b, wo}, {wo, end}}) {
        const auto r = gradcheck::check_block(params, grad, lo, hi, 20, loss, rng);
        CHECK(r.max_rel_error < 1e-3);
    }
}

TEST_CASE("forecast is deterministic and has H outputs") {
    for (const char* kind : {"mlp", "rnn", "persistence", "linear"}) {
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.n = 10;
        cfg.h = 30;
        auto model = make_forecaster(cfg);
        const Window w(decaying(10), 9);
        const auto a = model->forecast(w);
        const auto b = model->forecast(w);
        CHECK(a.size() == 30);
        CHECK(a == b);
        CHECK(a.origin() == 9);
    }
}

TEST_CASE("wrong window length is a config error") {
    MlpForecaster mlp(10, 30);
    CHECK_THROWS_AS((void)mlp.forecast(Window(decaying(8), 7)), ConfigError);
    RnnForecaster rnn(10, 30);
    CHECK_THROWS_AS((void)rnn.forecast(Window(decaying(8), 7)), ConfigError);
}

TEST_CASE("update validates targets and learning rate") {
    MlpForecaster mlp(4, 2, 8);
    const Window w(decaying(4), 3);
    CHECK_THROWS_AS(mlp.update(w, ForecastVector({0.9}, 3), 1e-3), InvalidArgument);
    CHECK_THROWS_AS(mlp.update(w, ForecastVector({0.9, 0.8}, 3), -1.0), InvalidArgument);
    CHECK_THROWS_AS(mlp.update(w, ForecastVector({0.9, 0.8}, 3), NAN), InvalidArgument);
}

TEST_CASE("zero learning rate leaves weights and optimizer state alone") {
    MlpForecaster mlp(4, 2, 8);
    RnnForecaster rnn(4, 2, 8);
    const Window w(decaying(4), 3);
    const ForecastVector t({0.9, 0.8}, 3);
    const auto mlp_before = mlp.state();
    const auto rnn_before = rnn.state();
    const double loss = mlp.update(w, t, 0.0);
    CHECK(loss > 0.0);
    (void)rnn.update(w, t, 0.0);
    CHECK(mlp.state() == mlp_before);
    CHECK(rnn.state() == rnn_before);
}

TEST_CASE("repeated updates on one pair drive the loss down") {
    const Window w(decaying(6), 5);
    const ForecastVector t({0.92, 0.91, 0.9}, 5);
    MlpForecaster mlp(6, 3, 16);
    const double first = mlp.update(w, t, 1e-2);
    double last = first;
    for (int i = 0; i < 200; ++i) last = mlp.update(w, t, 1e-2);
    CHECK(last < 0.01 * first);

    RnnForecaster rnn(6, 3, 16, 0.0);
    const double r_first = rnn.update(w, t, 0.1);
    double r_last = r_first;
    for (int i = 0; i < 300; ++i) r_last = rnn.update(w, t, 0.1);
    CHECK(r_last < 0.1 * r_first);
}

TEST_CASE("rnn outputs lie in (0, 1)") {
    RnnForecaster rnn(10, 30);
    const auto f = rnn.forecast(Window(decaying(10), 9));
    for (double v : f.values()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("same seed gives the same initial weights") {
    CHECK(MlpForecaster(10, 30, 64, {}, 1).state() == MlpForecaster(10, 30, 64, {}, 1).state());
    CHECK_FALSE(MlpForecaster(10, 30, 64, {}, 1).state() == MlpForecaster(10, 30, 64, {}, 2).state());
    CHECK(RnnForecaster(10, 30, 50, 0.2, {}, 1).state() == RnnForecaster(10, 30, 50, 0.2, {}, 1).state());
}

TEST_CASE("initial weights respect the fan-in bounds") {
    MlpForecaster mlp(10, 30, 64);
    const auto p = mlp.parameters();
    const double b1 = 1.0 / std::sqrt(10.0), b2 = 1.0 / std::sqrt(64.0);
    for (std::size_t i = 0; i < 64 * 10 + 64; ++i) CHECK(std::fabs(p[i]) <= b1);
    for (std::size_t i = 64 * 10 + 64; i < p.size(); ++i) CHECK(std::fabs(p[i]) <= b2);
}

TEST_CASE("baselines") {
    PersistenceForecaster persist(3, 4);
    const auto f = persist.forecast(Window({0.9, 0.8, 0.7}, 2));
    for (double v : f.values()) CHECK(v == 0.7);
    CHECK_FALSE(persist.trainable());

    WindowedLinearForecaster lin(3, 2);
    const auto g = lin.forecast(Window({0.9, 0.8, 0.7}, 2));
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.5));
    const auto before = lin.state();
    (void)lin.update(Window({0.9, 0.8, 0.7}, 2), ForecastVector({0.1, 0.1}, 2), 1.0);
    CHECK(lin.state() == before);
}

TEST_CASE("model state round-trips through JSON and files") {
    MlpForecaster mlp(4, 2, 8);
    (void)mlp.update(Window(decaying(4), 3), ForecastVector({0.9, 0.8}, 3), 1e-3);
    const auto s = mlp.state();
    CHECK(parse_model_state(serialize_model_state(s)) == s);

    const auto path = std::filesystem::temp_directory_path() / "driftcast_test_ckpt.json";
    save_model_state(s, path);
    MlpForecaster other(4, 2, 8, {}, 99);
    other.load_state(load_model_state(path));
    CHECK(other.state() == s);
    std::filesystem::remove(path);

    RnnForecaster rnn(4, 2, 8);
    CHECK_THROWS_AS(rnn.load_state(s), DataError);
    MlpForecaster wrong(5, 2, 8);
    CHECK_THROWS_AS(wrong.load_state(s), DataError);
    CHECK_THROWS_AS((void)parse_model_state("{not json"), DataError);
    CHECK_THROWS_AS((void)load_model_state("/nonexistent/ckpt.json"), IoError);
}

TEST_CASE("factory") {
    CHECK(model_kinds().size() == 4);
    ModelConfig cfg;
    cfg.kind = "transformer";
    CHECK_THROWS_AS((void)make_forecaster(cfg), ConfigError);
    cfg.kind = "rnn";
    CHECK(make_forecaster(cfg)->name() == "rnn");
}
