#include <doctest.h>

#include <driftcast/driftcast.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

const std::string kFixtures = DRIFTCAST_FIXTURES;
const std::string kSchemas = DRIFTCAST_SCHEMAS;

std::filesystem::path scratch(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / "driftcast_capi";
    std::filesystem::create_directories(dir);
    return dir / name;
}

dc_config* small_config(const char* strategy = "pseudo-gamma") {
    dc_config* c = nullptr;
    REQUIRE(dc_config_create(&c) == DC_OK);
    REQUIRE(dc_config_set(c, "h", "5") == DC_OK);
    REQUIRE(dc_config_set(c, "mlp_hidden", "8") == DC_OK);
    REQUIRE(dc_config_set(c, "warmup_epochs", "2") == DC_OK);
    REQUIRE(dc_config_set(c, "record_timing", "false") == DC_OK);
    REQUIRE(dc_config_set(c, "strategy", strategy) == DC_OK);
    return c;
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(dc_version()) > 0);
    CHECK(std::string(dc_status_name(DC_ERR_DATA)) == "data");
    CHECK(std::string(dc_status_name(DC_OK)) == "ok");
}

TEST_CASE("numeric entry points") {
    const double window[4] = {1.0, 0.99, 0.98, 0.97};
    double z[3];
    REQUIRE(dc_pseudo_targets(window, 4, 3, DC_PSEUDO_LITERAL, z) == DC_OK);
    CHECK(z[0] == doctest::Approx(0.96));
    CHECK(z[2] == doctest::Approx(0.94));
    CHECK(dc_pseudo_targets(window, 1, 3, DC_PSEUDO_LITERAL, z) == DC_ERR_INVALID_ARGUMENT);
    CHECK(dc_pseudo_targets(nullptr, 4, 3, DC_PSEUDO_LITERAL, z) == DC_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(dc_last_error()) > 0);

    double eta = 0;
    REQUIRE(dc_gamma_lr(0.02, 0.01, 1e-5, &eta) == DC_OK);
    CHECK(eta == 1e-5);
    REQUIRE(dc_gamma_lr(0.005, 0.01, 1e-5, &eta) == DC_OK);
    CHECK(eta == doctest::Approx(5e-7));
    CHECK(dc_gamma_lr(-1.0, 0.01, 1e-5, &eta) == DC_ERR_INVALID_ARGUMENT);

    double soh = 0;
    REQUIRE(dc_soh_from_capacity(1.8, 2.0, &soh) == DC_OK);
    CHECK(soh == doctest::Approx(0.9));
    CHECK(dc_soh_from_capacity(1.0, 0.0, &soh) == DC_ERR_INVALID_ARGUMENT);

    const double p[2] = {0.0, 0.0}, a[2] = {3.0, 4.0};
    double r = 0;
    REQUIRE(dc_rmse(p, a, 2, &r) == DC_OK);
    CHECK(r == doctest::Approx(std::sqrt(12.5)));
    REQUIRE(dc_mae(p, a, 2, &r) == DC_OK);
    CHECK(r == 3.5);
}

TEST_CASE("series handles") {
    dc_series* s = nullptr;
    REQUIRE(dc_series_load_csv((kFixtures + "/nasa_small.csv").c_str(), "nasa", 0.0, &s) == DC_OK);
    CHECK(dc_series_length(s) == 12);
    std::vector<double> values(12);
    REQUIRE(dc_series_values(s, values.data(), values.size()) == DC_OK);
    CHECK(values[0] == doctest::Approx(1.8565 / 2.0));
    CHECK(dc_series_values(s, values.data(), 3) == DC_ERR_INVALID_ARGUMENT);

    char small[4];
    std::size_t needed = 0;
    CHECK(dc_series_label(s, small, sizeof small, &needed) == DC_ERR_BUFFER);
    CHECK(needed == std::strlen("nasa_small") + 1);
    std::string label(needed, '\0');
    REQUIRE(dc_series_label(s, label.data(), label.size(), &needed) == DC_OK);
    CHECK(std::string(label.c_str()) == "nasa_small");
    dc_series_destroy(s);

    REQUIRE(dc_series_load_csv((kFixtures + "/nasa_small.csv").c_str(), (kSchemas + "/nasa.schema").c_str(), 1.0,
                               &s) == DC_OK);
    REQUIRE(dc_series_values(s, values.data(), values.size()) == DC_OK);
    CHECK(values[0] == doctest::Approx(1.8565));
    dc_series_destroy(s);

    CHECK(dc_series_load_csv((kFixtures + "/missing.csv").c_str(), "nasa", 0.0, &s) == DC_ERR_IO);
    CHECK(dc_series_load_csv((kFixtures + "/bad_cell.csv").c_str(), "nasa", 0.0, &s) == DC_ERR_DATA);
    CHECK(dc_series_load_csv((kFixtures + "/nasa_small.csv").c_str(), "oxford", 0.0, &s) == DC_ERR_CONFIG);

    REQUIRE(dc_series_synth_preset("smooth-short", -1, &s) == DC_OK);
    CHECK(dc_series_length(s) == 557);
    dc_series_destroy(s);
    CHECK(dc_series_synth_preset("bogus", 1, &s) == DC_ERR_CONFIG);
    CHECK(std::string(dc_last_error()).find("smooth-short") != std::string::npos);

    CHECK(dc_preset_count() == 4);
    CHECK(std::string(dc_preset_name(2)) == "smooth-long");
    CHECK(dc_preset_name(9) == nullptr);

    const double v[3] = {1.0, 0.9, 0.8};
    REQUIRE(dc_series_from_values(v, 3, 1.0, "abc", &s) == DC_OK);
    const auto path = scratch("series.csv");
    REQUIRE(dc_series_write_csv(s, path.string().c_str(), "seed=1") == DC_OK);
    dc_series_destroy(s);
    REQUIRE(dc_series_load_csv(path.string().c_str(), "soh", 0.0, &s) == DC_OK);
    CHECK(dc_series_length(s) == 3);
    dc_series_destroy(s);
    dc_series_destroy(nullptr);
}

TEST_CASE("config handles") {
    dc_config* c = nullptr;
    REQUIRE(dc_config_create(&c) == DC_OK);
    char buf[256];
    std::size_t needed = 0;
    REQUIRE(dc_config_get(c, "h", buf, sizeof buf, &needed) == DC_OK);
    CHECK(std::string(buf) == "30");
    CHECK(dc_config_set(c, "n", "x") == DC_ERR_CONFIG);
    CHECK(dc_config_set(c, "nope", "1") == DC_ERR_CONFIG);
    CHECK(dc_config_get(c, "nope", buf, sizeof buf, &needed) == DC_ERR_CONFIG);
    REQUIRE(dc_config_set(c, "n", "1") == DC_OK);
    CHECK(dc_config_validate(c) == DC_ERR_CONFIG);
    CHECK(dc_config_format(c, buf, 4, &needed) == DC_ERR_BUFFER);
    CHECK(needed > 4);
    dc_config_destroy(c);
    CHECK(dc_config_load("/nonexistent/x.conf", &c) == DC_ERR_CONFIG);
}

TEST_CASE("run, inspect and persist a result") {
    dc_config* c = small_config();
    dc_series* s = nullptr;
    REQUIRE(dc_series_synth_preset("smooth-short", -1, &s) == DC_OK);
    dc_result* r = nullptr;
    REQUIRE(dc_run(c, s, nullptr, &r) == DC_OK);
    CHECK(dc_result_step_count(r) == 557 - 139);

    dc_summary sum{};
    REQUIRE(dc_result_summary(r, s, &sum) == DC_OK);
    CHECK(sum.h == 5);
    CHECK(sum.n == 10);
    CHECK(sum.seed == 42);
    CHECK(sum.increments == 418);
    CHECK(sum.rmse > 0.0);

    dc_step step{};
    REQUIRE(dc_result_step(r, 0, &step) == DC_OK);
    CHECK(step.index == 139);
    CHECK(step.gamma == 1.0);
    CHECK(dc_result_step(r, 10000, &step) == DC_ERR_INVALID_ARGUMENT);
    double f[5];
    REQUIRE(dc_result_forecast(r, 0, f, 5) == DC_OK);
    CHECK(dc_result_forecast(r, 0, f, 2) == DC_ERR_INVALID_ARGUMENT);

    const auto dir = scratch("run");
    REQUIRE(dc_result_write(r, s, dir.string().c_str()) == DC_OK);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "traces.csv"));
    REQUIRE(dc_result_checkpoint(r, (dir / "model.json").string().c_str()) == DC_OK);

    const std::string run_dir = dir.string();
    const char* runs[] = {run_dir.c_str()};
    std::size_t rows = 0, warnings = 0;
    REQUIRE(dc_report_merge(runs, 1, (dir / "cmp.csv").string().c_str(), &rows, &warnings) == DC_OK);
    CHECK(rows == 1);
    CHECK(warnings == 0);

    dc_result_destroy(r);
    dc_series_destroy(s);
    dc_config_destroy(c);
}

TEST_CASE("engine fed one sample at a time reproduces a whole run") {
    for (const char* strategy : {"pseudo-gamma", "delayed"}) {
        CAPTURE(strategy);
        dc_config* c = small_config(strategy);
        dc_series* s = nullptr;
        REQUIRE(dc_series_synth_preset("irregular-short", -1, &s) == DC_OK);
        const std::size_t len = dc_series_length(s);
        std::vector<double> values(len);
        REQUIRE(dc_series_values(s, values.data(), len) == DC_OK);
        dc_result* r = nullptr;
        REQUIRE(dc_run(c, s, nullptr, &r) == DC_OK);

        const std::size_t warmup = len / 4;
        dc_engine* e = nullptr;
        REQUIRE(dc_engine_create(c, warmup, &e) == DC_OK);
        double f[5];
        CHECK(dc_engine_forecast(e, f, 5) == DC_ERR_INSUFFICIENT_DATA);
        std::size_t k = 0;
        for (double v : values) {
            int stepped = 0;
            dc_step got{};
            REQUIRE(dc_engine_push(e, v, &stepped, &got) == DC_OK);
            if (!stepped) continue;
            dc_step want{};
            REQUIRE(dc_result_step(r, k, &want) == DC_OK);
            CHECK(got.index == want.index);
            CHECK(got.loss == want.loss);
            CHECK(got.eta == want.eta);
            double g[5], w[5];
            REQUIRE(dc_engine_forecast(e, g, 5) == DC_OK);
            REQUIRE(dc_result_forecast(r, k, w, 5) == DC_OK);
            CHECK(std::memcmp(g, w, sizeof g) == 0);
            ++k;
        }
        CHECK(k == dc_result_step_count(r));

        const auto ckpt = scratch("engine.json");
        REQUIRE(dc_engine_save(e, ckpt.string().c_str()) == DC_OK);
        dc_engine* fresh = nullptr;
        REQUIRE(dc_engine_create(c, warmup, &fresh) == DC_OK);
        REQUIRE(dc_engine_load(fresh, ckpt.string().c_str()) == DC_OK);
        CHECK(dc_engine_push(e, NAN, nullptr, nullptr) == DC_ERR_INVALID_ARGUMENT);

        dc_engine_destroy(fresh);
        dc_engine_destroy(e);
        dc_result_destroy(r);
        dc_series_destroy(s);
        dc_config_destroy(c);
    }
}

TEST_CASE("sweep through the C API") {
    dc_config* c = small_config();
    dc_series* s = nullptr;
    REQUIRE(dc_series_synth_preset("smooth-short", -1, &s) == DC_OK);
    const std::size_t grid[] = {2, 4};
    const char* models[] = {"linear", "persistence"};
    const auto out = scratch("sweep.csv");
    std::size_t failed = 99;
    REQUIRE(dc_sweep(c, s, nullptr, "h", grid, 2, models, 2, 2, out.string().c_str(), &failed) == DC_OK);
    CHECK(failed == 0);
    CHECK(std::filesystem::exists(out));
    CHECK(dc_sweep(c, s, nullptr, "h", grid, 0, models, 2, 1, out.string().c_str(), &failed) == DC_ERR_CONFIG);
    const char* bad_models[] = {"lstm"};
    CHECK(dc_sweep(c, s, nullptr, "h", grid, 2, bad_models, 1, 1, out.string().c_str(), &failed) == DC_ERR_CONFIG);
    CHECK(dc_sweep(c, s, nullptr, "q", grid, 2, models, 2, 1, out.string().c_str(), &failed) == DC_ERR_CONFIG);
    dc_series_destroy(s);
    dc_config_destroy(c);
}
