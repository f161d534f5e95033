#include "driftcast/driftcast.h"

#include "driftcast/artifacts.hpp"
#include "driftcast/error.hpp"
#include "driftcast/evaluation.hpp"
#include "driftcast/ingest.hpp"
#include "driftcast/protocol.hpp"

#include <cstring>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace driftcast;

struct dc_series {
    SoHSeries series;
};

struct dc_config {
    RunConfig config;
};

struct dc_result {
    RunResult run;
};

namespace {

/// Stream fed by dc_engine_push; samples are revealed one advance() at a time.
class PushStream final : public RevealedStream {
public:
    std::size_t revealed_count() const override { return revealed_; }
    double at(std::size_t index) const override {
        if (index >= revealed_) throw InvalidArgument("sample " + std::to_string(index) + " has not been revealed");
        return values_[index];
    }
    std::optional<double> advance() override {
        if (revealed_ >= values_.size()) return std::nullopt;
        return values_[revealed_++];
    }
    void push(double v) { values_.push_back(v); }
    [[nodiscard]] std::span<const double> revealed() const { return {values_.data(), revealed_}; }

private:
    std::vector<double> values_;
    std::size_t revealed_ = 0;
};

} // namespace

struct dc_engine {
    RunConfig config;
    std::size_t warmup = 0;
    std::unique_ptr<OnlineForecaster> model;
    PushStream stream;
    std::optional<StreamEngine> engine;
    std::optional<ForecastVector> latest;
    std::mt19937_64 rng;
};

namespace {

thread_local std::string g_last_error;

dc_status fail(dc_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

dc_status map_kind(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return DC_ERR_INVALID_ARGUMENT;
    case ErrorKind::InsufficientData: return DC_ERR_INSUFFICIENT_DATA;
    case ErrorKind::Config: return DC_ERR_CONFIG;
    case ErrorKind::Data: return DC_ERR_DATA;
    case ErrorKind::Io: return DC_ERR_IO;
    case ErrorKind::Internal: return DC_ERR_RUNTIME;
    }
    return DC_ERR_RUNTIME;
}

template <typename F>
dc_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return DC_OK;
    } catch (const Error& e) {
        return fail(map_kind(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(DC_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(DC_ERR_RUNTIME, e.what());
    }
}

void require(const void* ptr, const char* what) {
    if (!ptr) throw InvalidArgument(std::string(what) + " must not be null");
}

void copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf || cap < text.size() + 1) {
        throw Error(ErrorKind::InvalidArgument, "buffer too small");
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
}

dc_status copy_out_status(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf || cap < text.size() + 1) {
        return fail(DC_ERR_BUFFER, "buffer of " + std::to_string(cap) + " bytes too small, need " +
                                       std::to_string(text.size() + 1));
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
    g_last_error.clear();
    return DC_OK;
}

void fill_step(const StepRecord& r, dc_step* out) {
    out->increment = r.increment;
    out->index = r.index;
    out->actual = r.actual;
    out->loss = r.loss;
    out->err_inc = r.err_inc;
    out->err_pseudo = r.err_pseudo;
    out->gamma = r.gamma;
    out->eta = r.eta;
    out->update_calls = r.update_calls;
    out->wall_time_s = r.wall_time_seconds;
}

CsvSchema resolve_schema(const char* schema) {
    if (!schema || !*schema) return CsvSchema::preset("soh");
    const std::string_view name(schema);
    for (auto preset : CsvSchema::preset_names()) {
        if (preset == name) return CsvSchema::preset(name);
    }
    return CsvSchema::load(schema);
}

} // namespace

extern "C" {

const char* dc_version(void) { return "1.0.0"; }

const char* dc_last_error(void) { return g_last_error.c_str(); }

const char* dc_status_name(dc_status status) {
    switch (status) {
    case DC_OK: return "ok";
    case DC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case DC_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case DC_ERR_CONFIG: return "config";
    case DC_ERR_DATA: return "data";
    case DC_ERR_IO: return "io";
    case DC_ERR_RUNTIME: return "runtime";
    case DC_ERR_BUFFER: return "buffer";
    case DC_END_OF_STREAM: return "end-of-stream";
    }
    return "unknown";
}

// ---- numerics --------------------------------------------------------------

dc_status dc_soh_from_capacity(double q_full, double q_nominal, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = soh_from_capacity(q_full, q_nominal);
    });
}

dc_status dc_pseudo_targets(const double* window, size_t n, size_t h, dc_pseudo_mode mode, double* out) {
    return guarded([&] {
        require(window, "window");
        require(out, "out");
        const PseudoMode m = mode == DC_PSEUDO_MEAN_REANCHOR ? PseudoMode::MeanReanchor : PseudoMode::Literal;
        const Window w(std::vector<double>(window, window + n), n == 0 ? 0 : n - 1);
        const PseudoTargets z = generate_pseudo_targets(w, h, m);
        std::copy(z.values.begin(), z.values.end(), out);
    });
}

dc_status dc_gamma_lr(double err_inc, double err_pseudo, double eta0, double* out) {
    return guarded([&] {
        require(out, "out");
        if (err_inc < 0.0 || err_pseudo < 0.0 || !(eta0 > 0.0)) {
            throw InvalidArgument("errors must be >= 0 and eta0 > 0");
        }
        *out = gamma_lr(err_inc, err_pseudo, eta0);
    });
}

dc_status dc_rmse(const double* pred, const double* actual, size_t len, double* out) {
    return guarded([&] {
        require(pred, "pred");
        require(actual, "actual");
        require(out, "out");
        *out = rmse({pred, len}, {actual, len});
    });
}

dc_status dc_mae(const double* pred, const double* actual, size_t len, double* out) {
    return guarded([&] {
        require(pred, "pred");
        require(actual, "actual");
        require(out, "out");
        *out = mae({pred, len}, {actual, len});
    });
}

// ---- series ----------------------------------------------------------------

dc_status dc_series_load_csv(const char* path, const char* schema, double nominal_override, dc_series** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        CsvSchema s = resolve_schema(schema);
        if (nominal_override > 0.0) s.nominal_capacity = nominal_override;
        *out = new dc_series{load_cycle_capacity_csv(path, s)};
    });
}

dc_status dc_series_from_values(const double* values, size_t len, double nominal, const char* label,
                                dc_series** out) {
    return guarded([&] {
        require(values, "values");
        require(out, "out");
        *out = new dc_series{SoHSeries::from_values(std::vector<double>(values, values + len),
                                                    nominal > 0.0 ? nominal : 1.0, label ? label : "")};
    });
}

dc_status dc_series_synth_preset(const char* preset, int64_t seed_or_negative, dc_series** out) {
    return guarded([&] {
        require(preset, "preset");
        require(out, "out");
        std::optional<std::uint64_t> seed;
        if (seed_or_negative >= 0) seed = static_cast<std::uint64_t>(seed_or_negative);
        *out = new dc_series{synth_preset(preset, seed)};
    });
}

dc_status dc_series_write_csv(const dc_series* series, const char* path, const char* note) {
    return guarded([&] {
        require(series, "series");
        require(path, "path");
        write_series_csv(series->series, path, note ? note : "");
    });
}

size_t dc_series_length(const dc_series* series) { return series ? series->series.size() : 0; }

dc_status dc_series_values(const dc_series* series, double* out, size_t capacity) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        const auto v = series->series.values();
        if (capacity < v.size()) throw InvalidArgument("output capacity smaller than series length");
        std::copy(v.begin(), v.end(), out);
    });
}

dc_status dc_series_label(const dc_series* series, char* buf, size_t cap, size_t* needed) {
    if (!series) return fail(DC_ERR_INVALID_ARGUMENT, "series must not be null");
    return copy_out_status(series->series.label(), buf, cap, needed);
}

void dc_series_destroy(dc_series* series) { delete series; }

size_t dc_preset_count(void) { return preset_profiles().size(); }

const char* dc_preset_name(size_t index) {
    const auto presets = preset_profiles();
    return index < presets.size() ? presets[index].name.data() : nullptr;
}

const char* dc_preset_regime(size_t index) {
    const auto presets = preset_profiles();
    return index < presets.size() ? presets[index].regime.data() : nullptr;
}

// ---- configuration ---------------------------------------------------------

dc_status dc_config_create(dc_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new dc_config{};
    });
}

dc_status dc_config_load(const char* path, dc_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new dc_config{RunConfig::load(path)};
    });
}

dc_status dc_config_set(dc_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        config->config.set(key, value);
    });
}

dc_status dc_config_get(const dc_config* config, const char* key, char* buf, size_t cap, size_t* needed) {
    std::string text;
    const dc_status st = guarded([&] {
        require(config, "config");
        require(key, "key");
        text = config->config.get(key);
    });
    if (st != DC_OK) return st;
    return copy_out_status(text, buf, cap, needed);
}

dc_status dc_config_format(const dc_config* config, char* buf, size_t cap, size_t* needed) {
    if (!config) return fail(DC_ERR_INVALID_ARGUMENT, "config must not be null");
    return copy_out_status(config->config.format(), buf, cap, needed);
}

dc_status dc_config_validate(const dc_config* config) {
    return guarded([&] {
        require(config, "config");
        config->config.validate();
    });
}

void dc_config_destroy(dc_config* config) { delete config; }

// ---- runs ------------------------------------------------------------------

dc_status dc_run(const dc_config* config, const dc_series* series, const dc_series* pretrain, dc_result** out) {
    return guarded([&] {
        require(config, "config");
        require(series, "series");
        require(out, "out");
        *out = new dc_result{run_stream(config->config, series->series, pretrain ? &pretrain->series : nullptr)};
    });
}

dc_status dc_result_summary(const dc_result* result, const dc_series* series, dc_summary* out) {
    return guarded([&] {
        require(result, "result");
        require(series, "series");
        require(out, "out");
        const MetricsReport m = posthoc_evaluate(result->run, series->series);
        *out = dc_summary{m.rmse,
                          m.mae,
                          m.mae_percent,
                          m.hstep_rmse,
                          m.hstep_mae_percent,
                          m.timing.mean_s,
                          m.timing.median_s,
                          m.increments,
                          m.updates,
                          m.pairs,
                          result->run.config.n,
                          result->run.config.h,
                          result->run.config.seed};
    });
}

dc_status dc_result_write(const dc_result* result, const dc_series* series, const char* out_dir) {
    return guarded([&] {
        require(result, "result");
        require(series, "series");
        require(out_dir, "out_dir");
        write_run_outputs(result->run, posthoc_evaluate(result->run, series->series), out_dir);
    });
}

size_t dc_result_step_count(const dc_result* result) { return result ? result->run.records.size() : 0; }

dc_status dc_result_step(const dc_result* result, size_t i, dc_step* out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        if (i >= result->run.records.size()) throw InvalidArgument("step index out of range");
        fill_step(result->run.records[i], out);
    });
}

dc_status dc_result_forecast(const dc_result* result, size_t i, double* out, size_t capacity) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        if (i >= result->run.records.size()) throw InvalidArgument("step index out of range");
        const auto f = result->run.records[i].forecast.values();
        if (capacity < f.size()) throw InvalidArgument("output capacity smaller than horizon");
        std::copy(f.begin(), f.end(), out);
    });
}

dc_status dc_result_checkpoint(const dc_result* result, const char* path) {
    return guarded([&] {
        require(result, "result");
        require(path, "path");
        save_model_state(result->run.final_state, path);
    });
}

void dc_result_destroy(dc_result* result) { delete result; }

dc_status dc_sweep(const dc_config* config, const dc_series* series, const dc_series* pretrain, const char* axis,
                   const size_t* grid, size_t grid_len, const char* const* models, size_t model_count,
                   unsigned jobs, const char* out_csv, size_t* failed_cells) {
    return guarded([&] {
        require(config, "config");
        require(series, "series");
        require(axis, "axis");
        require(out_csv, "out_csv");
        if (grid_len == 0 || !grid) throw ConfigError("sweep grid is empty");
        if (model_count == 0 || !models) throw ConfigError("sweep needs at least one model");
        std::vector<std::string> names;
        for (size_t i = 0; i < model_count; ++i) {
            require(models[i], "model id");
            const auto kinds = model_kinds();
            if (std::find(kinds.begin(), kinds.end(), std::string_view(models[i])) == kinds.end()) {
                throw ConfigError(std::string("unknown model '") + models[i] + "'");
            }
            names.emplace_back(models[i]);
        }
        const SweepTable table = sweep(config->config, parse_sweep_axis(axis), {grid, grid_len}, names,
                                       series->series, jobs, pretrain ? &pretrain->series : nullptr);
        write_text_file(out_csv, sweep_csv(table));
        if (failed_cells) {
            *failed_cells = static_cast<size_t>(
                std::count_if(table.rows.begin(), table.rows.end(), [](const SweepRow& r) { return !r.ok; }));
        }
    });
}

dc_status dc_report_merge(const char* const* runs, size_t count, const char* out_path, size_t* rows,
                          size_t* warnings) {
    return guarded([&] {
        require(out_path, "out_path");
        if (count == 0 || !runs) throw ConfigError("report needs at least one run");
        std::vector<std::filesystem::path> paths;
        for (size_t i = 0; i < count; ++i) {
            require(runs[i], "run path");
            paths.emplace_back(runs[i]);
        }
        const auto merged = merge_reports(paths);
        write_text_file(out_path, comparison_csv(merged));
        if (rows) *rows = merged.size();
        if (warnings) {
            *warnings = static_cast<size_t>(std::count_if(merged.begin(), merged.end(),
                                                          [](const ComparisonRow& r) { return !r.warning.empty(); }));
        }
    });
}

// ---- incremental engine ----------------------------------------------------

dc_status dc_engine_create(const dc_config* config, size_t warmup_samples, dc_engine** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        config->config.validate();
        if (warmup_samples < config->config.n) {
            throw InsufficientData("warm-up must cover at least n = " + std::to_string(config->config.n) +
                                   " samples");
        }
        auto engine = std::make_unique<dc_engine>();
        engine->config = config->config;
        engine->warmup = warmup_samples;
        engine->model = make_forecaster(engine->config.resolved_model());
        engine->rng.seed(engine->config.seed);
        *out = engine.release();
    });
}

dc_status dc_engine_push(dc_engine* engine, double soh, int* stepped, dc_step* out) {
    return guarded([&] {
        require(engine, "engine");
        if (stepped) *stepped = 0;
        if (!std::isfinite(soh) || soh <= 0.0) throw InvalidArgument("SoH samples must be finite and positive");
        engine->stream.push(soh);
        if (!engine->engine) {
            (void)engine->stream.advance();
            if (engine->stream.revealed_count() < engine->warmup) return;
            const auto prefix = engine->stream.revealed();
            if (prefix.size() >= engine->config.n + engine->config.h) {
                warmup_train(*engine->model, prefix, engine->config, engine->rng);
            }
            engine->engine.emplace(engine->config, *engine->model);
            engine->engine->start(engine->stream);
            return;
        }
        auto record = engine->engine->step(engine->stream);
        if (!record) throw InternalError("pushed sample was not consumed");
        engine->latest = record->forecast;
        if (stepped) *stepped = 1;
        if (out) fill_step(*record, out);
    });
}

dc_status dc_engine_forecast(const dc_engine* engine, double* out, size_t capacity) {
    return guarded([&] {
        require(engine, "engine");
        require(out, "out");
        if (!engine->latest) throw InsufficientData("no forecast issued yet");
        const auto f = engine->latest->values();
        if (capacity < f.size()) throw InvalidArgument("output capacity smaller than horizon");
        std::copy(f.begin(), f.end(), out);
    });
}

dc_status dc_engine_save(const dc_engine* engine, const char* path) {
    return guarded([&] {
        require(engine, "engine");
        require(path, "path");
        save_model_state(engine->model->state(), path);
    });
}

dc_status dc_engine_load(dc_engine* engine, const char* path) {
    return guarded([&] {
        require(engine, "engine");
        require(path, "path");
        engine->model->load_state(load_model_state(path));
    });
}

void dc_engine_destroy(dc_engine* engine) { delete engine; }

} // extern "C"
