// driftcast command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 config/usage error, 2 data error, 3 runtime failure.

#include <driftcast/driftcast.h>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

/// Carries an exit code out of a subcommand.
struct Failure {
    int code;
    std::string message;
};

int exit_code_for(dc_status status) {
    switch (status) {
    case DC_OK: return kExitOk;
    case DC_ERR_CONFIG:
    case DC_ERR_INVALID_ARGUMENT:
    case DC_ERR_BUFFER: return kExitConfig;
    case DC_ERR_DATA:
    case DC_ERR_INSUFFICIENT_DATA: return kExitData;
    default: return kExitRuntime;
    }
}

void check(dc_status status, std::optional<int> force_code = std::nullopt) {
    if (status == DC_OK) return;
    throw Failure{force_code.value_or(exit_code_for(status)), dc_last_error()};
}

struct SeriesDeleter {
    void operator()(dc_series* s) const { dc_series_destroy(s); }
};
struct ConfigDeleter {
    void operator()(dc_config* c) const { dc_config_destroy(c); }
};
struct ResultDeleter {
    void operator()(dc_result* r) const { dc_result_destroy(r); }
};
using SeriesPtr = std::unique_ptr<dc_series, SeriesDeleter>;
using ConfigPtr = std::unique_ptr<dc_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<dc_result, ResultDeleter>;

std::string config_value(const dc_config* config, const char* key) {
    std::size_t needed = 0;
    std::string buf(64, '\0');
    dc_status st = dc_config_get(config, key, buf.data(), buf.size(), &needed);
    if (st == DC_ERR_BUFFER) {
        buf.assign(needed, '\0');
        st = dc_config_get(config, key, buf.data(), buf.size(), &needed);
    }
    check(st);
    buf.resize(needed - 1);
    return buf;
}

/// Flags shared by run and sweep. Empty optionals leave the config untouched.
struct CommonOptions {
    std::string config_path;
    std::string data_path;
    std::string preset;
    std::string schema = "soh";
    double nominal = 0.0;
    std::string pretrain_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<std::string> model;
    std::optional<std::size_t> n;
    std::optional<std::size_t> h;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Config file (key = value lines)");
    auto* data = cmd->add_option("--data", o.data_path, "Cycle/capacity CSV to stream");
    auto* preset = cmd->add_option("--preset", o.preset, "Synthetic preset to stream instead of --data");
    data->excludes(preset);
    cmd->add_option("--schema", o.schema, "CSV schema preset (nasa|mit|calce|soh) or schema file")
        ->capture_default_str();
    cmd->add_option("--nominal", o.nominal, "Override the schema's nominal capacity");
    cmd->add_option("--pretrain", o.pretrain_path, "Series to pretrain on (overrides pretrain_series)");
    cmd->add_option("--seed", o.seed, "Model / shuffling seed");
    cmd->add_option("--strategy", o.strategy, "pseudo | pseudo-gamma | delayed | frozen");
    cmd->add_option("--model", o.model, "mlp | rnn | persistence | linear");
    cmd->add_option("--n", o.n, "Input length");
    cmd->add_option("--h", o.h, "Forecast length");
    cmd->add_option("--set", o.sets, "Extra config override key=value (repeatable)");
}

ConfigPtr build_config(const CommonOptions& o) {
    dc_config* raw = nullptr;
    if (!o.config_path.empty()) {
        check(dc_config_load(o.config_path.c_str(), &raw), kExitConfig);
    } else {
        check(dc_config_create(&raw));
    }
    ConfigPtr config(raw);
    auto set = [&](const char* key, const std::string& value) {
        check(dc_config_set(config.get(), key, value.c_str()), kExitConfig);
    };
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Failure{kExitConfig, "--set expects key=value, got '" + kv + "'"};
        set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    if (o.seed) set("seed", std::to_string(*o.seed));
    if (o.strategy) set("strategy", *o.strategy);
    if (o.model) set("model", *o.model);
    if (o.n) set("n", std::to_string(*o.n));
    if (o.h) set("h", std::to_string(*o.h));
    if (!o.pretrain_path.empty()) set("pretrain_series", o.pretrain_path);
    check(dc_config_validate(config.get()), kExitConfig);
    return config;
}

SeriesPtr load_series(const CommonOptions& o) {
    dc_series* raw = nullptr;
    if (!o.preset.empty()) {
        // Preset data keeps its own seed so model seeds can vary over fixed data.
        check(dc_series_synth_preset(o.preset.c_str(), -1, &raw));
    } else if (!o.data_path.empty()) {
        const dc_status st = dc_series_load_csv(o.data_path.c_str(), o.schema.c_str(), o.nominal, &raw);
        if (st != DC_OK) check(st, st == DC_ERR_CONFIG ? kExitConfig : kExitData);
    } else {
        throw Failure{kExitConfig, "one of --data or --preset is required"};
    }
    return SeriesPtr(raw);
}

SeriesPtr load_pretrain(const dc_config* config, const CommonOptions& o) {
    const std::string path = config_value(config, "pretrain_series");
    if (path.empty()) return nullptr;
    dc_series* raw = nullptr;
    const dc_status st = dc_series_load_csv(path.c_str(), o.schema.c_str(), o.nominal, &raw);
    if (st != DC_OK) check(st, st == DC_ERR_CONFIG ? kExitConfig : kExitData);
    return SeriesPtr(raw);
}

int cmd_run(const CommonOptions& o, const std::string& out_dir) {
    auto config = build_config(o);
    auto series = load_series(o);
    auto pretrain = load_pretrain(config.get(), o);

    dc_result* raw = nullptr;
    check(dc_run(config.get(), series.get(), pretrain.get(), &raw));
    ResultPtr result(raw);
    check(dc_result_write(result.get(), series.get(), out_dir.c_str()), kExitRuntime);

    dc_summary s{};
    check(dc_result_summary(result.get(), series.get(), &s));
    std::printf("RMSE %.6g  MAE%% %.6g  mean s/it %.6g  (n=%zu h=%zu seed=%llu increments=%zu updates=%zu)\n",
                s.rmse, s.mae_percent, s.mean_time_s, s.n, s.h, static_cast<unsigned long long>(s.seed),
                s.increments, s.updates);
    std::printf("wrote %s\n", (std::filesystem::path(out_dir) / "report.json").string().c_str());
    return kExitOk;
}

std::optional<std::size_t> parse_size(std::string_view text) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        const auto stop = pos == std::string_view::npos ? text.size() : pos;
        std::string part(text.substr(start, stop - start));
        if (!part.empty()) parts.push_back(std::move(part));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

/// "5,10,20" or "2..20" with a step from ":k" or --step.
std::vector<std::size_t> parse_grid(const std::string& text, std::size_t step) {
    std::vector<std::size_t> grid;
    const auto bad = [&] { return Failure{kExitConfig, "invalid --grid '" + text + "'"}; };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        std::string hi_text = text.substr(dots + 2);
        if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
            const auto s = parse_size(std::string_view(hi_text).substr(colon + 1));
            if (!s) throw bad();
            step = *s;
            hi_text.resize(colon);
        }
        const auto lo = parse_size(std::string_view(text).substr(0, dots));
        const auto hi = parse_size(hi_text);
        if (!lo || !hi || step == 0 || *lo > *hi) throw bad();
        for (std::size_t v = *lo; v <= *hi; v += step) grid.push_back(v);
        return grid;
    }
    for (const auto& part : split(text, ',')) {
        const auto v = parse_size(part);
        if (!v) throw bad();
        grid.push_back(*v);
    }
    return grid;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis, const std::string& grid_text, std::size_t step,
              const std::string& models_text, unsigned jobs, const std::string& out_dir) {
    const auto grid = parse_grid(grid_text, step);
    if (grid.empty()) throw Failure{kExitConfig, "--grid is empty"};
    if (axis != "n" && axis != "h") throw Failure{kExitConfig, "--axis must be n or h"};

    auto config = build_config(o);
    std::vector<std::string> models = split(models_text, ',');
    if (models.empty()) models.push_back(config_value(config.get(), "model"));
    std::vector<const char*> model_ptrs;
    for (const auto& m : models) model_ptrs.push_back(m.c_str());

    auto series = load_series(o);
    auto pretrain = load_pretrain(config.get(), o);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Failure{kExitRuntime, "cannot create " + out_dir + ": " + ec.message()};
    const std::string out_csv = (std::filesystem::path(out_dir) / "sweep.csv").string();

    std::size_t failed = 0;
    check(dc_sweep(config.get(), series.get(), pretrain.get(), axis.c_str(), grid.data(), grid.size(),
                   model_ptrs.data(), model_ptrs.size(), jobs, out_csv.c_str(), &failed));
    const std::size_t cells = grid.size() * models.size();
    std::printf("%zu cells (%zu values x %zu models), %zu failed; seed=%s\n", cells, grid.size(), models.size(),
                failed, config_value(config.get(), "seed").c_str());
    std::printf("wrote %s\n", out_csv.c_str());
    if (failed == cells) throw Failure{kExitRuntime, "every sweep cell failed; see the status column"};
    if (failed > 0) std::fprintf(stderr, "warning: %zu sweep cells failed; see the status column\n", failed);
    return kExitOk;
}

int cmd_synth(const std::string& preset, std::uint64_t seed, const std::string& out_path, bool list) {
    const std::size_t count = dc_preset_count();
    if (list) {
        for (std::size_t i = 0; i < count; ++i) std::printf("%s\t%s\n", dc_preset_name(i), dc_preset_regime(i));
        return kExitOk;
    }
    if (preset.empty() || out_path.empty()) throw Failure{kExitConfig, "synth needs --preset and --out"};

    dc_series* raw = nullptr;
    check(dc_series_synth_preset(preset.c_str(), static_cast<std::int64_t>(seed), &raw), kExitConfig);
    SeriesPtr series(raw);
    const std::string note = "seed=" + std::to_string(seed) + " preset=" + preset;
    check(dc_series_write_csv(series.get(), out_path.c_str(), note.c_str()), kExitRuntime);

    const char* regime = "";
    for (std::size_t i = 0; i < count; ++i) {
        if (preset == dc_preset_name(i)) regime = dc_preset_regime(i);
    }
    std::printf("%s: %zu cycles, regime %s, seed %llu -> %s\n", preset.c_str(), dc_series_length(series.get()),
                regime, static_cast<unsigned long long>(seed), out_path.c_str());
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out_path) {
    std::vector<const char*> ptrs;
    for (const auto& r : runs) ptrs.push_back(r.c_str());
    std::size_t rows = 0;
    std::size_t warnings = 0;
    const dc_status st = dc_report_merge(ptrs.data(), ptrs.size(), out_path.c_str(), &rows, &warnings);
    if (st != DC_OK) check(st, st == DC_ERR_IO || st == DC_ERR_DATA ? kExitData : exit_code_for(st));
    std::printf("%zu rows -> %s\n", rows, out_path.c_str());
    if (warnings > 0) std::fprintf(stderr, "warning: %zu runs differ in n/h from the first run\n", warnings);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftcast: online multi-horizon SoH forecasting with pseudo-target updates"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", dc_version());
    app.require_subcommand(1, 1);

    CommonOptions run_opts;
    std::string run_out;
    auto* run = app.add_subcommand("run", "Stream one series and write report.json + traces.csv");
    add_common(run, run_opts);
    run->add_option("--out", run_out, "Output directory")->required();

    CommonOptions sweep_opts;
    std::string axis;
    std::string grid;
    std::size_t step = 1;
    std::string models;
    unsigned jobs = 1;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Sweep n or h over a grid and write sweep.csv");
    add_common(sweep, sweep_opts);
    sweep->add_option("--axis", axis, "n or h")->required();
    sweep->add_option("--grid", grid, "Comma list (5,10,20) or range (2..20, 2..20:2)")->required();
    sweep->add_option("--step", step, "Step for range grids")->capture_default_str();
    sweep->add_option("--models", models, "Comma-separated model ids (default: config model)");
    sweep->add_option("--jobs", jobs, "Parallel cells")->capture_default_str()->check(CLI::Range(1u, 256u));
    sweep->add_option("--out", sweep_out, "Output directory")->required();

    std::string synth_preset;
    std::uint64_t synth_seed = 42;
    std::string synth_out;
    bool synth_list = false;
    auto* synth = app.add_subcommand("synth", "Write a synthetic cycle/SoH CSV");
    synth->add_option("--preset", synth_preset, "Preset name");
    synth->add_option("--seed", synth_seed, "Noise/spike seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output CSV path");
    synth->add_flag("--list", synth_list, "List presets and exit");

    std::vector<std::string> report_runs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Merge run reports into one comparison CSV");
    report->add_option("runs", report_runs, "Run directories or report.json files")->required();
    report->add_option("--out", report_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts, run_out);
        if (*sweep) return cmd_sweep(sweep_opts, axis, grid, step, models, jobs, sweep_out);
        if (*synth) return cmd_synth(synth_preset, synth_seed, synth_out, synth_list);
        if (*report) return cmd_report(report_runs, report_out);
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s\n", f.message.c_str());
        return f.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;
}
