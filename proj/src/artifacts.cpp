#include "driftcast/artifacts.hpp"

#include "driftcast/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace driftcast {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string{}; }

ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

} // namespace

std::string traces_csv(const RunResult& run) {
    const std::size_t h = run.config.h;
    std::map<std::size_t, const StepRecord*> by_origin;
    for (const auto& r : run.records) by_origin[r.forecast.origin()] = &r;

    std::string out = fmt::format("# seed={} model={} strategy={}\n", run.config.seed, run.config.model.kind,
                                  to_string(run.config.strategy));
    out += "increment,actual,next_step_pred,hstep_pred,abs_err_next,gamma,eta,loss,time_s\n";
    for (const auto& r : run.records) {
        std::string next_pred;
        std::string abs_err;
        std::string hstep_pred;
        if (r.index >= 1) {
            if (auto it = by_origin.find(r.index - 1); it != by_origin.end()) {
                const double pred = it->second->forecast[0];
                next_pred = num(pred);
                abs_err = num(std::abs(pred - r.actual));
            }
        }
        if (r.index >= h) {
            if (auto it = by_origin.find(r.index - h); it != by_origin.end()) {
                hstep_pred = num(it->second->forecast[h - 1]);
            }
        }
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.increment, num(r.actual), next_pred, hstep_pred,
                           abs_err, num(r.gamma), num(r.eta), num(r.loss), num(r.wall_time_seconds));
    }
    return out;
}

std::string report_json(const RunResult& run, const MetricsReport& metrics) {
    ojson config = ojson::object();
    for (const auto& [k, v] : run.config.to_key_values()) config[k] = v;

    ojson per_h_rmse = ojson::array();
    for (double v : metrics.per_horizon_rmse) per_h_rmse.push_back(finite_or_null(v));

    ojson j;
    j["format"] = "driftcast-report/1";
    j["seed"] = run.config.seed;
    j["model"] = run.config.model.kind;
    j["strategy"] = std::string(to_string(run.config.strategy));
    j["n"] = run.config.n;
    j["h"] = run.config.h;
    j["series"] = {{"label", run.series_label},
                   {"length", run.series_length},
                   {"warmup_length", run.warmup_length}};
    j["config"] = config;
    if (run.warmup) {
        j["warmup"] = {{"pairs_per_epoch", run.warmup->pairs_per_epoch},
                       {"epochs", run.warmup->epochs},
                       {"final_epoch_loss", finite_or_null(run.warmup->final_epoch_loss)}};
    } else {
        j["warmup"] = nullptr;
    }
    if (run.pretrain) {
        j["pretrain"] = {{"series", run.pretrain_label},
                         {"match_criteria", {"chemistry", "geometry", "nominal_capacity"}},
                         {"pairs_per_epoch", run.pretrain->pairs_per_epoch},
                         {"epochs", run.pretrain->epochs}};
    } else {
        j["pretrain"] = nullptr;
    }
    j["metrics"] = {
        {"rmse", finite_or_null(metrics.rmse)},
        {"mae", finite_or_null(metrics.mae)},
        {"mae_percent", finite_or_null(metrics.mae_percent)},
        {"pairs", metrics.pairs},
        {"hstep",
         {{"horizon", metrics.horizon},
          {"rmse", finite_or_null(metrics.hstep_rmse)},
          {"mae", finite_or_null(metrics.hstep_mae)},
          {"mae_percent", finite_or_null(metrics.hstep_mae_percent)},
          {"points", metrics.h_step_trace.size()}}},
        {"per_horizon_rmse", per_h_rmse},
        {"per_horizon_count", metrics.per_horizon_count},
        {"increments", metrics.increments},
        {"updates", metrics.updates},
        {"timing",
         {{"recorded", run.config.record_timing},
          {"mean_s_per_it", metrics.timing.mean_s},
          {"median_s_per_it", metrics.timing.median_s}}},
    };
    return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepTable& table) {
    std::string out = fmt::format("# seed={} axis={}\n", table.seed, to_string(table.axis));
    out += "axis,value,model,rmse,mae,mae_percent,hstep_rmse,mean_time_s,median_time_s,updates,status\n";
    for (const auto& row : table.rows) {
        if (row.ok) {
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},ok\n", to_string(table.axis), row.value, row.model,
                               num(row.rmse), num(row.mae), num(row.mae_percent), num(row.hstep_rmse),
                               num(row.timing.mean_s), num(row.timing.median_s), row.updates);
        } else {
            std::string msg = row.error;
            for (char& c : msg) {
                if (c == ',' || c == '\n' || c == '"') c = ';';
            }
            out += fmt::format("{},{},{},,,,,,,,error: {}\n", to_string(table.axis), row.value, row.model, msg);
        }
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

void write_run_outputs(const RunResult& run, const MetricsReport& metrics, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    write_text_file(out_dir / "report.json", report_json(run, metrics));
    write_text_file(out_dir / "traces.csv", traces_csv(run));
}

std::vector<ComparisonRow> merge_reports(std::span<const std::filesystem::path> runs) {
    std::vector<ComparisonRow> rows;
    for (const auto& entry : runs) {
        const auto path = std::filesystem::is_directory(entry) ? entry / "report.json" : entry;
        std::ifstream in(path);
        if (!in) throw IoError("cannot read " + path.string());
        ojson j;
        try {
            j = ojson::parse(in);
            ComparisonRow row;
            row.model = j.at("model").get<std::string>();
            row.dataset = j.at("series").at("label").get<std::string>();
            row.strategy = j.at("strategy").get<std::string>();
            row.n = j.at("n").get<std::size_t>();
            row.h = j.at("h").get<std::size_t>();
            const auto& m = j.at("metrics");
            row.rmse = m.at("rmse").is_null() ? NAN : m.at("rmse").get<double>();
            row.mae_percent = m.at("mae_percent").is_null() ? NAN : m.at("mae_percent").get<double>();
            row.time_s_per_it = m.at("timing").at("mean_s_per_it").get<double>();
            row.seed = j.at("seed").get<std::uint64_t>();
            rows.push_back(std::move(row));
        } catch (const ojson::exception& e) {
            throw DataError(path.string() + ": not a driftcast report (" + e.what() + ")");
        }
    }
    if (!rows.empty()) {
        const std::size_t n0 = rows.front().n;
        const std::size_t h0 = rows.front().h;
        for (auto& row : rows) {
            if (row.n != n0 || row.h != h0) {
                row.warning = fmt::format("n/h differ from first run (n={} h={})", n0, h0);
            }
        }
    }
    return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::string out = "model,dataset,strategy,n,h,RMSE,MAE %,Time s/it,seed,warning\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.model, r.dataset, r.strategy, r.n, r.h, num(r.rmse),
                           num(r.mae_percent), num(r.time_s_per_it), r.seed, r.warning);
    }
    return out;
}

} // namespace driftcast
