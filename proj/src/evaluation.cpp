#include "driftcast/evaluation.hpp"

#include "driftcast/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace driftcast {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual, const char* who) {
    if (pred.size() != actual.size() || pred.empty()) {
        throw InvalidArgument(std::string(who) + ": sequences must have equal non-zero length");
    }
}

struct Accumulator {
    double sq = 0.0;
    double abs = 0.0;
    std::size_t count = 0;

    void add(double pred, double actual) {
        const double d = pred - actual;
        sq += d * d;
        abs += std::abs(d);
        ++count;
    }
    [[nodiscard]] double rmse() const {
        return count ? std::sqrt(sq / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN();
    }
    [[nodiscard]] double mae() const {
        return count ? abs / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
    }
};

} // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual, "rmse");
    Accumulator acc;
    for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], actual[i]);
    return acc.rmse();
}

double mae(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual, "mae");
    Accumulator acc;
    for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], actual[i]);
    return acc.mae();
}

TimingSummary summarize_timing(std::span<const double> seconds) {
    TimingSummary out;
    if (seconds.empty()) return out;
    out.mean_s = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
    std::vector<double> sorted(seconds.begin(), seconds.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    out.median_s = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return out;
}

double time_iteration(const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MetricsReport posthoc_evaluate(const RunResult& run, const SoHSeries& series) {
    const std::size_t length = series.size();
    const auto actual = series.values();
    const std::size_t horizon = run.config.h;

    std::vector<const StepRecord*> records;
    records.reserve(run.records.size());
    for (const auto& r : run.records) records.push_back(&r);
    std::sort(records.begin(), records.end(),
              [](const StepRecord* a, const StepRecord* b) { return a->index < b->index; });

    MetricsReport report;
    report.horizon = horizon;
    report.increments = run.records.size();
    report.updates = run.total_updates();

    Accumulator all;
    Accumulator hstep;
    std::vector<Accumulator> per_h(horizon);
    std::vector<double> times;
    times.reserve(records.size());

    for (const StepRecord* r : records) {
        times.push_back(r->wall_time_seconds);
        const std::size_t origin = r->forecast.origin();
        if (origin >= length) {
            throw InvalidArgument("record origin " + std::to_string(origin) + " lies outside the series");
        }
        const std::size_t available = std::min(horizon, length - 1 - origin);
        for (std::size_t j = 1; j <= available; ++j) {
            const double pred = r->forecast[j - 1];
            const double truth = actual[origin + j];
            all.add(pred, truth);
            per_h[j - 1].add(pred, truth);
        }
        if (available >= 1) {
            report.next_step_trace.push_back({origin, origin + 1, r->forecast[0], actual[origin + 1]});
            report.next_step_abs_errors.push_back(std::abs(r->forecast[0] - actual[origin + 1]));
        }
        if (available == horizon) {
            const double pred = r->forecast[horizon - 1];
            const double truth = actual[origin + horizon];
            report.h_step_trace.push_back({origin, origin + horizon, pred, truth});
            hstep.add(pred, truth);
        }
    }

    report.pairs = all.count;
    report.rmse = all.rmse();
    report.mae = all.mae();
    report.mae_percent = to_percent(report.mae);
    report.hstep_rmse = hstep.rmse();
    report.hstep_mae = hstep.mae();
    report.hstep_mae_percent = to_percent(report.hstep_mae);
    for (const auto& acc : per_h) {
        report.per_horizon_rmse.push_back(acc.rmse());
        report.per_horizon_count.push_back(acc.count);
    }
    report.timing = summarize_timing(times);
    return report;
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::InputLength ? "n" : "h"; }

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "n") return SweepAxis::InputLength;
    if (name == "h") return SweepAxis::Horizon;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected n|h)");
}

SweepTable sweep(const RunConfig& base, SweepAxis axis, std::span<const std::size_t> grid,
                 std::span<const std::string> models, const SoHSeries& series, unsigned jobs,
                 const SoHSeries* pretrain) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    if (models.empty()) throw ConfigError("sweep needs at least one model");

    SweepTable table;
    table.axis = axis;
    table.grid.assign(grid.begin(), grid.end());
    table.models.assign(models.begin(), models.end());
    table.seed = base.seed;
    table.rows.resize(models.size() * grid.size());

    auto run_cell = [&](std::size_t cell) {
        SweepRow& row = table.rows[cell];
        row.model = table.models[cell / grid.size()];
        row.value = grid[cell % grid.size()];
        try {
            RunConfig config = base;
            config.model.kind = row.model;
            if (axis == SweepAxis::InputLength) config.n = row.value;
            else config.h = row.value;
            const RunResult run = run_stream(config, series, pretrain);
            const MetricsReport metrics = posthoc_evaluate(run, series);
            row.rmse = metrics.rmse;
            row.mae = metrics.mae;
            row.mae_percent = metrics.mae_percent;
            row.hstep_rmse = metrics.hstep_rmse;
            row.timing = metrics.timing;
            row.updates = metrics.updates;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    const std::size_t cells = table.rows.size();
    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, cells);
    if (workers == 1) {
        for (std::size_t c = 0; c < cells; ++c) run_cell(c);
        return table;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1)) run_cell(c);
        });
    }
    pool.clear();
    return table;
}

} // namespace driftcast
