#pragma once

#include "driftcast/protocol.hpp"
#include "driftcast/series.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftcast {

/// InvalidArgument on size mismatch or empty input.
[[nodiscard]] double rmse(std::span<const double> pred, std::span<const double> actual);
[[nodiscard]] double mae(std::span<const double> pred, std::span<const double> actual);

/// Fractions are stored internally; percentages exist only in reports.
[[nodiscard]] constexpr double to_percent(double fraction) noexcept { return 100.0 * fraction; }

struct TracePoint {
    std::size_t origin = 0;
    std::size_t target_index = 0;
    double predicted = 0.0;
    double actual = 0.0;
};

struct TimingSummary {
    double mean_s = 0.0;
    double median_s = 0.0;
};

[[nodiscard]] TimingSummary summarize_timing(std::span<const double> seconds);

/// Wall-clock seconds spent in `body`, on the monotonic clock.
double time_iteration(const std::function<void()>& body);

struct MetricsReport {
    std::size_t horizon = 0;
    /// All (origin, horizon) pairs whose target lies inside the series.
    double rmse = 0.0;
    double mae = 0.0;
    double mae_percent = 0.0;
    std::size_t pairs = 0;

    /// Index j holds horizon j+1. NaN where a horizon has no pairs.
    std::vector<double> per_horizon_rmse;
    std::vector<std::size_t> per_horizon_count;

    /// H-th step forecast aligned with the actual it predicts.
    std::vector<TracePoint> h_step_trace;
    double hstep_rmse = 0.0;
    double hstep_mae = 0.0;
    double hstep_mae_percent = 0.0;

    /// |forecast[0] - actual| for every record whose next sample exists.
    std::vector<TracePoint> next_step_trace;
    std::vector<double> next_step_abs_errors;

    TimingSummary timing;
    std::size_t increments = 0;
    std::size_t updates = 0;
};

/// Post-hoc scoring against the full series (the one place future samples
/// are legitimately read). Forecasts running past the series end contribute
/// only their available horizons.
[[nodiscard]] MetricsReport posthoc_evaluate(const RunResult& run, const SoHSeries& series);

enum class SweepAxis { InputLength, Horizon };

[[nodiscard]] std::string_view to_string(SweepAxis axis);
/// "n" or "h"; ConfigError otherwise.
[[nodiscard]] SweepAxis parse_sweep_axis(std::string_view name);

struct SweepRow {
    std::string model;
    std::size_t value = 0;
    bool ok = false;
    std::string error;
    double rmse = 0.0;
    double mae = 0.0;
    double mae_percent = 0.0;
    double hstep_rmse = 0.0;
    TimingSummary timing;
    std::size_t updates = 0;
};

struct SweepTable {
    SweepAxis axis = SweepAxis::Horizon;
    std::vector<std::size_t> grid;
    std::vector<std::string> models;
    /// Model-major: rows[m * grid.size() + g].
    std::vector<SweepRow> rows;
    std::uint64_t seed = 0;
};

/// One full run per (model, grid value) with identical seeds; up to `jobs`
/// cells run concurrently. A failing cell is recorded in its row.
[[nodiscard]] SweepTable sweep(const RunConfig& base, SweepAxis axis, std::span<const std::size_t> grid,
                               std::span<const std::string> models, const SoHSeries& series,
                               unsigned jobs = 1, const SoHSeries* pretrain = nullptr);

} // namespace driftcast
