#pragma once

#include "driftcast/evaluation.hpp"
#include "driftcast/protocol.hpp"
#include "driftcast/series.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace driftcast {

/// traces.csv text. One row per increment, aligned on the revealed actual:
/// increment,actual,next_step_pred,hstep_pred,abs_err_next,gamma,eta,loss,time_s
/// next_step_pred / hstep_pred are the 1-step and H-step forecasts that were
/// issued for this actual; cells are empty where no such forecast exists.
[[nodiscard]] std::string traces_csv(const RunResult& run);

/// report.json text: config snapshot, series info and MetricsReport.
[[nodiscard]] std::string report_json(const RunResult& run, const MetricsReport& metrics);

/// sweep.csv text: axis,value,model,rmse,mae,mae_percent,hstep_rmse,
/// mean_time_s,median_time_s,updates,status
[[nodiscard]] std::string sweep_csv(const SweepTable& table);

/// Writes report.json and traces.csv into `out_dir` (created if missing).
void write_run_outputs(const RunResult& run, const MetricsReport& metrics, const std::filesystem::path& out_dir);

/// One row of the cross-run comparison table.
struct ComparisonRow {
    std::string model;
    std::string dataset;
    std::string strategy;
    std::size_t n = 0;
    std::size_t h = 0;
    double rmse = 0.0;
    double mae_percent = 0.0;
    double time_s_per_it = 0.0;
    std::uint64_t seed = 0;
    std::string warning;
};

/// Reads `<dir>/report.json` (or the file itself when given a .json path)
/// for each entry. Mismatched n/h relative to the first run is flagged in
/// the warning column, not rejected.
[[nodiscard]] std::vector<ComparisonRow> merge_reports(std::span<const std::filesystem::path> runs);
[[nodiscard]] std::string comparison_csv(std::span<const ComparisonRow> rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace driftcast
