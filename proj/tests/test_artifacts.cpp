#include <doctest.h>

#include "driftcast/artifacts.hpp"
#include "driftcast/error.hpp"
#include "driftcast/ingest.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace driftcast;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::size_t fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

struct Fixture {
    SoHSeries series = synth_preset("smooth-short");
    RunConfig config;
    RunResult run;
    MetricsReport metrics;
    Fixture() {
        config.model.mlp_hidden = 8;
        config.warmup_epochs = 1;
        config.h = 5;
        config.record_timing = false;
        run = run_stream(config, series);
        metrics = posthoc_evaluate(run, series);
    }
};

} // namespace

TEST_CASE("traces.csv layout") {
    Fixture f;
    const auto rows = lines(traces_csv(f.run));
    REQUIRE(rows.size() == f.run.records.size() + 2);
    CHECK(rows[0] == "# seed=42 model=mlp strategy=pseudo-gamma");
    CHECK(rows[1] == "increment,actual,next_step_pred,hstep_pred,abs_err_next,gamma,eta,loss,time_s");
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(fields(rows[i]) == 9);
    // No forecast exists for the first actual; the h-step column fills in after h increments.
    CHECK(rows[2].rfind("1,", 0) == 0);
    const auto first = rows[2];
    CHECK(first.find(",,,") != std::string::npos);
    const auto sixth = lines(traces_csv(f.run))[2 + 5];
    CHECK(sixth.find(",,") == std::string::npos);
}

TEST_CASE("report.json fields") {
    Fixture f;
    const auto j = nlohmann::json::parse(report_json(f.run, f.metrics));
    CHECK(j["format"] == "driftcast-report/1");
    CHECK(j["seed"] == 42);
    CHECK(j["n"] == 10);
    CHECK(j["h"] == 5);
    CHECK(j["series"]["length"] == 557);
    CHECK(j["series"]["warmup_length"] == 139);
    CHECK(j["metrics"]["pairs"] == f.metrics.pairs);
    CHECK(j["metrics"]["per_horizon_rmse"].size() == 5);
    CHECK(j["metrics"]["updates"] == 418);
    CHECK(j["metrics"]["timing"]["recorded"] == false);
    CHECK(j["config"]["strategy"] == "pseudo-gamma");
    CHECK(j["pretrain"].is_null());
    CHECK(j["warmup"]["pairs_per_epoch"] == 139 - 10 - 5 + 1);
}

TEST_CASE("outputs are byte-identical across repeated runs") {
    Fixture a;
    Fixture b;
    CHECK(traces_csv(a.run) == traces_csv(b.run));
    CHECK(report_json(a.run, a.metrics) == report_json(b.run, b.metrics));
}

TEST_CASE("sweep.csv layout") {
    SweepTable t;
    t.axis = SweepAxis::Horizon;
    t.seed = 9;
    t.rows = {SweepRow{.model = "mlp", .value = 5, .ok = true, .rmse = 0.01},
              SweepRow{.model = "mlp", .value = 10, .ok = false, .error = "bad, really\nbad"}};
    const auto rows = lines(sweep_csv(t));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "# seed=9 axis=h");
    CHECK(fields(rows[2]) == 11);
    CHECK(fields(rows[3]) == 11);
    CHECK(rows[3].find("error: bad; really;bad") != std::string::npos);
}

TEST_CASE("merge reports and flag mismatched shapes") {
    Fixture f;
    const auto dir = std::filesystem::temp_directory_path() / "driftcast_merge";
    std::filesystem::remove_all(dir);
    write_run_outputs(f.run, f.metrics, dir / "a");
    RunResult other = f.run;
    other.config.h = 7;
    write_run_outputs(other, f.metrics, dir / "b");
    const std::vector<std::filesystem::path> runs{dir / "a", dir / "b" / "report.json"};
    const auto merged = merge_reports(runs);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].warning.empty());
    CHECK_FALSE(merged[1].warning.empty());
    CHECK(merged[0].dataset == "smooth-short");
    const auto table = lines(comparison_csv(merged));
    CHECK(table[0] == "model,dataset,strategy,n,h,RMSE,MAE %,Time s/it,seed,warning");
    CHECK(table.size() == 3);

    std::ofstream(dir / "junk.json") << "{\"format\": 1}";
    const std::vector<std::filesystem::path> junk{dir / "junk.json"};
    CHECK_THROWS_AS((void)merge_reports(junk), DataError);
    const std::vector<std::filesystem::path> missing{dir / "nope"};
    CHECK_THROWS_AS((void)merge_reports(missing), IoError);
    std::filesystem::remove_all(dir);
}
