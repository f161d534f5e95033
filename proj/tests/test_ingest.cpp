#include <doctest.h>

#include "driftcast/error.hpp"
#include "driftcast/ingest.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace driftcast;

namespace {

const std::filesystem::path kFixtures{DRIFTCAST_FIXTURES};
const std::filesystem::path kSchemas{DRIFTCAST_SCHEMAS};

/// Count of sign changes in the second difference, ignoring near-zero values.
int curvature_sign_changes(const std::vector<double>& v) {
    int changes = 0;
    int last = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double d2 = v[i + 1] - 2.0 * v[i] + v[i - 1];
        if (std::fabs(d2) < 1e-12) continue;
        const int sign = d2 > 0 ? 1 : -1;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

} // namespace

TEST_CASE("nasa fixture: capacity divided by 2.0 Ah") {
    const auto s = load_cycle_capacity_csv(kFixtures / "nasa_small.csv", CsvSchema::preset("nasa"));
    REQUIRE(s.size() == 12);
    CHECK(s[0] == doctest::Approx(1.8565 / 2.0));
    CHECK(s.cycles()[11] == 12);
    CHECK(s.label() == "nasa_small");
    CHECK(s.nominal_capacity() == 2.0);
}

TEST_CASE("schema files match the presets") {
    for (const char* name : {"nasa", "mit", "calce"}) {
        const auto file = CsvSchema::load(kSchemas / (std::string(name) + ".schema"));
        const auto preset = CsvSchema::preset(name);
        CHECK(file.cycle_column == preset.cycle_column);
        CHECK(file.capacity_column == preset.capacity_column);
        CHECK(file.nominal_capacity == preset.nominal_capacity);
    }
}

TEST_CASE("mit and calce fixtures pick their columns by name") {
    const auto mit = load_cycle_capacity_csv(kFixtures / "mit_small.csv", CsvSchema::preset("mit"));
    CHECK(mit.size() == 10);
    CHECK(mit[0] == doctest::Approx(1.0707 / 1.1));
    const auto calce = load_cycle_capacity_csv(kFixtures / "calce_small.csv", CsvSchema::preset("calce"));
    CHECK(calce.size() == 8);
    CHECK(calce[7] == doctest::Approx(1.1096 / 1.35));
}

TEST_CASE("custom schema file with another delimiter") {
    const auto schema = CsvSchema::load(kFixtures / "semicolon.schema");
    CHECK(schema.delimiter == ';');
    const auto s = load_cycle_capacity_csv(kFixtures / "semicolon.csv", schema);
    CHECK(s.size() == 4);
    CHECK(s[3] == 0.92);
}

TEST_CASE("columns may be given by index without a header") {
    const auto path = std::filesystem::temp_directory_path() / "driftcast_noheader.csv";
    std::ofstream(path) << "1,0.5,0.98\n2,0.5,0.97\n";
    CsvSchema schema;
    schema.header = false;
    schema.cycle_column = "0";
    schema.capacity_column = "2";
    const auto s = load_cycle_capacity_csv(path, schema);
    CHECK(s.size() == 2);
    CHECK(s[1] == 0.97);
    std::filesystem::remove(path);
}

TEST_CASE("rows are sorted by cycle") {
    const auto s = load_cycle_capacity_csv(kFixtures / "unsorted.csv", CsvSchema::preset("nasa"));
    REQUIRE(s.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.cycles()[i] == static_cast<std::int64_t>(i + 1));
    CHECK(s[0] == doctest::Approx(0.95));
    CHECK(s[4] == doctest::Approx(0.75));
}

TEST_CASE("loader errors") {
    CHECK_THROWS_AS((void)load_cycle_capacity_csv(kFixtures / "duplicate_cycle.csv", CsvSchema::preset("nasa")),
                    DataError);
    try {
        (void)load_cycle_capacity_csv(kFixtures / "bad_cell.csv", CsvSchema::preset("nasa"));
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("capacity") != std::string::npos);
    }
    CHECK_THROWS_AS((void)load_cycle_capacity_csv(kFixtures / "mit_small.csv", CsvSchema::preset("nasa")),
                    DataError);
    CHECK_THROWS_AS((void)load_cycle_capacity_csv(kFixtures / "missing.csv", CsvSchema::preset("nasa")), IoError);
    CHECK_THROWS_AS((void)CsvSchema::preset("oxford"), ConfigError);
    CHECK_THROWS_AS((void)CsvSchema::load(kFixtures / "nasa_small.csv"), ConfigError);
}

TEST_CASE("write then load round-trips") {
    const auto s = synth_preset("irregular-short", 3);
    const auto path = std::filesystem::temp_directory_path() / "driftcast_roundtrip.csv";
    write_series_csv(s, path, "seed=3");
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# seed=3");
    const auto back = load_cycle_capacity_csv(path, CsvSchema::preset("soh"));
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
    std::filesystem::remove(path);
}

TEST_CASE("preset lengths") {
    CHECK(synth_preset("smooth-short").size() == 557);
    CHECK(synth_preset("irregular-short").size() == 168);
    CHECK(synth_preset("smooth-long").size() == 1224);
    CHECK(synth_preset("irregular-long").size() == 1887);
    CHECK_THROWS_AS((void)synth_preset("bogus"), ConfigError);
    try {
        (void)find_preset("bogus");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("smooth-long") != std::string::npos);
    }
}

TEST_CASE("synthesis is seeded") {
    const auto a = synth_preset("irregular-long", 5);
    const auto b = synth_preset("irregular-long", 5);
    const auto c = synth_preset("irregular-long", 6);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST_CASE("knee trajectory: decreasing with one curvature sign change") {
    SynthParams p;
    p.length = 600;
    p.knee_position = 0.7;
    const auto v = base_trajectory(p);
    CHECK(v.front() == doctest::Approx(p.initial_soh));
    CHECK(v.back() == doctest::Approx(p.end_soh).epsilon(1e-9));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
    CHECK(curvature_sign_changes(v) == 1);
    // The sign flips at the knee.
    const std::size_t knee = static_cast<std::size_t>(0.7 * 599);
    const double before = v[knee - 10] - 2 * v[knee - 11] + v[knee - 12];
    const double after = v[knee + 12] - 2 * v[knee + 11] + v[knee + 10];
    CHECK(before > 0.0);
    CHECK(after < 0.0);
}

TEST_CASE("smooth presets are noiseless and monotone") {
    for (const char* name : {"smooth-short", "smooth-long"}) {
        const auto s = synth_preset(name);
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] < s[i - 1]);
    }
}

TEST_CASE("irregular presets carry regeneration jumps") {
    for (const char* name : {"irregular-short", "irregular-long"}) {
        const auto s = synth_preset(name);
        std::size_t jumps = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i] - s[i - 1] > 0.01) ++jumps;
        }
        CAPTURE(name);
        CHECK(jumps >= 2);
        // Overall decline.
        CHECK(s[s.size() - 1] < s[0] - 0.2);
    }
}

TEST_CASE("spikes decay and values stay positive") {
    SynthParams p;
    p.length = 200;
    p.model = DegradationModel::Linear;
    p.initial_soh = 0.05;
    p.end_soh = 0.001;
    p.noise_sigma = 0.05;
    const auto s = synth_degradation(p);
    for (double v : s.values()) CHECK(v >= kSynthFloor);

    SynthParams q;
    q.length = 100;
    q.model = DegradationModel::Linear;
    q.spike_rate = 1.0;
    q.spike_amplitude = 0.01;
    q.spike_decay = 2.0;
    const auto spiky = synth_degradation(q);
    const auto base = base_trajectory(q);
    // Every cycle from 1 on starts a spike; the sum settles to a bounded offset.
    const double bound = 0.01 / (1.0 - std::exp(-1.0 / 2.0)) + 1e-12;
    for (std::size_t i = 1; i < spiky.size(); ++i) {
        CHECK(spiky[i] - base[i] > 0.0);
        CHECK(spiky[i] - base[i] <= bound);
    }
}

TEST_CASE("synth parameter validation") {
    SynthParams p;
    p.length = 1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.length = 10;
    p.knee_position = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.knee_position = 0.5;
    p.spike_rate = 2.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
