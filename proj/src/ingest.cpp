#include "driftcast/ingest.hpp"

#include "driftcast/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace driftcast {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<std::size_t> to_index(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::size_t resolve_column(const std::string& ref, const std::vector<std::string_view>& header, bool has_header,
                           const std::filesystem::path& path) {
    if (has_header) {
        const auto it = std::find(header.begin(), header.end(), std::string_view(ref));
        if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    }
    if (const auto idx = to_index(ref)) return *idx;
    throw DataError(path.string() + ": missing column '" + ref + "'");
}

} // namespace

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

std::span<const std::string_view> CsvSchema::preset_names() {
    static constexpr std::array<std::string_view, 4> names{"nasa", "mit", "calce", "soh"};
    return names;
}

CsvSchema CsvSchema::preset(std::string_view name) {
    CsvSchema s;
    if (name == "nasa") {
        s.cycle_column = "cycle";
        s.capacity_column = "capacity";
        s.nominal_capacity = 2.0;
    } else if (name == "mit") {
        s.cycle_column = "cycle";
        s.capacity_column = "QDischarge";
        s.nominal_capacity = 1.1;
    } else if (name == "calce") {
        s.cycle_column = "Cycle_Index";
        s.capacity_column = "Discharge_Capacity(Ah)";
        s.nominal_capacity = 1.35;
    } else if (name == "soh") {
        s.cycle_column = "cycle";
        s.capacity_column = "soh";
        s.nominal_capacity = 1.0;
    } else {
        throw ConfigError("unknown schema preset '" + std::string(name) + "' (expected nasa|mit|calce|soh)");
    }
    return s;
}

void CsvSchema::validate() const {
    if (!(nominal_capacity > 0.0)) throw ConfigError("schema nominal_capacity must be > 0");
    if (cycle_column.empty() || capacity_column.empty()) throw ConfigError("schema columns must be named");
}

CsvSchema CsvSchema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read schema file " + path.string());
    CsvSchema s;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path.string() + ": line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "preset") s = preset(value);
        else if (key == "cycle_column") s.cycle_column = std::string(value);
        else if (key == "capacity_column") s.capacity_column = std::string(value);
        else if (key == "delimiter") {
            if (value == "tab" || value == "\\t") s.delimiter = '\t';
            else if (value.size() == 1) s.delimiter = value[0];
            else throw ConfigError(path.string() + ": delimiter must be one character or 'tab'");
        } else if (key == "header") s.header = value == "true" || value == "1" || value == "yes";
        else if (key == "nominal_capacity") {
            const auto v = to_double(value);
            if (!v) throw ConfigError(path.string() + ": invalid nominal_capacity");
            s.nominal_capacity = *v;
        } else {
            throw ConfigError(path.string() + ": unknown schema key '" + std::string(key) + "'");
        }
    }
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Loading and writing
// ---------------------------------------------------------------------------

SoHSeries load_cycle_capacity_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw IoError("cannot read data file " + path.string());

    std::vector<std::pair<std::int64_t, double>> rows;
    std::vector<std::string_view> header;
    std::string header_line;
    std::optional<std::size_t> cycle_col;
    std::optional<std::size_t> cap_col;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!cycle_col) {
            if (schema.header) {
                header_line = raw;
                header = split(header_line, schema.delimiter);
            }
            cycle_col = resolve_column(schema.cycle_column, header, schema.header, path);
            cap_col = resolve_column(schema.capacity_column, header, schema.header, path);
            if (schema.header) continue;
        }
        const auto fields = split(raw, schema.delimiter);
        const auto cell = [&](std::size_t col, const std::string& name) -> double {
            if (col >= fields.size()) {
                throw DataError(path.string() + ": row " + std::to_string(line_no) + " has no column '" + name + "'");
            }
            const auto v = to_double(fields[col]);
            if (!v || !std::isfinite(*v)) {
                throw DataError(path.string() + ": non-numeric value '" + std::string(fields[col]) + "' at row " +
                                std::to_string(line_no) + ", column '" + name + "'");
            }
            return *v;
        };
        const double cycle = cell(*cycle_col, schema.cycle_column);
        const double capacity = cell(*cap_col, schema.capacity_column);
        if (cycle != std::floor(cycle)) {
            throw DataError(path.string() + ": cycle index '" + std::string(fields[*cycle_col]) +
                            "' at row " + std::to_string(line_no) + " is not an integer");
        }
        rows.emplace_back(static_cast<std::int64_t>(cycle), capacity);
    }
    if (rows.empty()) throw DataError(path.string() + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::int64_t> cycles;
    std::vector<double> values;
    cycles.reserve(rows.size());
    values.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first) {
            throw DataError(path.string() + ": duplicate cycle index " + std::to_string(rows[i].first));
        }
        try {
            values.push_back(soh_from_capacity(rows[i].second, schema.nominal_capacity));
        } catch (const InvalidArgument& e) {
            throw DataError(path.string() + ": cycle " + std::to_string(rows[i].first) + ": " + e.what());
        }
        cycles.push_back(rows[i].first);
    }
    try {
        return SoHSeries(std::move(cycles), std::move(values), schema.nominal_capacity, path.stem().string());
    } catch (const InvalidArgument& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_series_csv(const SoHSeries& series, const std::filesystem::path& path, std::string_view header_note) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    std::string text;
    if (!header_note.empty()) {
        text += "# ";
        text += header_note;
        text += '\n';
    }
    text += "cycle,soh\n";
    const auto cycles = series.cycles();
    const auto values = series.values();
    for (std::size_t i = 0; i < series.size(); ++i) {
        text += fmt::format("{},{}\n", cycles[i], values[i]);
    }
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

std::string_view to_string(DegradationModel model) {
    return model == DegradationModel::Linear ? "linear" : "exponential-knee";
}

void SynthParams::validate() const {
    if (length < 2) throw InvalidArgument("synth length must be >= 2");
    if (!(end_soh > 0.0 && end_soh < initial_soh && initial_soh <= 1.1)) {
        throw InvalidArgument("synth requires 0 < end_soh < initial_soh <= 1.1");
    }
    if (spike_rate < 0.0 || spike_rate > 1.0 || spike_amplitude < 0.0 || noise_sigma < 0.0) {
        throw InvalidArgument("synth spike_rate must lie in [0, 1]; amplitudes and sigma must be >= 0");
    }
    if (!(spike_decay > 0.0)) throw InvalidArgument("synth spike_decay must be > 0");
    if (model == DegradationModel::ExponentialKnee) {
        if (!(knee_position > 0.0 && knee_position < 1.0)) {
            throw InvalidArgument("synth knee_position must lie in (0, 1)");
        }
        if (!(knee_sharpness > 0.0)) throw InvalidArgument("synth knee_sharpness must be > 0");
    }
}

std::vector<double> base_trajectory(const SynthParams& params) {
    params.validate();
    const std::size_t length = params.length;
    const double fade = params.initial_soh - params.end_soh;
    const double p = params.knee_position;
    const double k = params.knee_sharpness;
    const auto knee = [k, p](double u) {
        if (u <= p) return 0.0;
        const double x = k * (u - p);
        return std::expm1(x) - x;
    };
    const auto early = [p](double u) {
        const double r = 1.0 - std::min(u, p) / p;
        return 1.0 - r * r * r;
    };
    const double knee_end = knee(1.0);

    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double u = length > 1 ? static_cast<double>(t) / static_cast<double>(length - 1) : 0.0;
        double g = u;
        if (params.model == DegradationModel::ExponentialKnee) {
            g = 0.40 * u + 0.15 * early(u) + 0.45 * knee(u) / knee_end;
        }
        out[t] = params.initial_soh - fade * g;
    }
    return out;
}

SoHSeries synth_degradation(const SynthParams& params, std::string label, double nominal_capacity) {
    std::vector<double> values = base_trajectory(params);
    std::mt19937_64 rng(params.seed);

    if (params.spike_rate > 0.0 && params.spike_amplitude > 0.0) {
        std::bernoulli_distribution starts(params.spike_rate);
        std::vector<double> recovery(values.size(), 0.0);
        for (std::size_t t = 1; t < values.size(); ++t) {
            if (!starts(rng)) continue;
            for (std::size_t s = t; s < values.size(); ++s) {
                const double contribution =
                    params.spike_amplitude * std::exp(-static_cast<double>(s - t) / params.spike_decay);
                if (contribution < 1e-12) break;
                recovery[s] += contribution;
            }
        }
        for (std::size_t t = 0; t < values.size(); ++t) values[t] += recovery[t];
    }
    if (params.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        for (double& v : values) v += noise(rng);
    }
    for (double& v : values) v = std::max(v, kSynthFloor);
    return SoHSeries::from_values(std::move(values), nominal_capacity, std::move(label));
}

std::span<const NamedPreset> preset_profiles() {
    static const std::array<NamedPreset, 4> presets{{
        {"smooth-short", "short, smooth, knee", 1.1,
         SynthParams{.length = 557, .model = DegradationModel::ExponentialKnee, .initial_soh = 1.0,
                     .end_soh = 0.8, .knee_position = 0.75, .knee_sharpness = 10.0}},
        {"irregular-short", "short, irregular, regeneration spikes", 2.0,
         SynthParams{.length = 168, .model = DegradationModel::Linear, .initial_soh = 0.93, .end_soh = 0.67,
                     .spike_rate = 0.06, .spike_amplitude = 0.03, .spike_decay = 4.0, .noise_sigma = 0.003}},
        {"smooth-long", "long, smooth, knee", 1.1,
         SynthParams{.length = 1224, .model = DegradationModel::ExponentialKnee, .initial_soh = 1.0,
                     .end_soh = 0.8, .knee_position = 0.8, .knee_sharpness = 10.0}},
        {"irregular-long", "long, irregular, regeneration spikes", 1.35,
         SynthParams{.length = 1887, .model = DegradationModel::Linear, .initial_soh = 0.95, .end_soh = 0.65,
                     .spike_rate = 0.02, .spike_amplitude = 0.02, .spike_decay = 10.0, .noise_sigma = 0.002}},
    }};
    return presets;
}

const NamedPreset& find_preset(std::string_view name) {
    for (const auto& p : preset_profiles()) {
        if (p.name == name) return p;
    }
    std::string valid;
    for (const auto& p : preset_profiles()) {
        if (!valid.empty()) valid += ", ";
        valid += p.name;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (valid presets: " + valid + ")");
}

SoHSeries synth_preset(std::string_view name, std::optional<std::uint64_t> seed) {
    const NamedPreset& preset = find_preset(name);
    SynthParams params = preset.params;
    if (seed) params.seed = *seed;
    return synth_degradation(params, std::string(preset.name), preset.nominal_capacity);
}

} // namespace driftcast
