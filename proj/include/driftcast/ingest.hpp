#pragma once

#include "driftcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftcast {

/**
 * Layout of a pre-extracted cycle/capacity table.
 *
 * Columns are matched by header name first; a purely numeric reference is
 * otherwise taken as a 0-based column index (the only option when
 * `header` is false).
 */
struct CsvSchema {
    std::string cycle_column = "cycle";
    std::string capacity_column = "capacity";
    char delimiter = ',';
    bool header = true;
    double nominal_capacity = 1.0;

    /// "nasa" (2.0 Ah), "mit" (1.1 Ah), "calce" (1.35 Ah) or "soh"
    /// (values already SoH fractions). ConfigError otherwise.
    static CsvSchema preset(std::string_view name);
    [[nodiscard]] static std::span<const std::string_view> preset_names();
    /// `key = value` file with the field names above; ConfigError on bad input.
    static CsvSchema load(const std::filesystem::path& path);
    void validate() const;
};

/// Throws DataError (with row and column for bad cells) or IoError.
[[nodiscard]] SoHSeries load_cycle_capacity_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes `cycle,soh` rows (shortest round-trip formatting) after a comment
/// line carrying `header_note`, e.g. "seed=7 preset=smooth-short".
void write_series_csv(const SoHSeries& series, const std::filesystem::path& path,
                      std::string_view header_note = {});

enum class DegradationModel { Linear, ExponentialKnee };

[[nodiscard]] std::string_view to_string(DegradationModel model);

/**
 * Synthetic capacity-fade generator.
 *
 * Linear: straight fade from initial_soh to end_soh.
 * ExponentialKnee: with u = t/(length-1) and p = knee_position,
 *   g(u) = 0.40 u + 0.15 E(u) + 0.45 K(u)/K(1)
 *   E(u) = 1 - (1 - min(u,p)/p)^3            (early decelerating fade)
 *   K(u) = e^{k(u-p)} - 1 - k(u-p) for u > p (accelerating fade past the knee)
 * and soh = initial - (initial - end) g(u). The curvature is negative before
 * p and positive after it, so the knee sits exactly at p.
 *
 * Spikes start at each cycle with probability spike_rate and add
 * spike_amplitude * e^{-dt/spike_decay} to that and every later cycle.
 */
struct SynthParams {
    std::size_t length = 500;
    DegradationModel model = DegradationModel::ExponentialKnee;
    double initial_soh = 1.0;
    double end_soh = 0.8;
    double knee_position = 0.75;
    double knee_sharpness = 10.0;
    double spike_rate = 0.0;
    double spike_amplitude = 0.0;
    double spike_decay = 5.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 42;

    /// InvalidArgument on violated invariants.
    void validate() const;
};

inline constexpr double kSynthFloor = 1e-3;

/// Noise- and spike-free curve.
[[nodiscard]] std::vector<double> base_trajectory(const SynthParams& params);
[[nodiscard]] SoHSeries synth_degradation(const SynthParams& params, std::string label = "synthetic",
                                          double nominal_capacity = 1.0);

struct NamedPreset {
    std::string_view name;
    std::string_view regime;
    double nominal_capacity;
    SynthParams params;
};

/// smooth-short, irregular-short, smooth-long, irregular-long.
[[nodiscard]] std::span<const NamedPreset> preset_profiles();
/// ConfigError listing the valid names for unknown presets.
[[nodiscard]] const NamedPreset& find_preset(std::string_view name);
/// Preset series with the given seed.
[[nodiscard]] SoHSeries synth_preset(std::string_view name, std::optional<std::uint64_t> seed = std::nullopt);

} // namespace driftcast
