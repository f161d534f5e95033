#pragma once

#include "driftcast/series.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace driftcast {

/// How pseudo targets are formed once the slope clamp has fired.
enum class PseudoMode {
    /// z_j = m'(N-1+j) + b, i.e. the intercept when the clamp fired.
    Literal,
    /// Same as Literal for falling windows; window mean when the clamp fired
    /// (the least-squares fit under a zero-slope constraint).
    MeanReanchor,
};

[[nodiscard]] std::string_view to_string(PseudoMode mode);
/// Throws ConfigError for unknown names ("literal", "mean-reanchor").
[[nodiscard]] PseudoMode parse_pseudo_mode(std::string_view name);

/// Least-squares line over local times t = 0..n-1 (t = 0 at the window start).
/// Forecast slot j (1-based) sits at t = n-1+j.
struct LinearFit {
    double slope = 0.0;
    double clamped_slope = 0.0;
    double intercept = 0.0;
    double mean = 0.0;
    std::size_t n = 0;

    /// Line value at local time t using the clamped slope.
    [[nodiscard]] double at(double t) const noexcept { return clamped_slope * t + intercept; }
};

/// Stand-in future values for horizons whose actuals are not yet known.
struct PseudoTargets {
    std::vector<double> values;
    std::size_t origin = 0;
    PseudoMode mode = PseudoMode::Literal;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
};

/// Degradation trajectories never rise: positive slopes are flattened to 0.
[[nodiscard]] constexpr double clamp_slope(double slope) noexcept { return slope < 0.0 ? slope : 0.0; }

[[nodiscard]] LinearFit fit_line(std::span<const double> values);
[[nodiscard]] LinearFit fit_line(const Window& window);

/// Throws InvalidArgument for h == 0.
[[nodiscard]] PseudoTargets extrapolate(const LinearFit& fit, std::size_t h,
                                        PseudoMode mode = PseudoMode::Literal,
                                        std::size_t origin = 0);

/// fit_line -> clamp -> extrapolate, with origin taken from the window.
[[nodiscard]] PseudoTargets generate_pseudo_targets(const Window& window, std::size_t h = kDefaultHorizon,
                                                    PseudoMode mode = PseudoMode::Literal);

} // namespace driftcast
