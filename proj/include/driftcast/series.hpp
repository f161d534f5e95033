#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace driftcast {

/// Default lookback length N.
inline constexpr std::size_t kDefaultInputLength = 10;
/// Default forecast horizon H.
inline constexpr std::size_t kDefaultHorizon = 30;
/// SoH values above this are accepted but logged as suspicious.
inline constexpr double kSohWarnCeiling = 1.5;

/// Converts a fully-charged capacity to a state-of-health fraction.
/// Throws InvalidArgument for q_nominal <= 0 or q_full < 0.
[[nodiscard]] double soh_from_capacity(double q_full, double q_nominal);

/**
 * Ordered per-cycle state-of-health fractions.
 *
 * Values are fractions of nominal capacity (1.0 == as new). Percentages only
 * appear at reporting boundaries. Immutable once constructed.
 */
class SoHSeries {
public:
    /// Validates: equal non-empty lengths, strictly increasing cycles,
    /// finite positive values, nominal_capacity > 0.
    SoHSeries(std::vector<std::int64_t> cycles, std::vector<double> values,
              double nominal_capacity = 1.0, std::string label = {});

    /// Cycles numbered 1..values.size().
    static SoHSeries from_values(std::vector<double> values, double nominal_capacity = 1.0,
                                 std::string label = {});

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const std::int64_t> cycles() const noexcept { return cycles_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_.at(i); }
    [[nodiscard]] double nominal_capacity() const noexcept { return nominal_capacity_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// First `count` samples as a new series (same nominal capacity and label).
    [[nodiscard]] SoHSeries prefix(std::size_t count) const;

private:
    std::vector<std::int64_t> cycles_;
    std::vector<double> values_;
    double nominal_capacity_;
    std::string label_;
};

/// N consecutive SoH values, oldest first. `origin` is the parent-series
/// index of the last (most recent) element.
class Window {
public:
    Window(std::vector<double> values, std::size_t origin);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double back() const noexcept { return values_.back(); }
    [[nodiscard]] std::size_t origin() const noexcept { return origin_; }

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::vector<double> values_;
    std::size_t origin_;
};

/// H forecast values for origin+1 .. origin+H.
class ForecastVector {
public:
    ForecastVector(std::vector<double> values, std::size_t origin);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t origin() const noexcept { return origin_; }

    friend bool operator==(const ForecastVector&, const ForecastVector&) = default;

private:
    std::vector<double> values_;
    std::size_t origin_;
};

/// The `n` values ending at `t_end` (inclusive). Never pads: throws
/// InsufficientData when t_end + 1 < n, InvalidArgument when t_end is out of
/// range or n < 2.
[[nodiscard]] Window make_window(std::span<const double> values, std::size_t t_end,
                                 std::size_t n = kDefaultInputLength);
[[nodiscard]] Window make_window(const SoHSeries& series, std::size_t t_end,
                                 std::size_t n = kDefaultInputLength);

} // namespace driftcast
