#include "driftcast/series.hpp"

#include "driftcast/error.hpp"
#include "driftcast/log.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace driftcast {

double soh_from_capacity(double q_full, double q_nominal) {
    if (!(q_nominal > 0.0) || !std::isfinite(q_nominal)) {
        throw InvalidArgument("nominal capacity must be positive, got " + std::to_string(q_nominal));
    }
    if (!(q_full >= 0.0) || !std::isfinite(q_full)) {
        throw InvalidArgument("capacity must be finite and non-negative, got " + std::to_string(q_full));
    }
    return q_full / q_nominal;
}

SoHSeries::SoHSeries(std::vector<std::int64_t> cycles, std::vector<double> values,
                     double nominal_capacity, std::string label)
    : cycles_(std::move(cycles)),
      values_(std::move(values)),
      nominal_capacity_(nominal_capacity),
      label_(std::move(label)) {
    if (values_.empty()) {
        throw InvalidArgument("series must contain at least one sample");
    }
    if (cycles_.size() != values_.size()) {
        throw InvalidArgument("cycle and value counts differ");
    }
    if (!(nominal_capacity_ > 0.0)) {
        throw InvalidArgument("nominal capacity must be positive");
    }
    bool warned = false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i > 0 && cycles_[i] <= cycles_[i - 1]) {
            throw InvalidArgument("cycles must be strictly increasing (index " + std::to_string(i) + ")");
        }
        const double v = values_[i];
        if (!std::isfinite(v) || v <= 0.0) {
            throw InvalidArgument("SoH value at index " + std::to_string(i) + " must be finite and positive");
        }
        if (v > kSohWarnCeiling && !warned) {
            logger()->warn("series '{}': SoH {} at index {} exceeds {}", label_, v, i, kSohWarnCeiling);
            warned = true;
        }
    }
}

SoHSeries SoHSeries::from_values(std::vector<double> values, double nominal_capacity, std::string label) {
    std::vector<std::int64_t> cycles(values.size());
    std::iota(cycles.begin(), cycles.end(), std::int64_t{1});
    return SoHSeries(std::move(cycles), std::move(values), nominal_capacity, std::move(label));
}

SoHSeries SoHSeries::prefix(std::size_t count) const {
    if (count == 0 || count > size()) {
        throw InvalidArgument("prefix length out of range");
    }
    return SoHSeries({cycles_.begin(), cycles_.begin() + static_cast<std::ptrdiff_t>(count)},
                     {values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count)},
                     nominal_capacity_, label_);
}

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string(what) + " contains a non-finite value");
        }
    }
}

} // namespace

Window::Window(std::vector<double> values, std::size_t origin)
    : values_(std::move(values)), origin_(origin) {
    if (values_.size() < 2) {
        throw InvalidArgument("window needs at least 2 values");
    }
    require_finite(values_, "window");
}

ForecastVector::ForecastVector(std::vector<double> values, std::size_t origin)
    : values_(std::move(values)), origin_(origin) {
    if (values_.empty()) {
        throw InvalidArgument("forecast vector needs at least 1 value");
    }
    require_finite(values_, "forecast vector");
}

Window make_window(std::span<const double> values, std::size_t t_end, std::size_t n) {
    if (n < 2) {
        throw InvalidArgument("window length must be >= 2");
    }
    if (t_end >= values.size()) {
        throw InvalidArgument("window end " + std::to_string(t_end) + " outside series of length " +
                              std::to_string(values.size()));
    }
    if (t_end + 1 < n) {
        throw InsufficientData("window of " + std::to_string(n) + " ending at " + std::to_string(t_end) +
                               " needs " + std::to_string(n) + " samples of history");
    }
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(t_end + 1 - n);
    return Window({first, first + static_cast<std::ptrdiff_t>(n)}, t_end);
}

Window make_window(const SoHSeries& series, std::size_t t_end, std::size_t n) {
    return make_window(series.values(), t_end, n);
}

} // namespace driftcast
