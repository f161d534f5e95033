#include "driftcast/pseudo_target.hpp"

#include "driftcast/error.hpp"

#include <algorithm>
#include <string>

namespace driftcast {

std::string_view to_string(PseudoMode mode) {
    switch (mode) {
    case PseudoMode::Literal: return "literal";
    case PseudoMode::MeanReanchor: return "mean-reanchor";
    }
    return "literal";
}

PseudoMode parse_pseudo_mode(std::string_view name) {
    if (name == "literal") return PseudoMode::Literal;
    if (name == "mean-reanchor") return PseudoMode::MeanReanchor;
    throw ConfigError("unknown pseudo_mode '" + std::string(name) + "' (expected literal|mean-reanchor)");
}

LinearFit fit_line(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw InvalidArgument("line fit needs at least 2 points");
    }
    // Centered form: t_bar = (n-1)/2, Sxx = n(n^2-1)/12.
    const double count = static_cast<double>(n);
    const double t_bar = 0.5 * (count - 1.0);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / count;

    double sxy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sxy += (static_cast<double>(t) - t_bar) * (values[t] - mean);
    }
    const double sxx = count * (count * count - 1.0) / 12.0;

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.clamped_slope = clamp_slope(fit.slope);
    fit.intercept = mean - fit.slope * t_bar;
    fit.mean = mean;
    fit.n = n;
    return fit;
}

LinearFit fit_line(const Window& window) { return fit_line(window.values()); }

PseudoTargets extrapolate(const LinearFit& fit, std::size_t h, PseudoMode mode, std::size_t origin) {
    if (h == 0) {
        throw InvalidArgument("pseudo-target horizon must be >= 1");
    }
    PseudoTargets out;
    out.origin = origin;
    out.mode = mode;
    out.values.resize(h);

    const bool clamped = !(fit.slope < 0.0);
    if (mode == PseudoMode::MeanReanchor && clamped) {
        std::fill(out.values.begin(), out.values.end(), fit.mean);
        return out;
    }
    const double last_t = static_cast<double>(fit.n) - 1.0;
    for (std::size_t j = 1; j <= h; ++j) {
        out.values[j - 1] = fit.at(last_t + static_cast<double>(j));
    }
    return out;
}

PseudoTargets generate_pseudo_targets(const Window& window, std::size_t h, PseudoMode mode) {
    return extrapolate(fit_line(window), h, mode, window.origin());
}

} // namespace driftcast
