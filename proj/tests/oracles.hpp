#pragma once

// Reference implementations written independently of the library code, used
// as test oracles. They favour the most direct formula over efficiency.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Line {
    double slope;
    double intercept;
};

/// Ordinary least squares through (t, y_t), t = 0..n-1, from raw sums.
inline Line ols(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i);
        st += t;
        sy += y[i];
        stt += t * t;
        sty += t * y[i];
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return {slope, (sy - slope * st) / n};
}

/// Pseudo targets composed step by step: fit, clamp the slope, extend the
/// line past the window end.
inline std::vector<double> pseudo_targets(const std::vector<double>& window, std::size_t h) {
    const Line fit = ols(window);
    const double m = fit.slope < 0.0 ? fit.slope : 0.0;
    const double last = static_cast<double>(window.size() - 1);
    std::vector<double> z;
    for (std::size_t j = 1; j <= h; ++j) z.push_back(m * (last + static_cast<double>(j)) + fit.intercept);
    return z;
}

inline double rmse(const std::vector<double>& p, const std::vector<double>& a) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - a[i]) * (p[i] - a[i]);
    return std::sqrt(s / static_cast<double>(p.size()));
}

inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - a[i]);
    return s / static_cast<double>(p.size());
}

/// Spearman rank correlation for distinct values.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double below = 0, ties = 0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) below += 1;
                else if (v[j] == v[i]) ties += 1;
            }
            r[i] = below + (ties + 1) / 2.0;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace oracle
