#pragma once

// Small statistical toolbox used by tests and diagnostics: running moments,
// Kolmogorov-Smirnov tests, level-spacing ratios, least squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sffmon/errors.hpp"

namespace sffmon {

struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0; // sum of squared deviations

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

inline MeanVar mean_var(std::span<const double> xs) {
    MeanVar mv;
    for (double x : xs) mv.add(x);
    return mv;
}

/// Kolmogorov distribution tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16 * std::max(1.0, sum)) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample KS p-value (asymptotic, with the usual finite-size correction).
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("KS test needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

/// One-sample KS p-value against a CDF.
inline double ks_one_sample_pvalue(std::vector<double> xs,
                                   const std::function<double(double)>& cdf) {
    if (xs.empty()) throw ValidationError("KS test needs a non-empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    const double sn = std::sqrt(n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Mean gap ratio <r~> = < min(s_i, s_{i+1}) / max(s_i, s_{i+1}) > of a
/// sorted spectrum. GOE ~ 0.5307, GUE ~ 0.5996, GSE ~ 0.6744, Poisson ~ 0.386.
inline double mean_gap_ratio(std::span<const double> sorted_energies) {
    if (sorted_energies.size() < 3) throw ValidationError("gap ratio needs >= 3 levels");
    MeanVar mv;
    for (std::size_t i = 0; i + 2 < sorted_energies.size(); ++i) {
        const double s0 = sorted_energies[i + 1] - sorted_energies[i];
        const double s1 = sorted_energies[i + 2] - sorted_energies[i + 1];
        const double lo = std::min(s0, s1), hi = std::max(s0, s1);
        if (hi > 0.0) mv.add(lo / hi);
    }
    return mv.mean;
}

/// Least-squares line y = slope*x + intercept.
inline std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("linear_fit needs n >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

/// Sample autocorrelation at a given lag.
inline double autocorrelation(std::span<const double> xs, std::size_t lag) {
    if (xs.size() <= lag + 1) throw ValidationError("autocorrelation: series too short");
    MeanVar mv = mean_var(xs);
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < xs.size(); ++i)
        acc += (xs[i] - mv.mean) * (xs[i + lag] - mv.mean);
    const double var = mv.m2;
    return var > 0.0 ? acc / var : 0.0;
}

} // namespace sffmon
