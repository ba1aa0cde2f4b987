#pragma once

// Curve smoothing and dip/plateau extraction. Smoothing is a centered moving
// average in index space (log-time smoothing on the default log grids, the
// way moving averages read on log-axis plots), with windows shrinking at the
// boundaries. The dip is the earliest global minimum of the smoothed curve
// after it has decayed below half its initial value; the plateau time is the
// first post-dip time that stays within a relative band of the plateau value
// for a sustained run of points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sffmon/averaging.hpp"
#include "sffmon/errors.hpp"

namespace sffmon {

struct RampFeatures {
    double t_dip = 0.0;
    double dip_value = 0.0;
    double t_plateau = 0.0;
    double plateau_value = 0.0;
    double ratio = 0.0; // t_dip / t_plateau
    std::size_t smooth_window = 1;
};

inline std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    if (window < 1) throw ValidationError("window must be >= 1");
    if (window > values.size()) throw ValidationError("window exceeds curve length");
    if (window == 1) return values;
    std::vector<double> out(values.size());
    const std::size_t back = (window - 1) / 2;
    const std::size_t forward = window / 2;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t lo = i >= back ? i - back : 0;
        const std::size_t hi = std::min(values.size() - 1, i + forward);
        double acc = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) acc += values[k];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

inline SffCurve smooth_curve(const SffCurve& curve, std::size_t window) {
    curve.validate();
    SffCurve out = curve;
    out.values = moving_average(curve.values, window);
    return out;
}

/// Long-time plateau estimate: mean over the final decade of the grid
/// (t >= t_max / 10), the default plateau_value for extraction.
inline double empirical_plateau(const SffCurve& curve) {
    curve.validate();
    const double cut = curve.grid.back() / 10.0;
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        if (curve.grid[k] >= cut) {
            acc += curve.values[k];
            ++n;
        }
    }
    if (n == 0) throw FeatureNotFoundError("no points in the final decade");
    return acc / static_cast<double>(n);
}

struct DipPoint {
    double t_dip = 0.0;
    double dip_value = 0.0;
    std::size_t index = 0;
};

/// Earliest global minimum of the smoothed curve, searched after the curve
/// first decays below half its initial value (so early oscillations can not
/// lock the search) and excluding the first grid point.
inline DipPoint extract_dip_time(const SffCurve& curve, std::size_t smooth_window) {
    curve.validate();
    const std::vector<double> smoothed = moving_average(curve.values, smooth_window);
    const double gate = 0.5 * smoothed.front();
    std::size_t start = 0;
    while (start < smoothed.size() && !(smoothed[start] < gate)) ++start;
    if (start >= smoothed.size())
        throw FeatureNotFoundError("curve never decays below half its initial value");
    start = std::max<std::size_t>(start, 1);
    DipPoint dip;
    dip.index = start;
    dip.dip_value = smoothed[start];
    for (std::size_t k = start + 1; k < smoothed.size(); ++k) {
        if (smoothed[k] < dip.dip_value) { // strict: ties break earliest
            dip.dip_value = smoothed[k];
            dip.index = k;
        }
    }
    if (dip.index + 1 == smoothed.size())
        throw FeatureNotFoundError("no interior minimum (curve still decaying at t_max)");
    dip.t_dip = curve.grid[dip.index];
    return dip;
}

/// First grid time after the dip at which the smoothed curve stays within
/// relative `tol` of plateau_value for `sustain` consecutive points.
inline double extract_plateau_time(const SffCurve& curve, double plateau_value,
                                   double tol = 0.2, std::size_t sustain = 10,
                                   std::size_t smooth_window = 1) {
    curve.validate();
    if (!(plateau_value > 0.0)) throw ValidationError("plateau_value must be positive");
    if (sustain < 1) throw ValidationError("sustain must be >= 1");
    const std::vector<double> smoothed = moving_average(curve.values, smooth_window);
    const DipPoint dip = extract_dip_time(curve, smooth_window);
    std::size_t run = 0;
    for (std::size_t k = dip.index; k < smoothed.size(); ++k) {
        if (std::abs(smoothed[k] - plateau_value) <= tol * plateau_value) {
            if (++run >= sustain) return curve.grid[k - sustain + 1];
        } else {
            run = 0;
        }
    }
    throw FeatureNotFoundError("curve never sustains the plateau band");
}

inline RampFeatures ramp_features(const SffCurve& curve, std::size_t smooth_window,
                                  double plateau_override = 0.0, double tol = 0.2,
                                  std::size_t sustain = 10) {
    RampFeatures f;
    f.smooth_window = smooth_window;
    const DipPoint dip = extract_dip_time(curve, smooth_window);
    f.t_dip = dip.t_dip;
    f.dip_value = dip.dip_value;
    f.plateau_value = plateau_override > 0.0 ? plateau_override : empirical_plateau(curve);
    f.t_plateau = extract_plateau_time(curve, f.plateau_value, tol, sustain, smooth_window);
    f.ratio = f.t_dip / f.t_plateau;
    return f;
}

/// |annealed - quenched| / quenched, pointwise, with an optional moving
/// average (default window 100) applied before output.
inline SffCurve annealed_relative_error(const SffCurve& quenched, const SffCurve& annealed,
                                        std::size_t smooth_window = 100) {
    quenched.validate();
    annealed.validate();
    if (quenched.grid.points != annealed.grid.points)
        throw ValidationError("relative-error curves need a shared grid");
    SffCurve err = quenched;
    err.meta = annealed.meta;
    for (std::size_t k = 0; k < err.values.size(); ++k) {
        err.values[k] = std::abs(annealed.values[k] - quenched.values[k]) / quenched.values[k];
        err.stderrs[k] = 0.0;
    }
    if (smooth_window > 1)
        err.values = moving_average(err.values, std::min(smooth_window, err.values.size()));
    return err;
}

} // namespace sffmon
