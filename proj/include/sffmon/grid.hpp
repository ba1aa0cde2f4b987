#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sffmon/errors.hpp"

namespace sffmon {

enum class GridSpacing { uniform, log, explicit_points };

inline std::string to_string(GridSpacing s) {
    switch (s) {
        case GridSpacing::uniform: return "uniform";
        case GridSpacing::log: return "log";
        case GridSpacing::explicit_points: return "explicit";
    }
    return "?";
}

/// Strictly increasing evaluation times. t=0 is allowed as the first point.
struct TimeGrid {
    std::vector<double> points;
    GridSpacing spacing = GridSpacing::explicit_points;

    std::size_t size() const { return points.size(); }
    double operator[](std::size_t i) const { return points[i]; }
    double front() const { return points.front(); }
    double back() const { return points.back(); }

    void validate() const {
        if (points.size() < 2) throw ValidationError("time grid needs at least 2 points");
        if (points.front() < 0.0) throw ValidationError("time grid must be non-negative");
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (!std::isfinite(points[i]) || !(points[i] < points[i + 1]))
                throw ValidationError("time grid must be finite and strictly increasing");
        }
        if (!std::isfinite(points.back()))
            throw ValidationError("time grid must be finite and strictly increasing");
    }

    /// Uniform step if the grid is uniform (within rounding), else throws.
    double uniform_step() const {
        const double dt = points[1] - points[0];
        for (std::size_t i = 1; i + 1 < points.size(); ++i) {
            const double step = points[i + 1] - points[i];
            if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                throw ValidationError("grid is not uniform");
        }
        return dt;
    }

    static TimeGrid uniform(double t0, double t1, std::size_t n) {
        if (n < 2) throw ValidationError("uniform grid needs n >= 2");
        if (!(t1 > t0)) throw ValidationError("uniform grid needs t1 > t0");
        TimeGrid g;
        g.spacing = GridSpacing::uniform;
        g.points.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
        g.points.back() = t1;
        g.validate();
        return g;
    }

    static TimeGrid logspace(double t_min, double t_max, std::size_t n) {
        if (n < 2) throw ValidationError("log grid needs n >= 2");
        if (!(t_min > 0.0) || !(t_max > t_min))
            throw ValidationError("log grid needs 0 < t_min < t_max");
        TimeGrid g;
        g.spacing = GridSpacing::log;
        g.points.resize(n);
        const double l0 = std::log(t_min), l1 = std::log(t_max);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
        g.points.back() = t_max;
        g.validate();
        return g;
    }

    static TimeGrid from_points(std::vector<double> pts) {
        TimeGrid g;
        g.spacing = GridSpacing::explicit_points;
        g.points = std::move(pts);
        g.validate();
        return g;
    }

    /// Refinement that keeps every point of `coarse` bit-exactly and splits
    /// each interval into `m` equal parts (so bridge refinement and SDE
    /// stepping can share grids with closed-form evaluation).
    static TimeGrid subdivided(const TimeGrid& coarse, std::size_t m) {
        if (m == 0) throw ValidationError("subdivision factor must be positive");
        coarse.validate();
        TimeGrid g;
        g.spacing = coarse.spacing == GridSpacing::uniform ? GridSpacing::uniform
                                                           : GridSpacing::explicit_points;
        for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
            const double a = coarse[k], b = coarse[k + 1];
            g.points.push_back(a);
            for (std::size_t j = 1; j < m; ++j)
                g.points.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(m));
        }
        g.points.push_back(coarse.back());
        g.validate();
        return g;
    }
};

} // namespace sffmon
