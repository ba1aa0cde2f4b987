#pragma once

// Wiener realizations on arbitrary grids. Brownian increments are exactly
// Gaussian at any spacing, so log-spaced SFF grids are sampled directly; the
// bridge refinement lets an SDE integration and a closed-form evaluation
// share one noise realization.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/grid.hpp"
#include "sffmon/rng.hpp"

namespace sffmon {

struct WienerPath {
    TimeGrid grid;
    std::vector<double> values; // W(t_k); W(0) = 0 by convention
    std::string stream_id;

    std::size_t size() const { return values.size(); }

    /// Increment W(t_{k+1}) - W(t_k).
    double increment(std::size_t k) const { return values[k + 1] - values[k]; }
};

/// Exact sampling: each increment ~ N(0, t_{k+1} - t_k), starting from
/// W(0) = 0 (a grid with t_0 > 0 gets W(t_0) ~ N(0, t_0)).
inline WienerPath sample_wiener_path(const TimeGrid& grid, NoiseStream& stream) {
    grid.validate();
    WienerPath path;
    path.grid = grid;
    path.stream_id = stream.id();
    path.values.resize(grid.size());
    double t_prev = 0.0;
    double w = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dt = grid[k] - t_prev;
        if (dt > 0.0) w += std::sqrt(dt) * stream.gaussian();
        path.values[k] = w;
        t_prev = grid[k];
    }
    return path;
}

/// Conditional (Brownian-bridge) refinement onto a finer grid that contains
/// every original point. Original values are preserved bit-exactly; interior
/// points are drawn left to right from the conditional law
///   W(s) | W(a)=wa, W(b)=wb  ~  N(wa + (s-a)/(b-a)(wb-wa), (s-a)(b-s)/(b-a)).
/// Points beyond the original horizon are plain increments.
inline WienerPath refine_path(const WienerPath& path, const TimeGrid& finer, NoiseStream& stream) {
    finer.validate();
    WienerPath out;
    out.grid = finer;
    out.stream_id = path.stream_id + "+" + stream.id();
    out.values.resize(finer.size());

    const auto& coarse_t = path.grid.points;
    std::size_t ci = 0; // next coarse anchor to match

    // Anchor state: last pinned (t, W).
    double ta = 0.0, wa = 0.0;
    bool before_first_coarse = true;

    for (std::size_t k = 0; k < finer.size(); ++k) {
        const double t = finer[k];
        if (ci < coarse_t.size() && t == coarse_t[ci]) {
            out.values[k] = path.values[ci];
            ta = t;
            wa = path.values[ci];
            ++ci;
            before_first_coarse = false;
            continue;
        }
        if (ci < coarse_t.size() && t > coarse_t[ci])
            throw ValidationError("refine_path: finer grid misses original point t=" +
                                  std::to_string(coarse_t[ci]));
        if (ci < coarse_t.size()) {
            // Bridge between the current anchor and the next coarse point.
            // Left of the first coarse point the anchor is W(0)=0, which is
            // a pinned value as well, so the same law applies.
            (void)before_first_coarse;
            const double tb = coarse_t[ci];
            const double wb = path.values[ci];
            const double span = tb - ta;
            if (!(span > 0.0)) throw ValidationError("refine_path: degenerate bridge span");
            const double mean = wa + (t - ta) / span * (wb - wa);
            const double var = (t - ta) * (tb - t) / span;
            const double w = mean + std::sqrt(var) * stream.gaussian();
            out.values[k] = w;
            ta = t;
            wa = w;
        } else {
            // Past the original horizon: free increments.
            const double w = wa + std::sqrt(t - ta) * stream.gaussian();
            out.values[k] = w;
            ta = t;
            wa = w;
        }
    }
    if (ci != coarse_t.size())
        throw ValidationError("refine_path: finer grid does not contain all original points");
    return out;
}

} // namespace sffmon
