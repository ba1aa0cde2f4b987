#pragma once

// Large-N analytic predictions for the SYK ensemble: plateau height,
// ensemble-averaged (dephased) partition functions, the disconnected and
// connected SFF contributions, and the Lambert-W dip time from their
// crossing. The connected form is an asymptotic for strong dissipation and
// late times; it carries a validity flag outside that regime.

#include <cmath>
#include <numbers>

#include "sffmon/errors.hpp"

namespace sffmon {

/// Principal-branch Lambert W via Halley iteration,
/// |W e^W - x| < 1e-12 max(1, |x|).
inline double lambert_w(double x) {
    constexpr double min_arg = -0.36787944117144233; // -1/e
    if (x < min_arg - 1e-12) throw ValidationError("lambert_w needs x >= -1/e");
    if (x == 0.0) return 0.0;
    double w;
    if (x < -0.32) {
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < std::numbers::e) {
        w = x / (1.0 + x); // crude seed; Halley contracts fast
    } else {
        const double l1 = std::log(x), l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int iter = 0; iter < 100; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(x))) break;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        w -= f / denom;
    }
    return w;
}

/// Long-time diagonal (plateau) height (2/d) e^{-N beta^2 / 8}.
inline double plateau_prediction(double beta, int n_majorana, double dim) {
    return 2.0 / dim * std::exp(-static_cast<double>(n_majorana) * beta * beta / 8.0);
}

/// Ensemble-averaged partition function d e^{N x^2/8}, or its dephased
/// version d (1 + 2 N gamma t)^{-1/2} e^{N x^2 / (8 + 16 N gamma t)}.
inline double ensemble_partition_prediction(double x, double gamma, double t, int n_majorana,
                                            double dim, bool dephased) {
    const double n = static_cast<double>(n_majorana);
    if (!dephased) return dim * std::exp(n * x * x / 8.0);
    const double damp = 1.0 + 2.0 * n * gamma * t;
    return dim / std::sqrt(damp) * std::exp(n * x * x / (8.0 + 16.0 * n * gamma * t));
}

/// Disconnected SFF contribution (coarse DOS part):
///   |exp[N (beta + it - sqrt(2g) w)^2 / (8 + 8 g N t)]|^2 / (1 + g N t)
///   ------------------------------------------------------------------
///   (1 + 2 g N t)^{-1/2} e^{N beta^2/8} e^{N (beta - sqrt(8g) w)^2 / (8 + 16 N g t)}
/// evaluated in log space.
inline double sff_disconnected_prediction(double t, double w, double beta, double gamma,
                                          int n_majorana) {
    const double n = static_cast<double>(n_majorana);
    const double a = beta - std::sqrt(2.0 * gamma) * w; // Re(beta + it - sqrt(2g)w)
    const double denom_num = 8.0 + 8.0 * gamma * n * t;
    // |e^z|^2 = e^{2 Re z}, Re[(a + it)^2] = a^2 - t^2.
    const double log_num =
        2.0 * n * (a * a - t * t) / denom_num - std::log1p(gamma * n * t);
    const double b = beta - std::sqrt(8.0 * gamma) * w;
    const double log_den = -0.5 * std::log1p(2.0 * gamma * n * t) + n * beta * beta / 8.0 +
                           n * b * b / (8.0 + 16.0 * n * gamma * t);
    return std::exp(log_num - log_den);
}

struct ConnectedPrediction {
    double value = 0.0;
    bool in_regime = false; // strong dissipation, late times: gamma > 1 and t > d/sqrt(N)
};

/// Connected (level-repulsion) SFF contribution
///   (1/(2 d^2)) sqrt(N/(8 pi)) t exp[beta^2/(4 t g) - beta w / sqrt(2 t g)
///                                    + w^2/(4 N g t^2) - N beta^2 / 8].
inline ConnectedPrediction sff_connected_prediction(double t, double w, double beta,
                                                    double gamma, int n_majorana, double dim) {
    if (!(gamma > 0.0) || !(t > 0.0))
        throw ValidationError("connected prediction needs gamma > 0 and t > 0");
    const double n = static_cast<double>(n_majorana);
    ConnectedPrediction out;
    const double expo = beta * beta / (4.0 * t * gamma) - beta * w / std::sqrt(2.0 * t * gamma) +
                        w * w / (4.0 * n * gamma * t * t) - n * beta * beta / 8.0;
    out.value = 1.0 / (2.0 * dim * dim) * std::sqrt(n / (8.0 * std::numbers::pi)) * t *
                std::exp(expo);
    out.in_regime = gamma > 1.0 && t > dim / std::sqrt(n);
    return out;
}

/// Dip time from the disconnected/connected crossing at beta = 0, W_t = 0:
///   t_d = 6 gamma W( (1/(6 gamma)) (8 d^2 sqrt(2 pi) / (N sqrt(gamma)))^{2/3} ).
/// The symbol multiplying sqrt(gamma) is exposed because the source leaves it
/// ambiguous; it defaults to the Majorana count.
inline double dip_time_lambert(double gamma, double dim, int n_majorana) {
    if (!(gamma > 0.0)) throw ValidationError("dip_time_lambert needs gamma > 0");
    const double n = static_cast<double>(n_majorana);
    const double arg =
        std::pow(8.0 * dim * dim * std::sqrt(2.0 * std::numbers::pi) / (n * std::sqrt(gamma)),
                 2.0 / 3.0) /
        (6.0 * gamma);
    return 6.0 * gamma * lambert_w(arg);
}

} // namespace sffmon
