#pragma once

// Spectral form factor variants. The monitored SFF for one trajectory is
//
//   F_beta(t, W_t) = |sum_n e^{-(beta + it - sqrt(2g) W_t) E_n - 2 g t E_n^2}|^2
//                    / [ Z(beta) * sum_n e^{-(beta - sqrt(8g) W_t) E_n - 4 g E_n^2 t} ]
//
// and its finite-efficiency generalization is the double sum over
// K_t(En, Em) = exp[-i(En-Em)t - g t (En-Em)^2 - g eta t (En+Em)^2
//               + sqrt(2 g eta)(En+Em) W_t]. Numerator and denominator are
// reduced to (log, mantissa) pairs so their ratio never under/overflows.
//
// For eta in (0,1) the off-diagonal coupling e^{+2 g t (1-eta) En Em} blocks
// factorization; a Hubbard-Stratonovich Gaussian integral restores it,
//   numerator = E_g |sum_n e^{-(beta+it)E_n - 2 g t E_n^2 + sqrt(2 g eta) w E_n
//                              + sqrt(2 g t (1-eta)) g E_n}|^2,
// evaluated by adaptive Gauss-Hermite quadrature at O(G d) instead of O(d^2).

#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/logsum.hpp"
#include "sffmon/quadrature.hpp"
#include "sffmon/spectrum.hpp"

namespace sffmon {

enum class SffVariant { monitored, efficiency, nojump, dephasing, unitary };

inline std::string to_string(SffVariant v) {
    switch (v) {
        case SffVariant::monitored: return "monitored";
        case SffVariant::efficiency: return "efficiency";
        case SffVariant::nojump: return "nojump";
        case SffVariant::dephasing: return "dephasing";
        case SffVariant::unitary: return "unitary";
    }
    return "?";
}

enum class SffMethod { auto_select, direct, quadrature };

namespace detail_sff {

inline void check_gamma_eta(double gamma, double eta) {
    if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
    if (eta < 0.0 || eta > 1.0) throw ValidationError("eta must be in [0, 1]");
}

/// log Z(beta).
inline double log_z(std::span<const double> e, double beta) {
    std::vector<double> expo(e.size());
    for (std::size_t n = 0; n < e.size(); ++n) expo[n] = -beta * e[n];
    return log_sum_exp(expo);
}

/// log of the efficiency-SFF denominator sum: sum_n e^{-beta En} K_t(En, En)
/// = sum_n e^{-beta En - 4 g eta t En^2 + 2 sqrt(2 g eta) En w}.
inline double log_denominator_sum(std::span<const double> e, double beta, double gamma,
                                  double eta, double t, double w) {
    const double noise = 2.0 * std::sqrt(2.0 * gamma * eta) * w;
    const double filt = 4.0 * gamma * eta * t;
    std::vector<double> expo(e.size());
    for (std::size_t n = 0; n < e.size(); ++n)
        expo[n] = -beta * e[n] - filt * e[n] * e[n] + noise * e[n];
    return log_sum_exp(expo);
}

/// log numerator of the efficiency SFF by the direct O(d^2) double sum.
/// Row-wise pairwise reduction under a global max shift.
inline double log_numerator_direct(std::span<const double> e, double beta, double gamma,
                                   double eta, double t, double w) {
    const std::size_t d = e.size();
    const double noise = std::sqrt(2.0 * gamma * eta) * w;
    auto exponent = [&](std::size_t n, std::size_t m) {
        const double diff = e[n] - e[m];
        const double sum = e[n] + e[m];
        return -beta * sum - gamma * t * diff * diff - gamma * eta * t * sum * sum + noise * sum;
    };
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = n; m < d; ++m) shift = std::max(shift, exponent(n, m));
    std::vector<double> row(d), rows(d);
    for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t m = 0; m < d; ++m)
            row[m] = std::exp(exponent(n, m) - shift) * std::cos((e[n] - e[m]) * t);
        rows[n] = pairwise_sum<double>(row);
    }
    const double total = pairwise_sum<double>(rows);
    // |sum|^2 >= diagonal > 0, but rounding can graze zero at deep dips.
    return shift + std::log(std::max(total, 1e-300));
}

/// log numerator via Hubbard-Stratonovich + Gauss-Hermite, O(G d). Returns
/// false if the rule did not converge by max order.
inline bool log_numerator_quadrature(std::span<const double> e, double beta, double gamma,
                                     double eta, double t, double w, double& out,
                                     std::size_t g_start = 32, std::size_t g_max = 512,
                                     double rel_tol = 1e-8) {
    const std::size_t d = e.size();
    const double coupling = 2.0 * gamma * t * (1.0 - eta); // >= 0
    const double kappa = std::sqrt(std::max(0.0, 2.0 * coupling)); // per sqrt(2)x node
    const double noise = std::sqrt(2.0 * gamma * eta) * w;

    std::vector<double> base(d), phase(d), shifted(d);
    for (std::size_t n = 0; n < d; ++n) {
        base[n] = -beta * e[n] - 2.0 * gamma * t * e[n] * e[n] + noise * e[n];
        phase[n] = -t * e[n];
    }

    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t g = g_start; g <= g_max; g *= 2) {
        const GaussHermiteRule& rule = gauss_hermite(g);
        std::vector<double> node_logs(g);
        for (std::size_t j = 0; j < g; ++j) {
            const double s = kappa * rule.nodes[j]; // sqrt(2c) * x_j since g = sqrt(2) x
            for (std::size_t n = 0; n < d; ++n) shifted[n] = base[n] + s * e[n];
            const ScaledComplex sum = shifted_exp_sum(shifted, phase);
            node_logs[j] = rule.log_weights[j] + sum.abs2().log();
        }
        const double val = log_sum_exp(node_logs) - 0.5 * std::log(std::numbers::pi);
        if (have_prev && std::abs(val - prev) < rel_tol) {
            out = val;
            return true;
        }
        prev = val;
        have_prev = true;
    }
    out = prev;
    return false;
}

} // namespace detail_sff

/// Eq.-(4)-style single-sum monitored SFF (unit efficiency), O(d).
inline double sff_monitored(std::span<const double> energies, double beta, double gamma, double t,
                            double w) {
    if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
    const std::size_t d = energies.size();
    const double noise = std::sqrt(2.0 * gamma) * w;
    std::vector<double> expo(d), phase(d);
    for (std::size_t n = 0; n < d; ++n) {
        expo[n] = -(beta - noise) * energies[n] - 2.0 * gamma * t * energies[n] * energies[n];
        phase[n] = -t * energies[n];
    }
    const ScaledComplex amp = shifted_exp_sum(expo, phase);
    const double log_num = amp.abs2().log();
    const double log_zb = detail_sff::log_z(energies, beta);
    const double log_zd = detail_sff::log_denominator_sum(energies, beta, gamma, 1.0, t, w);
    return std::exp(log_num - log_zb - log_zd);
}

/// Finite-efficiency SFF; `method` picks the O(d^2) double sum or the
/// Gauss-Hermite fast path (auto: quadrature for d > 96, exact couplings at
/// eta = 1 short-circuit to the single sum).
inline double sff_efficiency(std::span<const double> energies, double beta, double gamma,
                             double eta, double t, double w,
                             SffMethod method = SffMethod::auto_select) {
    detail_sff::check_gamma_eta(gamma, eta);
    if (eta == 1.0 && method == SffMethod::auto_select)
        return sff_monitored(energies, beta, gamma, t, w);

    const double log_zb = detail_sff::log_z(energies, beta);
    const double log_zd = detail_sff::log_denominator_sum(energies, beta, gamma, eta, t, w);

    double log_num = 0.0;
    if (method == SffMethod::quadrature ||
        (method == SffMethod::auto_select && energies.size() > 96)) {
        if (!detail_sff::log_numerator_quadrature(energies, beta, gamma, eta, t, w, log_num)) {
            std::cerr << "sffmon: Gauss-Hermite did not converge; falling back to direct sum\n";
            log_num = detail_sff::log_numerator_direct(energies, beta, gamma, eta, t, w);
        }
    } else {
        log_num = detail_sff::log_numerator_direct(energies, beta, gamma, eta, t, w);
    }
    return std::exp(log_num - log_zb - log_zd);
}

/// Null-measurement (W_t = 0) slice of the monitored SFF. Equals normalized
/// propagation with amplitude decay e^{-2 gamma E_n^2 t}.
inline double sff_nojump(std::span<const double> energies, double beta, double gamma, double t) {
    return sff_monitored(energies, beta, gamma, t, 0.0);
}

/// Energy-dephasing (Lindblad) SFF: Eq. (6) at eta = 0; noise-independent.
inline double sff_dephasing(std::span<const double> energies, double beta, double gamma, double t,
                            SffMethod method = SffMethod::auto_select) {
    return sff_efficiency(energies, beta, gamma, 0.0, t, 0.0, method);
}

/// Closed-system SFF |Z(beta + it)|^2 / Z(beta)^2.
inline double sff_unitary(std::span<const double> energies, double beta, double t) {
    const std::size_t d = energies.size();
    std::vector<double> expo(d), phase(d);
    for (std::size_t n = 0; n < d; ++n) {
        expo[n] = -beta * energies[n];
        phase[n] = -t * energies[n];
    }
    const ScaledComplex amp = shifted_exp_sum(expo, phase);
    return std::exp(amp.abs2().log() - 2.0 * detail_sff::log_z(energies, beta));
}

/// Per-trajectory numerator/denominator logs of the efficiency SFF; the
/// averaging engine needs both pieces for annealed ratios.
struct SffSample {
    double log_num = 0.0;
    double log_den = 0.0; // log [Z(beta) * sum_n e^{-beta En} K_t(En,En)]

    double value() const { return std::exp(log_num - log_den); }
};

inline SffSample sff_sample(std::span<const double> energies, double beta, double gamma,
                            double eta, double t, double w,
                            SffMethod method = SffMethod::auto_select) {
    detail_sff::check_gamma_eta(gamma, eta);
    const double log_zb = detail_sff::log_z(energies, beta);
    const double log_zd = detail_sff::log_denominator_sum(energies, beta, gamma, eta, t, w);
    double log_num = 0.0;
    if (eta == 1.0) {
        const std::size_t d = energies.size();
        const double noise = std::sqrt(2.0 * gamma) * w;
        std::vector<double> expo(d), phase(d);
        for (std::size_t n = 0; n < d; ++n) {
            expo[n] = -(beta - noise) * energies[n] - 2.0 * gamma * t * energies[n] * energies[n];
            phase[n] = -t * energies[n];
        }
        log_num = shifted_exp_sum(expo, phase).abs2().log();
    } else if (method == SffMethod::quadrature ||
               (method == SffMethod::auto_select && energies.size() > 96)) {
        if (!detail_sff::log_numerator_quadrature(energies, beta, gamma, eta, t, w, log_num))
            log_num = detail_sff::log_numerator_direct(energies, beta, gamma, eta, t, w);
    } else {
        log_num = detail_sff::log_numerator_direct(energies, beta, gamma, eta, t, w);
    }
    return {log_num, log_zb + log_zd};
}

/// Analytic Wiener average of the Eq.-(4) numerator (E[e^{lambda W}] =
/// e^{lambda^2 t / 2} applied termwise): the dephasing numerator
/// sum_nm e^{-beta(En+Em) - it(En-Em) - g t (En-Em)^2}, as a log.
inline double log_annealed_numerator(std::span<const double> energies, double beta, double gamma,
                                     double t) {
    return detail_sff::log_numerator_direct(energies, beta, gamma, 0.0, t, 0.0);
}

} // namespace sffmon
