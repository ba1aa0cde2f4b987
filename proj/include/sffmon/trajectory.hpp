#pragma once

// Closed-form trajectory evolution in the energy eigenbasis. For detection
// efficiency eta the conditioned state is
//   rho_nm(t) = rho_nm(0) exp[-i(En-Em)t - g t (En-Em)^2 - g eta t (En+Em)^2
//                             + sqrt(2 g eta)(En+Em) W_t] / normalizer,
//   normalizer = sum_k rho_kk(0) exp[-4 g eta t Ek^2 + 2 sqrt(2 g eta) Ek W_t].
// All exponent families are evaluated under shared max shifts; the exponents
// grow like g t E^2 + sqrt(g) |W| |E| and overflow binary64 near the plateau
// otherwise. At eta = 1 the state is exactly rank one and is stored as a
// length-d amplitude vector.

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <complex>
#include <iostream>
#include <memory>
#include <span>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/logsum.hpp"
#include "sffmon/spectrum.hpp"

namespace sffmon {

using SpectrumPtr = std::shared_ptr<const SpectrumRealization>;

/// |psi_beta> = sum_n e^{-beta E_n/2}/sqrt(Z) |n>, kept as log-weights.
class CoherentGibbsState {
public:
    CoherentGibbsState(SpectrumPtr spectrum, double beta)
        : spectrum_(std::move(spectrum)), beta_(beta) {
        if (!spectrum_) throw ValidationError("null spectrum");
        spectrum_->validate();
        if (beta_ < 0.0) throw ValidationError("beta must be >= 0");
        const auto& e = spectrum_->energies;
        std::vector<double> expo(e.size());
        for (std::size_t n = 0; n < e.size(); ++n) expo[n] = -beta_ * e[n];
        log_z_ = log_sum_exp(expo);
        log_p0_.resize(e.size());
        for (std::size_t n = 0; n < e.size(); ++n) log_p0_[n] = expo[n] - log_z_;
    }

    const SpectrumRealization& spectrum() const { return *spectrum_; }
    SpectrumPtr spectrum_ptr() const { return spectrum_; }
    double beta() const { return beta_; }
    double log_z() const { return log_z_; }
    std::size_t dim() const { return log_p0_.size(); }

    /// log rho_nn(0) = -beta E_n - log Z.
    const std::vector<double>& log_populations() const { return log_p0_; }

    /// Amplitudes c_n = e^{-beta E_n / 2} / sqrt(Z); all <= 1.
    double amplitude(std::size_t n) const { return std::exp(0.5 * log_p0_[n]); }

private:
    SpectrumPtr spectrum_;
    double beta_;
    double log_z_;
    std::vector<double> log_p0_;
};

/// Z(x, gamma; t) = sum_n exp(-x E_n - 4 gamma E_n^2 t), as a ScaledReal.
inline ScaledReal dephased_partition_function(std::span<const double> energies, double x,
                                              double gamma, double t) {
    if (gamma < 0.0 || t < 0.0) throw ValidationError("need gamma >= 0 and t >= 0");
    std::vector<double> expo(energies.size());
    for (std::size_t n = 0; n < energies.size(); ++n)
        expo[n] = -x * energies[n] - 4.0 * gamma * energies[n] * energies[n] * t;
    return shifted_exp_sum(expo);
}

inline ScaledReal dephased_partition_function(const SpectrumRealization& spec, double x,
                                              double gamma, double t) {
    return dephased_partition_function(std::span<const double>(spec.energies), x, gamma, t);
}

namespace detail {

inline void check_gamma_eta(double gamma, double eta) {
    if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
    if (eta < 0.0 || eta > 1.0) throw ValidationError("eta must be in [0, 1]");
}

/// Diagonal log-weights of the conditioned state (up to the shared shift):
/// q_n = log rho_nn(0) - 4 g eta t E_n^2 + 2 sqrt(2 g eta) E_n w.
inline std::vector<double> conditioned_log_weights(const CoherentGibbsState& rho0, double gamma,
                                                   double eta, double t, double w) {
    const auto& e = rho0.spectrum().energies;
    const double noise = 2.0 * std::sqrt(2.0 * gamma * eta) * w;
    const double filt = 4.0 * gamma * eta * t;
    std::vector<double> q(e.size());
    for (std::size_t n = 0; n < e.size(); ++n)
        q[n] = rho0.log_populations()[n] - filt * e[n] * e[n] + noise * e[n];
    return q;
}

inline std::atomic<long long> variance_clamp_events{0};

} // namespace detail

/// Trajectory-conditioned state at one time. Rank-one (amplitude vector) at
/// eta = 1, dense otherwise.
struct MonitoredState {
    SpectrumPtr spectrum;
    double t = 0.0;
    double gamma = 0.0;
    double eta = 1.0;
    double w = 0.0;
    bool rank1 = true;
    Eigen::VectorXcd amplitudes; // rank1
    Eigen::MatrixXcd rho;        // dense (eta < 1)

    std::size_t dim() const {
        return rank1 ? static_cast<std::size_t>(amplitudes.size())
                     : static_cast<std::size_t>(rho.rows());
    }

    std::complex<double> element(std::size_t n, std::size_t m) const {
        if (rank1)
            return amplitudes(static_cast<Eigen::Index>(n)) *
                   std::conj(amplitudes(static_cast<Eigen::Index>(m)));
        return rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }

    double population(std::size_t n) const { return std::real(element(n, n)); }

    double trace() const {
        double acc = 0.0;
        for (std::size_t n = 0; n < dim(); ++n) acc += population(n);
        return acc;
    }

    double purity() const {
        if (rank1) {
            const double tr = trace(); // rank one: Tr rho^2 = (Tr rho)^2
            return tr * tr;
        }
        return (rho * rho).trace().real();
    }

    /// <psi_beta| rho |psi_beta> for the same spectrum.
    double fidelity_with(const CoherentGibbsState& rho0) const {
        const std::size_t d = dim();
        if (rho0.dim() != d) throw ValidationError("state/spectrum dimension mismatch");
        if (rank1) {
            std::complex<double> overlap = 0.0;
            for (std::size_t n = 0; n < d; ++n)
                overlap += rho0.amplitude(n) * amplitudes(static_cast<Eigen::Index>(n));
            return std::norm(overlap);
        }
        std::complex<double> acc = 0.0;
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t m = 0; m < d; ++m)
                acc += rho0.amplitude(n) * rho0.amplitude(m) *
                       rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        return acc.real();
    }
};

/// Closed-form conditioned state at time t given W_t = w.
inline MonitoredState evolve_closed_form(const CoherentGibbsState& rho0, double gamma,
                                         double eta, double t, double w) {
    detail::check_gamma_eta(gamma, eta);
    if (t < 0.0) throw ValidationError("t must be >= 0");
    const auto& e = rho0.spectrum().energies;
    const std::size_t d = e.size();
    const std::vector<double> q = detail::conditioned_log_weights(rho0, gamma, eta, t, w);
    const double log_norm = log_sum_exp(q);

    MonitoredState state;
    state.spectrum = rho0.spectrum_ptr();
    state.t = t;
    state.gamma = gamma;
    state.eta = eta;
    state.w = w;

    if (eta == 1.0) {
        state.rank1 = true;
        state.amplitudes.resize(static_cast<Eigen::Index>(d));
        for (std::size_t n = 0; n < d; ++n)
            state.amplitudes(static_cast<Eigen::Index>(n)) =
                std::polar(std::exp(0.5 * (q[n] - log_norm)), -e[n] * t);
        return state;
    }

    state.rank1 = false;
    state.rho.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const double noise = std::sqrt(2.0 * gamma * eta) * w;
    for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t m = 0; m <= n; ++m) {
            const double diff = e[n] - e[m];
            const double sum = e[n] + e[m];
            const double expo = 0.5 * (rho0.log_populations()[n] + rho0.log_populations()[m]) -
                                gamma * t * diff * diff - gamma * eta * t * sum * sum +
                                noise * sum - log_norm;
            const std::complex<double> val = std::polar(std::exp(expo), -diff * t);
            state.rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) = val;
            state.rho(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = std::conj(val);
        }
    }
    return state;
}

/// <H>_t along the trajectory, from the diagonal weights alone.
inline double mean_energy(const CoherentGibbsState& rho0, double gamma, double eta, double t,
                          double w) {
    detail::check_gamma_eta(gamma, eta);
    const auto& e = rho0.spectrum().energies;
    const std::vector<double> p = softmax(detail::conditioned_log_weights(rho0, gamma, eta, t, w));
    std::vector<double> terms(e.size());
    for (std::size_t n = 0; n < e.size(); ++n) terms[n] = e[n] * p[n];
    return pairwise_sum<double>(terms);
}

/// <Delta H^2>_t, computed as sum_n (E_n - mu)^2 p_n (non-negative by
/// construction; the clamp only catches pathological rounding and counts it).
inline double energy_variance(const CoherentGibbsState& rho0, double gamma, double eta, double t,
                              double w) {
    detail::check_gamma_eta(gamma, eta);
    const auto& e = rho0.spectrum().energies;
    const std::vector<double> p = softmax(detail::conditioned_log_weights(rho0, gamma, eta, t, w));
    std::vector<double> terms(e.size());
    for (std::size_t n = 0; n < e.size(); ++n) terms[n] = e[n] * p[n];
    const double mu = pairwise_sum<double>(terms);
    for (std::size_t n = 0; n < e.size(); ++n) terms[n] = (e[n] - mu) * (e[n] - mu) * p[n];
    const double var = pairwise_sum<double>(terms);
    if (var < -1e-10) {
        detail::variance_clamp_events.fetch_add(1, std::memory_order_relaxed);
        std::cerr << "sffmon: variance clamp triggered (" << var << ")\n";
    }
    return std::max(var, 0.0);
}

/// Tr[rho(t)^2] from the closed form, O(d^2) with a shared shift. Exactly 1
/// at eta = 1 (the numerator factorizes into the squared normalizer).
inline double purity(const CoherentGibbsState& rho0, double gamma, double eta, double t,
                     double w) {
    detail::check_gamma_eta(gamma, eta);
    const auto& e = rho0.spectrum().energies;
    const std::size_t d = e.size();
    const std::vector<double> q = detail::conditioned_log_weights(rho0, gamma, eta, t, w);
    const double log_norm = log_sum_exp(q);

    const double noise = 2.0 * std::sqrt(2.0 * gamma * eta) * w;
    std::vector<double> row(d);
    std::vector<double> rows(d);
    double shift = -std::numeric_limits<double>::infinity();
    auto exponent = [&](std::size_t n, std::size_t m) {
        const double diff = e[n] - e[m];
        const double sum = e[n] + e[m];
        return rho0.log_populations()[n] + rho0.log_populations()[m] -
               2.0 * gamma * t * diff * diff - 2.0 * gamma * eta * t * sum * sum + noise * sum;
    };
    for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = 0; m < d; ++m) shift = std::max(shift, exponent(n, m));
    for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t m = 0; m < d; ++m) row[m] = std::exp(exponent(n, m) - shift);
        rows[n] = pairwise_sum<double>(row);
    }
    const double log_num = shift + std::log(pairwise_sum<double>(rows));
    return std::exp(log_num - 2.0 * log_norm);
}

/// Number of times the variance clamp fired (diagnostic).
inline long long variance_clamp_count() {
    return detail::variance_clamp_events.load(std::memory_order_relaxed);
}

} // namespace sffmon
