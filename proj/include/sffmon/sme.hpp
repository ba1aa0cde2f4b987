#pragma once

// Euler-Maruyama integration of the monitoring SME in the energy eigenbasis.
// H is diagonal there, so the update is a per-(n,m) scalar recursion:
//   nonlinear:          d rho_nm = [-i(En-Em) - g(En-Em)^2] rho_nm dt
//                                  + sqrt(2 g eta) [(En+Em) - 2<H>] rho_nm dW
//   linear_normalized:  same without the -2<H> innovation shift, followed by
//                       a trace normalization each step.
// Both forms consume identical increments from the supplied path. The
// diagonal sector closes on itself, so observable- and collapse-statistics
// runs use the O(d) diagonal recursion.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/grid.hpp"
#include "sffmon/rng.hpp"
#include "sffmon/trajectory.hpp"
#include "sffmon/wiener.hpp"

namespace sffmon {

enum class SmeForm { nonlinear, linear_normalized };

/// dt * (max|E|)^2 * max(1, gamma) <= guard (default 0.1).
inline double sme_stability_dt(const SpectrumRealization& spec, double gamma,
                               double guard = 0.1) {
    const double emax = std::max(std::abs(spec.energies.front()), std::abs(spec.energies.back()));
    return guard / std::max(1e-300, emax * emax * std::max(1.0, gamma));
}

inline void check_sme_step(const SpectrumRealization& spec, double gamma, double dt,
                           double guard = 0.1) {
    const double required = sme_stability_dt(spec, gamma, guard);
    if (dt > required * (1.0 + 1e-12)) throw StepSizeError(dt, required);
}

/// Dense integrator; state is the full rho matrix.
class SmeIntegrator {
public:
    SmeIntegrator(const CoherentGibbsState& rho0, double gamma, double eta, SmeForm form)
        : spectrum_(rho0.spectrum_ptr()), gamma_(gamma), eta_(eta), form_(form) {
        detail::check_gamma_eta(gamma, eta);
        const std::size_t d = rho0.dim();
        rho_.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t m = 0; m < d; ++m)
                rho_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) =
                    rho0.amplitude(n) * rho0.amplitude(m);
        t_ = 0.0;
        w_ = 0.0;
    }

    void step(double dt, double dw) {
        const auto& e = spectrum_->energies;
        const Eigen::Index d = rho_.rows();
        const double innovation_scale = std::sqrt(2.0 * gamma_ * eta_);
        const double mu = (form_ == SmeForm::nonlinear) ? mean_energy() : 0.0;
        for (Eigen::Index n = 0; n < d; ++n) {
            const double en = e[static_cast<std::size_t>(n)];
            for (Eigen::Index m = 0; m < d; ++m) {
                const double em = e[static_cast<std::size_t>(m)];
                const double diff = en - em;
                const std::complex<double> drift(-gamma_ * diff * diff * dt, -diff * dt);
                const double innov = (form_ == SmeForm::nonlinear)
                                         ? innovation_scale * ((en + em) - 2.0 * mu)
                                         : innovation_scale * (en + em);
                rho_(n, m) *= 1.0 + drift + innov * dw;
            }
        }
        if (form_ == SmeForm::linear_normalized) {
            const double tr = rho_.diagonal().real().sum();
            rho_ /= tr;
        }
        t_ += dt;
        w_ += dw;
    }

    double mean_energy() const {
        const auto& e = spectrum_->energies;
        double acc = 0.0;
        for (Eigen::Index n = 0; n < rho_.rows(); ++n)
            acc += e[static_cast<std::size_t>(n)] * rho_(n, n).real();
        return acc;
    }

    double variance() const {
        const auto& e = spectrum_->energies;
        const double mu = mean_energy();
        double acc = 0.0;
        for (Eigen::Index n = 0; n < rho_.rows(); ++n)
            acc += (e[static_cast<std::size_t>(n)] - mu) * (e[static_cast<std::size_t>(n)] - mu) *
                   rho_(n, n).real();
        return acc;
    }

    const Eigen::MatrixXcd& rho() const { return rho_; }
    double time() const { return t_; }

    MonitoredState snapshot() const {
        MonitoredState s;
        s.spectrum = spectrum_;
        s.t = t_;
        s.gamma = gamma_;
        s.eta = eta_;
        s.w = w_;
        s.rank1 = false;
        s.rho = rho_;
        return s;
    }

private:
    SpectrumPtr spectrum_;
    double gamma_, eta_;
    SmeForm form_;
    Eigen::MatrixXcd rho_;
    double t_ = 0.0, w_ = 0.0;
};

/// Integrate along a uniform grid sharing the path's noise; calls
/// observer(k, integrator) at every grid point (k = 0 is the initial state).
inline void integrate_sme_observe(const CoherentGibbsState& rho0, double gamma, double eta,
                                  const TimeGrid& grid, const WienerPath& path, SmeForm form,
                                  const std::function<void(std::size_t, const SmeIntegrator&)>& observer) {
    grid.validate();
    if (grid.front() != 0.0) throw ValidationError("SDE grid must start at t = 0");
    const double dt = grid.uniform_step();
    if (path.grid.points != grid.points) throw ValidationError("path must live on the SDE grid");
    check_sme_step(rho0.spectrum(), gamma, dt);
    SmeIntegrator integ(rho0, gamma, eta, form);
    observer(0, integ);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        integ.step(dt, path.increment(k));
        observer(k + 1, integ);
    }
}

/// Convenience wrapper storing a state per grid point (small runs only).
inline std::vector<MonitoredState> integrate_sme(const CoherentGibbsState& rho0, double gamma,
                                                 double eta, const TimeGrid& grid,
                                                 const WienerPath& path, SmeForm form) {
    std::vector<MonitoredState> states;
    states.reserve(grid.size());
    integrate_sme_observe(rho0, gamma, eta, grid, path, form,
                          [&](std::size_t, const SmeIntegrator& integ) {
                              states.push_back(integ.snapshot());
                          });
    return states;
}

/// O(d) diagonal recursion (populations only); valid because the (n,m)
/// sectors decouple in the eigenbasis.
class DiagonalSme {
public:
    DiagonalSme(const CoherentGibbsState& rho0, double gamma, double eta, SmeForm form)
        : spectrum_(rho0.spectrum_ptr()), gamma_(gamma), eta_(eta), form_(form) {
        detail::check_gamma_eta(gamma, eta);
        p_.resize(rho0.dim());
        for (std::size_t n = 0; n < p_.size(); ++n)
            p_[n] = std::exp(rho0.log_populations()[n]);
    }

    void step(double /*dt*/, double dw) {
        const auto& e = spectrum_->energies;
        const double scale = 2.0 * std::sqrt(2.0 * gamma_ * eta_);
        if (form_ == SmeForm::nonlinear) {
            const double mu = mean_energy();
            for (std::size_t n = 0; n < p_.size(); ++n)
                p_[n] *= 1.0 + scale * (e[n] - mu) * dw;
        } else {
            double tr = 0.0;
            for (std::size_t n = 0; n < p_.size(); ++n) {
                p_[n] *= 1.0 + scale * e[n] * dw;
                tr += p_[n];
            }
            for (auto& v : p_) v /= tr;
        }
    }

    double mean_energy() const {
        const auto& e = spectrum_->energies;
        double acc = 0.0;
        for (std::size_t n = 0; n < p_.size(); ++n) acc += e[n] * p_[n];
        return acc;
    }

    double variance() const {
        const auto& e = spectrum_->energies;
        const double mu = mean_energy();
        double acc = 0.0;
        for (std::size_t n = 0; n < p_.size(); ++n) acc += (e[n] - mu) * (e[n] - mu) * p_[n];
        return acc;
    }

    double third_central_moment() const {
        const auto& e = spectrum_->energies;
        const double mu = mean_energy();
        double acc = 0.0;
        for (std::size_t n = 0; n < p_.size(); ++n)
            acc += (e[n] - mu) * (e[n] - mu) * (e[n] - mu) * p_[n];
        return acc;
    }

    const std::vector<double>& populations() const { return p_; }

    std::size_t argmax_population() const {
        return static_cast<std::size_t>(
            std::distance(p_.begin(), std::max_element(p_.begin(), p_.end())));
    }

private:
    SpectrumPtr spectrum_;
    double gamma_, eta_;
    SmeForm form_;
    std::vector<double> p_;
};

struct CollapseStats {
    std::vector<std::uint64_t> counts; // collapse frequency per eigenindex
    std::uint64_t n_paths = 0;
    std::uint64_t n_converged = 0; // variance below threshold by t_final

    std::vector<double> frequencies() const {
        std::vector<double> f(counts.size());
        for (std::size_t n = 0; n < counts.size(); ++n)
            f[n] = static_cast<double>(counts[n]) / static_cast<double>(n_paths);
        return f;
    }
};

/// Unit-efficiency collapse: run nonlinear diagonal trajectories along the
/// grid until the conditional variance drops below threshold * V(0), record
/// argmax_n rho_nn.
inline CollapseStats collapse_statistics(const CoherentGibbsState& rho0, double gamma,
                                         const TimeGrid& grid, std::size_t n_paths,
                                         std::uint64_t master_seed,
                                         double variance_threshold = 1e-8) {
    grid.validate();
    if (grid.front() != 0.0) throw ValidationError("collapse grid must start at t = 0");
    const double dt = grid.uniform_step();
    check_sme_step(rho0.spectrum(), gamma, dt);

    CollapseStats stats;
    stats.counts.assign(rho0.dim(), 0);
    stats.n_paths = n_paths;
    for (std::size_t j = 0; j < n_paths; ++j) {
        NoiseStream stream = derive_stream(master_seed, "collapse", j);
        DiagonalSme traj(rho0, gamma, 1.0, SmeForm::nonlinear);
        const double v0 = traj.variance();
        bool converged = false;
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            traj.step(dt, std::sqrt(dt) * stream.gaussian());
            if (traj.variance() < variance_threshold * v0) {
                converged = true;
                break;
            }
        }
        if (converged) ++stats.n_converged;
        ++stats.counts[traj.argmax_population()];
    }
    return stats;
}

} // namespace sffmon
